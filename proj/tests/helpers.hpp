#pragma once

#include <secgame/secgame.hpp>

#include <cmath>
#include <random>
#include <vector>

namespace testhelpers {

using secgame::GameModel;
using secgame::Vec;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

// Valid self-dependence triples, both a>1 and a<1 branches.
inline GameModel random_self_dependence(std::mt19937_64& rng, bool a_above_one) {
    double a = a_above_one ? log_uniform(rng, 1.05, 20.0) : uniform(rng, 0.05, 0.95);
    int n = uniform_int(rng, 3, 10);
    double c = a * uniform(rng, 0.02, 0.9);
    return GameModel::self_dependence(a, n, c);
}

inline GameModel random_dominant(std::mt19937_64& rng) {
    double a = log_uniform(rng, 1.05, 15.0);
    int n = uniform_int(rng, 3, 12);
    double c = uniform(rng, 0.05, 0.95);
    return GameModel::dominant(a, n, c);
}

inline GameModel random_two_class(std::mt19937_64& rng) {
    double a1 = uniform(rng, 1.2, 10.0);
    double a2 = uniform(rng, 0.15, 0.9);
    int n1 = uniform_int(rng, 2, 6);
    int n2 = uniform_int(rng, 1, 4);
    double c = a2 * uniform(rng, 0.1, 0.8);
    return GameModel::two_class(a1, a2, n1, n2, c);
}

inline GameModel random_general_wte(std::mt19937_64& rng) {
    int n = uniform_int(rng, 2, 5);
    std::vector<Vec> w(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(n)));
    Vec c(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                i == j ? uniform(rng, 0.8, 3.0) : uniform(rng, 0.0, 1.0);
        c[static_cast<std::size_t>(i)] = uniform(rng, 0.1, 0.9);
    }
    return GameModel::general_wte(std::move(w), std::move(c));
}

inline Vec random_profile(std::mt19937_64& rng, int n, double lo, double hi) {
    Vec x(static_cast<std::size_t>(n));
    for (auto& v : x) v = uniform(rng, lo, hi);
    return x;
}

// Central finite differences of the social cost; the independent gradient oracle.
inline Vec fd_social_gradient(const GameModel& model, const Vec& x) {
    Vec g(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        double h = 1e-6 * std::max(1.0, std::abs(x[k]));
        Vec hi = x, lo = x;
        hi[k] += h;
        lo[k] -= h;
        if (lo[k] < 0.0) lo[k] = 0.0;  // keep the sample feasible
        g[k] = (secgame::social_cost(model, hi) - secgame::social_cost(model, lo)) / (hi[k] - lo[k]);
    }
    return g;
}

// Independent check of an exit equilibrium: nudging the outlier off its level
// never lowers its own cost, and the participants' group stationarity holds.
inline bool exit_equilibrium_checks_out(const GameModel& model, const secgame::ExitEquilibrium& ee) {
    const int n = model.n();
    const int i = ee.outlier;
    double own = secgame::user_cost(model, i, ee.profile);
    for (double step : {1e-3, -1e-3}) {
        Vec nudged = ee.profile;
        nudged[static_cast<std::size_t>(i)] += step;
        if (nudged[static_cast<std::size_t>(i)] < 0.0) continue;
        if (secgame::user_cost(model, i, nudged) < own - 1e-12) return false;
    }
    for (int k = 0; k < n; ++k) {
        if (k == i) continue;
        double d = model.unit_cost(k);
        for (int j = 0; j < n; ++j)
            if (j != i) d += secgame::risk_partial(model, j, k, ee.profile);
        bool ok = ee.profile[static_cast<std::size_t>(k)] > 1e-12 ? std::abs(d) <= 1e-8 : d >= -1e-8;
        if (!ok) return false;
    }
    return true;
}

}  // namespace testhelpers
