#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "numeric.hpp"

namespace secgame {

using InvestmentProfile = Vec;

enum class RiskKind { Exponential, Reciprocal };

// Fully connected weighted total effort with self-weight a on the diagonal
// and 1 elsewhere; c < a keeps every equilibrium away from the all-zero corner.
struct SelfDependence {
    double a;
    int n;
    double c;
};

// Users 0..n1-1 carry self-weight a1 (self-dependent), users n1..n-1 carry a2
// (reliant); cross weights are 1. Standing assumption c < a2 < 1 < a1.
struct TwoClass {
    double a1;
    double a2;
    int n1;
    int n2;
    double c;
};

// Everyone's risk weights user 0's action by a > 1; all other weights are 1.
struct Dominant {
    double a;
    int n;
    double c;
};

// User 0 is the hub: its risk depends on everyone, a leaf's only on itself
// and the hub. Risk is f(weighted sum) with f = exp(-z) or 1/z.
struct Star {
    int n;
    double c;
    RiskKind risk;
};

// Smooth weakest-link: risk_i = (sum_j exp(-rho x_j))^(1/rho), sharper as rho grows.
struct WeakestLink {
    int n;
    double rho;
    double c;
};

// Arbitrary nonnegative influence matrix with positive diagonal, per-user unit costs.
struct GeneralWte {
    std::vector<Vec> weights;  // row i weights user i's risk exponent
    Vec unit_costs;
};

enum class Family { SelfDependence, TwoClass, Dominant, Star, WeakestLink, GeneralWte };

class GameModel {
public:
    static GameModel self_dependence(double a, int n, double c) {
        require(n >= 2, "SelfDependence: n >= 2 required");
        require(a > 0 && c > 0 && std::isfinite(a) && std::isfinite(c), "SelfDependence: parameters must be positive and finite");
        require(c < a, "SelfDependence: c < a required");
        return GameModel(SelfDependence{a, n, c});
    }
    static GameModel two_class(double a1, double a2, int n1, int n2, double c) {
        require(n1 >= 2 && n2 >= 1, "TwoClass: n1 >= 2 and n2 >= 1 required");
        require(c > 0 && std::isfinite(a1) && std::isfinite(a2) && std::isfinite(c), "TwoClass: parameters must be positive and finite");
        require(c < a2 && a2 < 1.0 && 1.0 < a1, "TwoClass: c < a2 < 1 < a1 required");
        return GameModel(TwoClass{a1, a2, n1, n2, c});
    }
    static GameModel dominant(double a, int n, double c) {
        require(n >= 2, "Dominant: n >= 2 required");
        require(std::isfinite(a) && std::isfinite(c), "Dominant: parameters must be finite");
        require(c > 0 && c < 1.0 && a > 1.0, "Dominant: c < 1 < a required");
        return GameModel(Dominant{a, n, c});
    }
    static GameModel star(int n, double c, RiskKind risk) {
        require(n >= 2, "Star: n >= 2 required");
        require(c > 0 && std::isfinite(c), "Star: c must be positive and finite");
        if (risk == RiskKind::Exponential)
            require(c <= 1.0, "Star: c <= 1 required for exponential risk");
        return GameModel(Star{n, c, risk});
    }
    static GameModel weakest_link(int n, double rho, double c) {
        require(n >= 2, "WeakestLink: n >= 2 required");
        require(rho > 0 && c > 0 && std::isfinite(rho) && std::isfinite(c), "WeakestLink: rho and c must be positive and finite");
        return GameModel(WeakestLink{n, rho, c});
    }
    static GameModel general_wte(std::vector<Vec> weights, Vec unit_costs) {
        const std::size_t n = weights.size();
        require(n >= 2, "GeneralWte: n >= 2 required");
        require(unit_costs.size() == n, "GeneralWte: cost vector size mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            require(weights[i].size() == n, "GeneralWte: weight matrix must be square");
            require(weights[i][i] > 0, "GeneralWte: diagonal weights must be strictly positive");
            for (double w : weights[i]) require(std::isfinite(w) && w >= 0, "GeneralWte: weights must be finite and >= 0");
        }
        for (double ci : unit_costs) require(std::isfinite(ci) && ci > 0, "GeneralWte: unit costs must be positive");
        return GameModel(GeneralWte{std::move(weights), std::move(unit_costs)});
    }

    Family family() const { return static_cast<Family>(v_.index()); }

    int n() const {
        switch (family()) {
            case Family::SelfDependence: return as_self_dependence().n;
            case Family::TwoClass: { const auto& m = as_two_class(); return m.n1 + m.n2; }
            case Family::Dominant: return as_dominant().n;
            case Family::Star: return as_star().n;
            case Family::WeakestLink: return as_weakest_link().n;
            case Family::GeneralWte: return static_cast<int>(as_general_wte().unit_costs.size());
        }
        return 0;
    }

    double unit_cost(int i) const {
        if (family() == Family::GeneralWte) return as_general_wte().unit_costs[static_cast<std::size_t>(i)];
        switch (family()) {
            case Family::SelfDependence: return as_self_dependence().c;
            case Family::TwoClass: return as_two_class().c;
            case Family::Dominant: return as_dominant().c;
            case Family::Star: return as_star().c;
            case Family::WeakestLink: return as_weakest_link().c;
            default: return 0.0;
        }
    }

    // True for the families whose risk is exp(-(Wx)_i) for a weight matrix W.
    bool weighted_exponential() const {
        switch (family()) {
            case Family::SelfDependence:
            case Family::TwoClass:
            case Family::Dominant:
            case Family::GeneralWte:
                return true;
            case Family::Star:
                return as_star().risk == RiskKind::Exponential;
            case Family::WeakestLink:
                return false;
        }
        return false;
    }

    // W_ij for weighted-exponential families.
    double influence(int i, int j) const {
        switch (family()) {
            case Family::SelfDependence: {
                const auto& m = as_self_dependence();
                return i == j ? m.a : 1.0;
            }
            case Family::TwoClass: {
                const auto& m = as_two_class();
                if (i != j) return 1.0;
                return i < m.n1 ? m.a1 : m.a2;
            }
            case Family::Dominant: {
                const auto& m = as_dominant();
                return j == 0 ? m.a : 1.0;
            }
            case Family::Star: {
                if (i == 0 || j == 0 || i == j) return 1.0;
                return 0.0;
            }
            case Family::GeneralWte:
                return as_general_wte().weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            case Family::WeakestLink:
                break;
        }
        throw std::logic_error("influence: not a weighted-exponential family");
    }

    const SelfDependence& as_self_dependence() const { return std::get<SelfDependence>(v_); }
    const TwoClass& as_two_class() const { return std::get<TwoClass>(v_); }
    const Dominant& as_dominant() const { return std::get<Dominant>(v_); }
    const Star& as_star() const { return std::get<Star>(v_); }
    const WeakestLink& as_weakest_link() const { return std::get<WeakestLink>(v_); }
    const GeneralWte& as_general_wte() const { return std::get<GeneralWte>(v_); }

    std::string describe() const {
        char buf[160];
        switch (family()) {
            case Family::SelfDependence: {
                const auto& m = as_self_dependence();
                std::snprintf(buf, sizeof buf, "self-dependence(a=%g, n=%d, c=%g)", m.a, m.n, m.c);
                break;
            }
            case Family::TwoClass: {
                const auto& m = as_two_class();
                std::snprintf(buf, sizeof buf, "two-class(a1=%g, a2=%g, n1=%d, n2=%d, c=%g)", m.a1, m.a2, m.n1, m.n2, m.c);
                break;
            }
            case Family::Dominant: {
                const auto& m = as_dominant();
                std::snprintf(buf, sizeof buf, "dominant(a=%g, n=%d, c=%g)", m.a, m.n, m.c);
                break;
            }
            case Family::Star: {
                const auto& m = as_star();
                std::snprintf(buf, sizeof buf, "star(n=%d, c=%g, %s)", m.n, m.c,
                              m.risk == RiskKind::Exponential ? "exp" : "reciprocal");
                break;
            }
            case Family::WeakestLink: {
                const auto& m = as_weakest_link();
                std::snprintf(buf, sizeof buf, "weakest-link(n=%d, rho=%g, c=%g)", m.n, m.rho, m.c);
                break;
            }
            case Family::GeneralWte:
                std::snprintf(buf, sizeof buf, "general-wte(n=%d)", n());
                break;
        }
        return buf;
    }

private:
    using Variant = std::variant<SelfDependence, TwoClass, Dominant, Star, WeakestLink, GeneralWte>;
    explicit GameModel(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

namespace detail {

// Exponent (Wx)_i accumulated before the single exp call, so products of
// many small factors never appear.
inline double risk_exponent(const GameModel& model, int i, const Vec& x) {
    const int n = model.n();
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += model.influence(i, j) * x[static_cast<std::size_t>(j)];
    return s;
}

inline double weakest_link_lse(const WeakestLink& m, const Vec& x) {
    Vec args(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) args[j] = -m.rho * x[j];
    return log_sum_exp(args);
}

}  // namespace detail

inline double risk(const GameModel& model, int i, const Vec& x) {
    switch (model.family()) {
        case Family::WeakestLink: {
            const auto& m = model.as_weakest_link();
            return std::exp(detail::weakest_link_lse(m, x) / m.rho);
        }
        case Family::Star:
            if (model.as_star().risk == RiskKind::Reciprocal) {
                double z = (i == 0) ? x[0] + std::accumulate(x.begin() + 1, x.end(), 0.0)
                                    : x[0] + x[static_cast<std::size_t>(i)];
                return 1.0 / z;  // +inf at z = 0
            }
            [[fallthrough]];
        default:
            return std::exp(-detail::risk_exponent(model, i, x));
    }
}

// d risk_i / d x_j, analytic per family.
inline double risk_partial(const GameModel& model, int i, int j, const Vec& x) {
    switch (model.family()) {
        case Family::WeakestLink: {
            const auto& m = model.as_weakest_link();
            double lse = detail::weakest_link_lse(m, x);
            return -std::exp(-m.rho * x[static_cast<std::size_t>(j)] + (1.0 / m.rho - 1.0) * lse);
        }
        case Family::Star:
            if (model.as_star().risk == RiskKind::Reciprocal) {
                if (i == 0) {
                    double z = x[0] + std::accumulate(x.begin() + 1, x.end(), 0.0);
                    return -1.0 / (z * z);
                }
                if (j != 0 && j != i) return 0.0;
                double z = x[0] + x[static_cast<std::size_t>(i)];
                return -1.0 / (z * z);
            }
            [[fallthrough]];
        default:
            return -model.influence(i, j) * std::exp(-detail::risk_exponent(model, i, x));
    }
}

enum class Mechanism { Pivotal, Externality };

struct TaxProfile {
    Vec t;  // positive = payment, negative = reward
    Mechanism mechanism = Mechanism::Pivotal;
};

struct CostBreakdown {
    double risk = 0;
    double investment_cost = 0;
    double tax = 0;
    double total = 0;
};

inline CostBreakdown eval_cost(int i, const Vec& x, const GameModel& model) {
    require(i >= 0 && i < model.n(), "eval_cost: user index out of range");
    check_profile(x, static_cast<std::size_t>(model.n()));
    CostBreakdown b;
    b.risk = risk(model, i, x);
    b.investment_cost = model.unit_cost(i) * x[static_cast<std::size_t>(i)];
    b.tax = 0.0;
    b.total = b.risk + b.investment_cost;
    return b;
}

inline double eval_total_cost(int i, const Vec& x, const TaxProfile& taxes, const GameModel& model) {
    require(taxes.t.size() == static_cast<std::size_t>(model.n()), "eval_total_cost: tax profile dimension mismatch");
    require(all_finite(taxes.t), "eval_total_cost: taxes must be finite");
    return eval_cost(i, x, model).total + taxes.t[static_cast<std::size_t>(i)];
}

inline double user_cost(const GameModel& model, int i, const Vec& x) {
    return risk(model, i, x) + model.unit_cost(i) * x[static_cast<std::size_t>(i)];
}

inline double social_cost(const GameModel& model, const Vec& x) {
    const int n = model.n();
    if (model.family() == Family::WeakestLink) {
        const auto& m = model.as_weakest_link();
        double r = std::exp(detail::weakest_link_lse(m, x) / m.rho);
        double inv = 0.0;
        for (double xi : x) inv += xi;
        return n * r + m.c * inv;
    }
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += user_cost(model, i, x);
    return s;
}

// Gradient of sum_i g_i; component k is -sum_i W_ik exp(-(Wx)_i) + c_k for
// the weighted-exponential families.
inline Vec social_cost_gradient(const Vec& x, const GameModel& model) {
    const int n = model.n();
    check_profile(x, static_cast<std::size_t>(n));
    Vec g(static_cast<std::size_t>(n), 0.0);
    switch (model.family()) {
        case Family::WeakestLink: {
            const auto& m = model.as_weakest_link();
            double lse = detail::weakest_link_lse(m, x);
            for (int k = 0; k < n; ++k)
                g[static_cast<std::size_t>(k)] =
                    -n * std::exp(-m.rho * x[static_cast<std::size_t>(k)] + (1.0 / m.rho - 1.0) * lse) + m.c;
            return g;
        }
        case Family::Star:
            if (model.as_star().risk == RiskKind::Reciprocal) {
                const auto& m = model.as_star();
                double zr = x[0] + std::accumulate(x.begin() + 1, x.end(), 0.0);
                double root_term = -1.0 / (zr * zr);
                double sum_leaf = 0.0;
                for (int j = 1; j < n; ++j) {
                    double z = x[0] + x[static_cast<std::size_t>(j)];
                    sum_leaf += -1.0 / (z * z);
                }
                g[0] = root_term + sum_leaf + m.c;
                for (int j = 1; j < n; ++j) {
                    double z = x[0] + x[static_cast<std::size_t>(j)];
                    g[static_cast<std::size_t>(j)] = root_term - 1.0 / (z * z) + m.c;
                }
                return g;
            }
            [[fallthrough]];
        default: {
            Vec r(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = std::exp(-detail::risk_exponent(model, i, x));
            for (int k = 0; k < n; ++k) {
                double s = 0.0;
                for (int i = 0; i < n; ++i) s += model.influence(i, k) * r[static_cast<std::size_t>(i)];
                g[static_cast<std::size_t>(k)] = -s + model.unit_cost(k);
            }
            return g;
        }
    }
}

}  // namespace secgame
