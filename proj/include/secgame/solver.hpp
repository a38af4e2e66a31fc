#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "model.hpp"
#include "numeric.hpp"

namespace secgame {

constexpr double kSupportTol = 1e-12;
constexpr double kKktStationarityTol = 1e-8;
constexpr double kSlacknessTol = 1e-9;

struct KktCertificate {
    Vec multipliers;            // lambda_i >= 0 paired with x_i >= 0
    Vec residuals;              // per-component stationarity violation
    std::vector<int> support;   // indices with x_i > 0
    double max_residual = 0.0;
    double max_slackness = 0.0; // max |lambda_i * x_i|
    bool valid = false;
};

inline KktCertificate certify(const GameModel& model, const Vec& x) {
    const int n = model.n();
    Vec grad = social_cost_gradient(x, model);
    KktCertificate cert;
    cert.multipliers.assign(static_cast<std::size_t>(n), 0.0);
    cert.residuals.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (x[ui] > kSupportTol) {
            cert.support.push_back(i);
            cert.residuals[ui] = std::abs(grad[ui]);
        } else {
            cert.multipliers[ui] = std::max(grad[ui], 0.0);
            cert.residuals[ui] = std::max(-grad[ui], 0.0);
            cert.max_slackness = std::max(cert.max_slackness, std::abs(cert.multipliers[ui] * x[ui]));
        }
        cert.max_residual = std::max(cert.max_residual, cert.residuals[ui]);
    }
    cert.valid = cert.max_residual <= kKktStationarityTol && cert.max_slackness <= kSlacknessTol;
    return cert;
}

struct SocialOptimum {
    InvestmentProfile x;
    KktCertificate kkt;
};

namespace detail {

// Objective sum_{i in rows} exp(-(Wx)_i) + sum_{k in free} c_k x_k, minimized
// over the free coordinates with the rest held fixed. Covers both the full
// social problem and the participants' subproblem in exit equilibria.
struct WteSubproblem {
    const GameModel* model;
    std::vector<int> rows;
    std::vector<int> free_idx;

    double value(const Vec& x) const {
        double s = 0.0;
        for (int i : rows) s += std::exp(-risk_exponent(*model, i, x));
        for (int k : free_idx) s += model->unit_cost(k) * x[static_cast<std::size_t>(k)];
        return s;
    }
    Vec grad(const Vec& x) const {
        Vec r(rows.size());
        for (std::size_t q = 0; q < rows.size(); ++q) r[q] = std::exp(-risk_exponent(*model, rows[q], x));
        Vec g(free_idx.size());
        for (std::size_t p = 0; p < free_idx.size(); ++p) {
            double s = 0.0;
            for (std::size_t q = 0; q < rows.size(); ++q) s += model->influence(rows[q], free_idx[p]) * r[q];
            g[p] = -s + model->unit_cost(free_idx[p]);
        }
        return g;
    }
};

inline double projected_gradient_norm(const WteSubproblem& sp, const Vec& x, const Vec& g) {
    double norm = 0.0;
    for (std::size_t p = 0; p < sp.free_idx.size(); ++p) {
        double xi = x[static_cast<std::size_t>(sp.free_idx[p])];
        double pg = xi > 0.0 ? g[p] : std::min(g[p], 0.0);
        norm = std::max(norm, std::abs(pg));
    }
    return norm;
}

// Projected gradient with backtracking line search on the convex objective.
// Returns once the projected-gradient norm reaches tol or the line search
// stalls at float resolution; callers polish with Newton and re-check.
inline Vec pgd_minimize(const WteSubproblem& sp, Vec x, double tol, int max_iter = 100000) {
    double f = sp.value(x);
    double step = 1.0;
    for (int it = 0; it < max_iter; ++it) {
        Vec g = sp.grad(x);
        if (projected_gradient_norm(sp, x, g) <= tol) return x;
        Vec trial = x;
        bool stalled = false;
        for (;;) {
            double decrease = 0.0;
            for (std::size_t p = 0; p < sp.free_idx.size(); ++p) {
                const auto k = static_cast<std::size_t>(sp.free_idx[p]);
                trial[k] = std::max(0.0, x[k] - step * g[p]);
                decrease += g[p] * (x[k] - trial[k]);
            }
            double ft = sp.value(trial);
            if (ft <= f - 1e-4 * decrease) {
                x = trial;
                f = ft;
                break;
            }
            if (step < 1e-16) {
                stalled = true;
                break;
            }
            step *= 0.5;
        }
        if (stalled) return x;
        step = std::min(step * 2.0, 1e6);
    }
    return x;
}

// Newton on the active support pushes the stationarity residual to machine
// precision; the budget identity of the equilibrium taxes depends on it.
inline void newton_refine(const WteSubproblem& sp, Vec& x, int rounds = 50) {
    for (int round = 0; round < rounds; ++round) {
        std::vector<int> sup;
        for (int k : sp.free_idx)
            if (x[static_cast<std::size_t>(k)] > kSupportTol) sup.push_back(k);
        if (sup.empty()) return;
        Vec r(sp.rows.size());
        for (std::size_t q = 0; q < sp.rows.size(); ++q)
            r[q] = std::exp(-risk_exponent(*sp.model, sp.rows[q], x));
        Vec f(sup.size());
        double fnorm = 0.0;
        for (std::size_t p = 0; p < sup.size(); ++p) {
            double s = 0.0;
            for (std::size_t q = 0; q < sp.rows.size(); ++q)
                s += sp.model->influence(sp.rows[q], sup[p]) * r[q];
            f[p] = sp.model->unit_cost(sup[p]) - s;
            fnorm = std::max(fnorm, std::abs(f[p]));
        }
        if (fnorm < 1e-14) return;
        std::vector<Vec> jac(sup.size(), Vec(sup.size(), 0.0));
        for (std::size_t p = 0; p < sup.size(); ++p)
            for (std::size_t l = 0; l < sup.size(); ++l) {
                double s = 0.0;
                for (std::size_t q = 0; q < sp.rows.size(); ++q)
                    s += sp.model->influence(sp.rows[q], sup[p]) * sp.model->influence(sp.rows[q], sup[l]) * r[q];
                jac[p][l] = s;
            }
        Vec d;
        try {
            d = solve_linear(jac, f);
        } catch (const SolverFailure&) {
            return;  // singular: keep the PGD point
        }
        double scale = 1.0;
        for (std::size_t p = 0; p < sup.size(); ++p)
            if (d[p] > 0.0 && x[static_cast<std::size_t>(sup[p])] - d[p] < 0.0)
                scale = std::min(scale, x[static_cast<std::size_t>(sup[p])] / d[p]);
        for (std::size_t p = 0; p < sup.size(); ++p)
            x[static_cast<std::size_t>(sup[p])] =
                std::max(0.0, x[static_cast<std::size_t>(sup[p])] - scale * d[p]);
    }
}

// Full solve of a constrained weighted-exponential subproblem: coarse
// projected-gradient phase, Newton polish on the support, then the 1e-9
// projected-gradient criterion is enforced for real.
inline Vec wte_solve(const WteSubproblem& sp, Vec x) {
    double norm = 0.0;
    for (int round = 0; round < 8; ++round) {
        x = pgd_minimize(sp, x, round == 0 ? 1e-7 : 1e-9);
        newton_refine(sp, x);
        norm = projected_gradient_norm(sp, x, sp.grad(x));
        if (norm <= 1e-9) return x;
    }
    throw SolverFailure("projected gradient did not converge", norm);
}

}  // namespace detail

inline SocialOptimum social_optimum(const GameModel& model) {
    const int n = model.n();
    Vec x(static_cast<std::size_t>(n), 0.0);
    switch (model.family()) {
        case Family::SelfDependence: {
            const auto& m = model.as_self_dependence();
            double level = std::log((m.a + m.n - 1) / m.c) / (m.a + m.n - 1);
            x.assign(static_cast<std::size_t>(n), level);
            break;
        }
        case Family::TwoClass: {
            const auto& m = model.as_two_class();
            const double k1 = m.a1 + m.n1 - 1;
            auto phi = [&](double t) { return k1 * std::exp(-k1 * t) + m.n2 * std::exp(-m.n1 * t) - m.c; };
            double x1 = bisect_decreasing(phi, 0.0, 1.0);
            for (int it = 0; it < 4; ++it) {  // polish: the tax identities want a tight root
                double d = -k1 * k1 * std::exp(-k1 * x1) -
                           static_cast<double>(m.n1) * m.n2 * std::exp(-m.n1 * x1);
                x1 -= phi(x1) / d;
            }
            for (int i = 0; i < m.n1; ++i) x[static_cast<std::size_t>(i)] = x1;
            break;
        }
        case Family::Dominant: {
            const auto& m = model.as_dominant();
            x[0] = std::log(m.a * m.n / m.c) / m.a;
            break;
        }
        case Family::Star: {
            const auto& m = model.as_star();
            x[0] = m.risk == RiskKind::Exponential ? std::log(m.n / m.c) : std::sqrt(m.n / m.c);
            break;
        }
        case Family::WeakestLink: {
            const auto& m = model.as_weakest_link();
            double level = (std::log(static_cast<double>(m.n)) - m.rho * std::log(m.c)) / m.rho;
            x.assign(static_cast<std::size_t>(n), std::max(0.0, level));
            break;
        }
        case Family::GeneralWte: {
            detail::WteSubproblem sp;
            sp.model = &model;
            for (int i = 0; i < n; ++i) {
                sp.rows.push_back(i);
                sp.free_idx.push_back(i);
            }
            x = detail::wte_solve(sp, std::move(x));
            break;
        }
    }
    KktCertificate cert = certify(model, x);
    if (!cert.valid)
        throw SolverFailure("social optimum failed its own KKT check for " + model.describe(),
                            cert.max_residual);
    return SocialOptimum{std::move(x), std::move(cert)};
}

namespace detail {

// One Gauss-Seidel sweep of best responses for weighted-exponential risks:
// x_i <- max(0, (ln(W_ii/c_i) - sum_{j != i} W_ij x_j) / W_ii).
inline double best_response_sweep(const GameModel& model, Vec& x) {
    const int n = model.n();
    double delta = 0.0;
    for (int i = 0; i < n; ++i) {
        double cross = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i) cross += model.influence(i, j) * x[static_cast<std::size_t>(j)];
        double wii = model.influence(i, i);
        double nb = std::max(0.0, (std::log(wii / model.unit_cost(i)) - cross) / wii);
        delta = std::max(delta, std::abs(nb - x[static_cast<std::size_t>(i)]));
        x[static_cast<std::size_t>(i)] = nb;
    }
    return delta;
}

// Exact Nash search by support enumeration: on a support S the equilibrium
// conditions (Wx)_i = ln(W_ii/c_i) are linear.
inline bool nash_support_enumeration(const GameModel& model, Vec& out) {
    const int n = model.n();
    if (n > 12) return false;
    Vec b(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        b[static_cast<std::size_t>(i)] = std::log(model.influence(i, i) / model.unit_cost(i));
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> sup;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) sup.push_back(i);
        Vec x(static_cast<std::size_t>(n), 0.0);
        if (!sup.empty()) {
            std::vector<Vec> a(sup.size(), Vec(sup.size()));
            Vec rhs(sup.size());
            for (std::size_t p = 0; p < sup.size(); ++p) {
                rhs[p] = b[static_cast<std::size_t>(sup[p])];
                for (std::size_t q = 0; q < sup.size(); ++q) a[p][q] = model.influence(sup[p], sup[q]);
            }
            Vec xs;
            try {
                xs = solve_linear(a, rhs);
            } catch (const SolverFailure&) {
                continue;
            }
            bool pos = true;
            for (double v : xs) pos = pos && v > 0.0;
            if (!pos) continue;
            for (std::size_t p = 0; p < sup.size(); ++p) x[static_cast<std::size_t>(sup[p])] = xs[p];
        }
        bool ok = true;
        for (int k = 0; k < n && ok; ++k) {
            if (mask & (1u << k)) continue;
            double wx = risk_exponent(model, k, x);
            ok = wx >= b[static_cast<std::size_t>(k)] - 1e-12;
        }
        if (ok) {
            out = x;
            return true;
        }
    }
    return false;
}

}  // namespace detail

inline InvestmentProfile nash_equilibrium(const GameModel& model) {
    const int n = model.n();
    Vec x(static_cast<std::size_t>(n), 0.0);
    switch (model.family()) {
        case Family::SelfDependence: {
            const auto& m = model.as_self_dependence();
            x.assign(static_cast<std::size_t>(n), std::log(m.a / m.c) / (m.a + m.n - 1));
            return x;
        }
        case Family::Dominant: {
            const auto& m = model.as_dominant();
            x[0] = std::log(m.a / m.c) / m.a;
            return x;
        }
        case Family::WeakestLink: {
            const auto& m = model.as_weakest_link();
            double level = (1.0 / m.rho - 1.0) * std::log(static_cast<double>(m.n)) - std::log(m.c);
            x.assign(static_cast<std::size_t>(n), std::max(0.0, level));
            return x;
        }
        case Family::Star:
            if (model.as_star().risk == RiskKind::Reciprocal) {
                const auto& m = model.as_star();
                const double target = 1.0 / std::sqrt(m.c);
                for (int sweep = 0; sweep < 20000; ++sweep) {
                    double delta = 0.0;
                    double others = std::accumulate(x.begin() + 1, x.end(), 0.0);
                    double nb = std::max(0.0, target - others);
                    delta = std::max(delta, std::abs(nb - x[0]));
                    x[0] = nb;
                    for (int j = 1; j < n; ++j) {
                        double nl = std::max(0.0, target - x[0]);
                        delta = std::max(delta, std::abs(nl - x[static_cast<std::size_t>(j)]));
                        x[static_cast<std::size_t>(j)] = nl;
                    }
                    if (delta < 1e-13) return x;
                }
                throw SolverFailure("best-response iteration did not settle", 0.0);
            }
            [[fallthrough]];
        case Family::TwoClass:
        case Family::GeneralWte: {
            for (int sweep = 0; sweep < 20000; ++sweep)
                if (detail::best_response_sweep(model, x) < 1e-13) return x;
            if (detail::nash_support_enumeration(model, x)) return x;
            throw SolverFailure("best-response iteration cycled and support enumeration found no equilibrium",
                                0.0);
        }
    }
    return x;
}

struct ExitEquilibrium {
    int outlier = 0;
    InvestmentProfile profile;
    bool outlier_invests = false;
    bool participants_invest = false;
    std::string case_label;
};

namespace detail {

// First-order consistency of a candidate exit equilibrium: the outlier's own
// optimality and the participants' group optimality, both with complementary
// slackness at zero coordinates.
inline bool exit_candidate_consistent(const GameModel& model, int outlier, const Vec& x,
                                      double tol = 1e-6) {
    const int n = model.n();
    double own = risk_partial(model, outlier, outlier, x) + model.unit_cost(outlier);
    if (x[static_cast<std::size_t>(outlier)] > kSupportTol ? std::abs(own) > tol : own < -tol) return false;
    for (int k = 0; k < n; ++k) {
        if (k == outlier) continue;
        double d = model.unit_cost(k);
        for (int j = 0; j < n; ++j)
            if (j != outlier) d += risk_partial(model, j, k, x);
        if (x[static_cast<std::size_t>(k)] > kSupportTol ? std::abs(d) > tol : d < -tol) return false;
    }
    return true;
}

inline void dedupe_equilibria(std::vector<ExitEquilibrium>& ees) {
    std::vector<ExitEquilibrium> out;
    for (auto& e : ees) {
        bool dup = false;
        for (const auto& kept : out) {
            double diff = 0.0;
            for (std::size_t i = 0; i < e.profile.size(); ++i)
                diff = std::max(diff, std::abs(e.profile[i] - kept.profile[i]));
            if (diff < 1e-9) {
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(std::move(e));
    }
    ees = std::move(out);
}

inline ExitEquilibrium make_ee(int n, int outlier, double x_out, double y_others,
                               const std::string& label) {
    ExitEquilibrium e;
    e.outlier = outlier;
    e.profile.assign(static_cast<std::size_t>(n), y_others);
    e.profile[static_cast<std::size_t>(outlier)] = x_out;
    e.outlier_invests = x_out > kSupportTol;
    e.participants_invest = y_others > kSupportTol;
    e.case_label = label;
    return e;
}

inline std::vector<ExitEquilibrium> exit_self_dependence(const GameModel& model, int outlier) {
    const auto& m = model.as_self_dependence();
    const double L1 = std::log(m.a / m.c);
    const double L2 = std::log((m.a + m.n - 2) / m.c);
    const double D = L2 - L1;  // ln(1 + (n-2)/a)
    std::vector<ExitEquilibrium> ees;

    // outlier free-rides
    if ((m.n - 1) * D >= (m.a - 1) * L1) {
        double y = L2 / (m.a + m.n - 2);
        ees.push_back(make_ee(m.n, outlier, 0.0, y, m.a >= 1.0 ? "alpha" : "gamma"));
    }
    // participants free-ride (possible only for a < 1)
    if (m.a * D <= (1.0 - m.a) * L1)
        ees.push_back(make_ee(m.n, outlier, L1 / m.a, 0.0, "omega"));
    // both sides invest
    bool interior = m.a > 1.0 ? (m.n - 1) * D <= (m.a - 1) * L1 : m.a * D <= (1.0 - m.a) * L1;
    if (interior && m.a != 1.0) {
        double det = (m.a - 1.0) * (m.a + m.n - 1);
        double x = (L1 * (m.a + m.n - 2) - (m.n - 1) * L2) / det;
        double y = (m.a * L2 - L1) / det;
        if (x >= -1e-12 && y >= -1e-12)
            ees.push_back(make_ee(m.n, outlier, std::max(0.0, x), std::max(0.0, y),
                                  m.a > 1.0 ? "beta" : "zeta"));
    }
    dedupe_equilibria(ees);
    return ees;
}

inline std::vector<ExitEquilibrium> exit_dominant(const GameModel& model, int outlier) {
    const auto& m = model.as_dominant();
    std::vector<ExitEquilibrium> ees;
    if (outlier == 0) {
        if (m.a <= m.n - 1) {  // enough co-dependence: the dominant user free-rides
            double y = std::log((m.n - 1) / m.c) / (m.n - 1);
            ees.push_back(make_ee(m.n, 0, 0.0, y, "dominant-alpha"));
        }
        if (m.a >= m.n - 1)
            ees.push_back(make_ee(m.n, 0, std::log(m.a / m.c) / m.a, 0.0, "dominant-beta"));
    } else {
        ExitEquilibrium e = make_ee(m.n, outlier, 0.0, 0.0, "");
        e.profile[0] = std::log(m.a * (m.n - 1) / m.c) / m.a;
        e.participants_invest = true;
        ees.push_back(e);
    }
    dedupe_equilibria(ees);
    return ees;
}

inline std::vector<ExitEquilibrium> exit_star(const GameModel& model, int outlier) {
    const auto& m = model.as_star();
    const bool expo = m.risk == RiskKind::Exponential;
    ExitEquilibrium e = make_ee(m.n, outlier, 0.0, 0.0, outlier == 0 ? "star-root-exit" : "star-leaf-exit");
    if (outlier == 0) {
        double hub = expo ? std::log(1.0 / m.c) : 1.0 / std::sqrt(m.c);
        e.profile[0] = std::max(0.0, hub);
        e.outlier_invests = e.profile[0] > kSupportTol;
    } else {
        e.profile[0] = expo ? std::log((m.n - 1) / m.c) : std::sqrt((m.n - 1) / m.c);
        e.participants_invest = e.profile[0] > kSupportTol;
    }
    return {e};
}

inline std::vector<ExitEquilibrium> exit_weakest_link(const GameModel& model, int outlier) {
    const auto& m = model.as_weakest_link();
    const int n = m.n;
    const double rho = m.rho;
    const double lnc = std::log(m.c);
    const double lnm1 = std::log(static_cast<double>(n - 1));
    auto lse2 = [](double u, double v) {
        double hi = std::max(u, v);
        return hi + std::log(std::exp(u - hi) + std::exp(v - hi));
    };
    std::vector<ExitEquilibrium> ees;

    // outlier at zero, participants interior
    {
        auto h = [&](double y) { return lnm1 - rho * y + (1.0 / rho - 1.0) * lse2(0.0, lnm1 - rho * y) - lnc; };
        if (h(0.0) >= 0.0) {
            double y = h(0.0) == 0.0 ? 0.0 : bisect_decreasing(h, 0.0, 1.0);
            double own = (1.0 / rho - 1.0) * lse2(0.0, lnm1 - rho * y);  // log slope of own risk at 0
            if (own <= lnc + 1e-12) ees.push_back(make_ee(n, outlier, 0.0, y, "wl-outlier-free-rides"));
        }
    }
    // everyone at zero
    {
        double slope = (1.0 / rho - 1.0) * std::log(static_cast<double>(n));  // log of e^0 * S^(1/rho-1)
        if (slope <= lnc + 1e-12 && lnm1 + slope <= lnc + 1e-12)
            ees.push_back(make_ee(n, outlier, 0.0, 0.0, "wl-all-zero"));
    }
    // participants at zero, outlier interior
    {
        auto r = [&](double x) { return -rho * x + (1.0 / rho - 1.0) * lse2(-rho * x, lnm1) - lnc; };
        if (r(0.0) >= 0.0) {
            double x = r(0.0) == 0.0 ? 0.0 : bisect_decreasing(r, 0.0, 1.0);
            double group = lnm1 + (1.0 / rho - 1.0) * lse2(-rho * x, lnm1);
            if (group <= lnc + 1e-12) ees.push_back(make_ee(n, outlier, x, 0.0, "wl-participants-free-ride"));
        }
    }
    // both interior: exp(-rho x_i) = 2 exp(-rho x_j) / 2 ... closed forms
    {
        double xi = ((1.0 - rho) * std::log(2.0)) / rho - lnc;
        double xj = xi + lnm1 / rho;
        if (xi >= -1e-12 && xj >= -1e-12) {
            ExitEquilibrium e = make_ee(n, outlier, std::max(0.0, xi), std::max(0.0, xj), "wl-interior");
            ees.push_back(e);
        }
    }
    std::vector<ExitEquilibrium> kept;
    for (auto& e : ees)
        if (exit_candidate_consistent(model, outlier, e.profile)) kept.push_back(std::move(e));
    dedupe_equilibria(kept);
    return kept;
}

inline std::vector<ExitEquilibrium> exit_two_class(const GameModel& model, int outlier) {
    const auto& m = model.as_two_class();
    const int n = m.n1 + m.n2;
    std::vector<ExitEquilibrium> ees;
    auto build = [&](double x_out, double y1, const std::string& label) {
        ExitEquilibrium e;
        e.outlier = outlier;
        e.profile.assign(static_cast<std::size_t>(n), 0.0);
        for (int j = 0; j < m.n1; ++j)
            if (j != outlier) e.profile[static_cast<std::size_t>(j)] = y1;
        e.profile[static_cast<std::size_t>(outlier)] = x_out;
        e.outlier_invests = x_out > kSupportTol;
        e.participants_invest = y1 > kSupportTol;
        e.case_label = label;
        return e;
    };

    if (outlier < m.n1) {
        const double L = std::log(m.a1 / m.c);
        const double k = m.a1 + m.n1 - 2;
        // outlier free-rides iff the remaining investors' level already covers it
        double cond = k * std::exp((m.a1 - 1.0) / (m.n1 - 1.0) * std::log(m.c / m.a1)) + m.n2;
        if (cond >= m.a1 - 1e-12) {
            auto h = [&](double y) {
                return k * std::exp(-k * y) + m.n2 * std::exp(-(m.n1 - 1.0) * y) - m.c;
            };
            double y1 = bisect_decreasing(h, 0.0, 1.0);
            ees.push_back(build(0.0, y1, "n1-exit-free-ride"));
        }
        if (cond <= m.a1 + 1e-12) {
            auto g = [&](double x) {
                double y1 = (L - m.a1 * x) / (m.n1 - 1.0);
                return k * std::exp(-x - k * y1) + m.n2 * std::exp(-x - (m.n1 - 1.0) * y1) - m.c;
            };
            // g is increasing in x; g(0) <= 0 here and g(L/a1) > 0 always
            double x = bisect([&](double t) { return -g(t); }, 0.0, L / m.a1);
            double y1 = (L - m.a1 * x) / (m.n1 - 1.0);
            ees.push_back(build(std::max(0.0, x), std::max(0.0, y1), "n1-exit-interior"));
        }
    } else {
        const double L2 = std::log(m.a2 / m.c);
        const double k1 = m.a1 + m.n1 - 1;
        // free-riding outlier: always a candidate
        {
            auto h = [&](double y) {
                return k1 * std::exp(-k1 * y) + (m.n2 - 1.0) * std::exp(-m.n1 * y) - m.c;
            };
            double y1 = bisect_decreasing(h, 0.0, 1.0);
            ees.push_back(build(0.0, y1, "n2-exit-free-ride"));
        }
        // outlier invests alone
        if (std::log((m.a1 + n - 2) / m.c) <= L2 / m.a2 + 1e-12)
            ees.push_back(build(L2 / m.a2, 0.0, "n2-exit-sole-investor"));
        // both the outlier and the n1 class invest: scan for roots, the lhs
        // need not be monotone in x
        {
            auto g = [&](double x) {
                double y1 = (L2 - m.a2 * x) / m.n1;
                return k1 * std::exp(-x - k1 * y1) + (m.n2 - 1.0) * std::exp(-x - m.n1 * y1) - m.c;
            };
            const double xmax = L2 / m.a2;
            const int cells = 256;
            double prev = g(1e-12);
            for (int s = 1; s <= cells; ++s) {
                double xr = xmax * s / cells;
                double cur = g(xr);
                if ((prev <= 0.0) != (cur <= 0.0)) {
                    double x = bisect(g, xmax * (s - 1) / cells, xr);
                    double y1 = (L2 - m.a2 * x) / m.n1;
                    if (x > kSupportTol && y1 > kSupportTol)
                        ees.push_back(build(x, y1, "n2-exit-interior"));
                }
                prev = cur;
            }
        }
    }
    std::vector<ExitEquilibrium> kept;
    for (auto& e : ees)
        if (exit_candidate_consistent(model, outlier, e.profile)) kept.push_back(std::move(e));
    dedupe_equilibria(kept);
    return kept;
}

inline std::vector<ExitEquilibrium> exit_general_wte(const GameModel& model, int outlier) {
    const int n = model.n();
    Vec x = social_optimum(model).x;
    WteSubproblem part;
    part.model = &model;
    for (int j = 0; j < n; ++j)
        if (j != outlier) {
            part.rows.push_back(j);
            part.free_idx.push_back(j);
        }
    const double wii = model.influence(outlier, outlier);
    const double b = std::log(wii / model.unit_cost(outlier));
    for (int it = 0; it < 300; ++it) {
        double cross = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != outlier) cross += model.influence(outlier, j) * x[static_cast<std::size_t>(j)];
        double nb = std::max(0.0, (b - cross) / wii);
        double delta = std::abs(nb - x[static_cast<std::size_t>(outlier)]);
        x[static_cast<std::size_t>(outlier)] = nb;
        Vec next = wte_solve(part, x);
        for (int j = 0; j < n; ++j)
            if (j != outlier)
                delta = std::max(delta, std::abs(next[static_cast<std::size_t>(j)] -
                                                 x[static_cast<std::size_t>(j)]));
        x = std::move(next);
        if (delta < 1e-12) {
            if (!exit_candidate_consistent(model, outlier, x))
                throw SolverFailure("exit equilibrium fixed point inconsistent", delta);
            ExitEquilibrium e;
            e.outlier = outlier;
            e.profile = x;
            e.outlier_invests = x[static_cast<std::size_t>(outlier)] > kSupportTol;
            for (int j = 0; j < n; ++j)
                if (j != outlier && x[static_cast<std::size_t>(j)] > kSupportTol) e.participants_invest = true;
            e.case_label = "wte-exit";
            return {e};
        }
    }
    throw SolverFailure("exit equilibrium iteration did not converge", 0.0);
}

}  // namespace detail

// All exit equilibria for one deviating user, in deterministic order with the
// outlier-invests patterns last. Several can coexist; all are returned.
inline std::vector<ExitEquilibrium> exit_equilibria(const GameModel& model, int outlier) {
    require(outlier >= 0 && outlier < model.n(), "exit_equilibria: outlier index out of range");
    std::vector<ExitEquilibrium> ees;
    switch (model.family()) {
        case Family::SelfDependence: ees = detail::exit_self_dependence(model, outlier); break;
        case Family::TwoClass: ees = detail::exit_two_class(model, outlier); break;
        case Family::Dominant: ees = detail::exit_dominant(model, outlier); break;
        case Family::Star: ees = detail::exit_star(model, outlier); break;
        case Family::WeakestLink: ees = detail::exit_weakest_link(model, outlier); break;
        case Family::GeneralWte: ees = detail::exit_general_wte(model, outlier); break;
    }
    if (ees.empty())
        throw SolverFailure("no exit equilibrium found for " + model.describe(), 0.0);
    return ees;
}

struct GridSearchResult {
    InvestmentProfile x;
    double value = 0.0;
    double cell = 0.0;  // grid spacing; oracle resolution
};

// Exhaustive minimizer of the social cost on [0, bound]^n. Test oracle; n <= 4.
// Deterministic for any thread count: ties break toward the lowest grid index.
inline GridSearchResult brute_force_social_optimum(const GameModel& model, double bound, int steps,
                                                   int threads = 1) {
    const int n = model.n();
    require(n <= 4, "grid oracle: n <= 4 required");
    require(steps >= 50, "grid oracle: at least 50 steps per axis required");
    require(bound > 0, "grid oracle: bound must be positive");
    const double cell = bound / (steps - 1);
    long long total = 1;
    for (int d = 0; d < n; ++d) total *= steps;

    struct Best {
        double value = std::numeric_limits<double>::infinity();
        long long idx = -1;
    };
    auto scan = [&](long long lo, long long hi) {
        Best best;
        Vec x(static_cast<std::size_t>(n), 0.0);
        for (long long idx = lo; idx < hi; ++idx) {
            long long rem = idx;
            for (int d = 0; d < n; ++d) {
                x[static_cast<std::size_t>(d)] = cell * static_cast<double>(rem % steps);
                rem /= steps;
            }
            double v = social_cost(model, x);
            if (v < best.value) {
                best.value = v;
                best.idx = idx;
            }
        }
        return best;
    };

    Best best;
    if (threads <= 1) {
        best = scan(0, total);
    } else {
        std::vector<Best> partial(static_cast<std::size_t>(threads));
        std::vector<std::thread> pool;
        long long chunk = (total + threads - 1) / threads;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                long long lo = t * chunk;
                long long hi = std::min(total, lo + chunk);
                if (lo < hi) partial[static_cast<std::size_t>(t)] = scan(lo, hi);
            });
        for (auto& th : pool) th.join();
        for (const auto& b : partial)
            if (b.idx >= 0 && (b.value < best.value || (b.value == best.value && b.idx < best.idx)))
                best = b;
    }

    GridSearchResult res;
    res.x.assign(static_cast<std::size_t>(n), 0.0);
    long long rem = best.idx;
    for (int d = 0; d < n; ++d) {
        res.x[static_cast<std::size_t>(d)] = cell * static_cast<double>(rem % steps);
        rem /= steps;
    }
    res.value = best.value;
    res.cell = cell;
    return res;
}

}  // namespace secgame
