#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "model.hpp"
#include "numeric.hpp"
#include "solver.hpp"

namespace secgame {

constexpr double kVerdictTol = 1e-9;  // VP / BB slack

// One participant's submission to the message game: a proposed investment
// profile for everyone plus a pricing profile.
struct Message {
    Vec proposal;  // chi
    Vec prices;    // pi
};

struct Outcome {
    InvestmentProfile x;
    TaxProfile taxes;
};

// Outcome function of the message game. Indices wrap cyclically, which is
// what makes the taxes sum to zero identically and needs at least 3 users.
inline Outcome externality_outcome(const std::vector<Message>& messages) {
    const std::size_t n = messages.size();
    require(n >= 3, "externality_outcome: at least 3 messages required (cyclic indexing)");
    for (const auto& m : messages) {
        require(m.proposal.size() == n && m.prices.size() == n, "externality_outcome: message dimension mismatch");
        for (double v : m.proposal) require(std::isfinite(v) && v >= 0.0, "externality_outcome: proposals must be finite and >= 0");
        for (double v : m.prices) require(std::isfinite(v) && v >= 0.0, "externality_outcome: prices must be finite and >= 0");
    }
    Outcome out;
    out.x.assign(n, 0.0);
    for (const auto& m : messages)
        for (std::size_t k = 0; k < n; ++k) out.x[k] += m.proposal[k] / static_cast<double>(n);

    auto quad = [&](std::size_t i) {  // (chi_i - chi_{i+1})' diag(pi_i) (chi_i - chi_{i+1})
        const auto& a = messages[i].proposal;
        const auto& b = messages[(i + 1) % n].proposal;
        const auto& p = messages[i].prices;
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += p[k] * (a[k] - b[k]) * (a[k] - b[k]);
        return s;
    };
    out.taxes.mechanism = Mechanism::Externality;
    out.taxes.t.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p1 = messages[(i + 1) % n].prices;
        const auto& p2 = messages[(i + 2) % n].prices;
        double lin = 0.0;
        for (std::size_t k = 0; k < n; ++k) lin += (p1[k] - p2[k]) * out.x[k];
        out.taxes.t[i] = lin + quad(i) - quad((i + 1) % n);
    }
    return out;
}

struct BudgetVerdict {
    bool balanced = false;
    double budget = 0.0;
};

inline BudgetVerdict check_bb(const TaxProfile& taxes) {
    double s = 0.0;
    for (double t : taxes.t) s += t;
    return BudgetVerdict{s >= -kVerdictTol, s};
}

// VP verdict of user i against one of its own exit equilibria.
inline bool vp_holds(const GameModel& model, const Vec& x_star, double tax_i, const ExitEquilibrium& ee) {
    return user_cost(model, ee.outlier, x_star) + tax_i <=
           user_cost(model, ee.outlier, ee.profile) + kVerdictTol;
}

// Per-user, per-exit-equilibrium voluntary participation verdicts for a given
// tax profile. ees[i] must hold user i's exit equilibria.
inline std::vector<std::vector<bool>> check_vp(const GameModel& model, const Vec& x_star,
                                               const TaxProfile& taxes,
                                               const std::vector<std::vector<ExitEquilibrium>>& ees) {
    const auto n = static_cast<std::size_t>(model.n());
    require(taxes.t.size() == n && ees.size() == n, "check_vp: dimension mismatch");
    std::vector<std::vector<bool>> verdicts(n);
    for (std::size_t i = 0; i < n; ++i) {
        verdicts[i].reserve(ees[i].size());
        for (const auto& e : ees[i]) verdicts[i].push_back(vp_holds(model, x_star, taxes.t[i], e));
    }
    return verdicts;
}

enum class EeSelection { FirstEnumerated, WorstForOutlier };

inline std::size_t select_exit_equilibrium(const GameModel& model,
                                           const std::vector<ExitEquilibrium>& ees,
                                           EeSelection policy) {
    if (policy == EeSelection::FirstEnumerated || ees.size() == 1) return 0;
    std::size_t pick = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < ees.size(); ++k) {
        double cost = user_cost(model, ees[k].outlier, ees[k].profile);
        if (cost > worst + 1e-15) {
            worst = cost;
            pick = k;
        }
    }
    return pick;
}

struct MechanismReport {
    TaxProfile taxes;
    double budget = 0.0;
    bool budget_balanced = false;
    std::vector<std::size_t> selected_ee;          // per user, index into its EE list
    Vec participation_benefit;                     // g_i(xhat^i) - g_i(x*) - t_i, selected EE
    std::vector<bool> vp;                          // against the selected EE
    std::vector<std::vector<bool>> vp_per_ee;      // against every enumerated EE
    std::vector<std::vector<ExitEquilibrium>> exit_sets;
};

// Tax charged to user i when its exit triggers `ee`: what everyone else loses
// by having i inside the mechanism instead of out.
inline double pivotal_tax_against(const GameModel& model, const Vec& x_star, int i,
                                  const ExitEquilibrium& ee) {
    const int n = model.n();
    double at_opt = 0.0;
    double at_exit = 0.0;
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        at_opt += user_cost(model, j, x_star);
        at_exit += user_cost(model, j, ee.profile);
    }
    return at_opt - at_exit;
}

namespace detail {

// Dominant-family pivotal taxes in closed form. Everyone shares the same
// reward for a non-dominant exit; the dominant user's reward depends on
// which side invests after it leaves.
inline Vec dominant_pivotal_taxes(const Dominant& m) {
    Vec t(static_cast<std::size_t>(m.n), (m.c / m.a) * (std::log(m.n / (m.n - 1.0)) - 1.0));
    if (m.a < m.n - 1)
        t[0] = (m.n - 1) * m.c / (m.a * m.n) - m.c * (1.0 + std::log((m.n - 1) / m.c));
    else
        t[0] = (m.n - 1) * (m.c / m.a) * (1.0 / m.n - 1.0);
    return t;
}

inline void fill_report_verdicts(const GameModel& model, const Vec& x_star, MechanismReport& rep,
                                 EeSelection policy) {
    const auto n = static_cast<std::size_t>(model.n());
    rep.selected_ee.assign(n, 0);
    rep.participation_benefit.assign(n, 0.0);
    rep.vp.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        rep.selected_ee[i] = select_exit_equilibrium(model, rep.exit_sets[i], policy);
        const auto& ee = rep.exit_sets[i][rep.selected_ee[i]];
        double inside = user_cost(model, static_cast<int>(i), x_star) + rep.taxes.t[i];
        double outside = user_cost(model, static_cast<int>(i), ee.profile);
        rep.participation_benefit[i] = outside - inside;
        rep.vp[i] = rep.participation_benefit[i] >= -kVerdictTol;
    }
    rep.vp_per_ee = check_vp(model, x_star, rep.taxes, rep.exit_sets);
    BudgetVerdict bb = check_bb(rep.taxes);
    rep.budget = bb.budget;
    rep.budget_balanced = bb.balanced;
}

}  // namespace detail

inline MechanismReport pivotal_taxes(const GameModel& model,
                                     EeSelection policy = EeSelection::FirstEnumerated) {
    const int n = model.n();
    SocialOptimum so = social_optimum(model);
    MechanismReport rep;
    rep.taxes.mechanism = Mechanism::Pivotal;
    rep.taxes.t.assign(static_cast<std::size_t>(n), 0.0);
    rep.exit_sets.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rep.exit_sets[static_cast<std::size_t>(i)] = exit_equilibria(model, i);

    if (model.family() == Family::Dominant) {
        rep.taxes.t = detail::dominant_pivotal_taxes(model.as_dominant());
    } else {
        for (int i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            std::size_t pick = select_exit_equilibrium(model, rep.exit_sets[ui], policy);
            rep.taxes.t[ui] = pivotal_tax_against(model, so.x, i, rep.exit_sets[ui][pick]);
        }
    }
    detail::fill_report_verdicts(model, so.x, rep, policy);
    return rep;
}

// Equilibrium taxes of the message game: each user pays the externality it
// receives, priced at the optimum; they sum to zero by construction.
inline TaxProfile externality_tax_profile(const GameModel& model, const Vec& x_star) {
    const int n = model.n();
    check_profile(x_star, static_cast<std::size_t>(n));
    KktCertificate cert = certify(model, x_star);
    require(cert.valid, "externality taxes: profile is not a certified social optimum");
    TaxProfile taxes;
    taxes.mechanism = Mechanism::Externality;
    taxes.t.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j)
            s -= x_star[static_cast<std::size_t>(j)] * risk_partial(model, i, j, x_star);
        taxes.t[static_cast<std::size_t>(i)] =
            s - model.unit_cost(i) * x_star[static_cast<std::size_t>(i)];
    }
    return taxes;
}

inline MechanismReport externality_equilibrium_taxes(const GameModel& model, const Vec& x_star,
                                                     EeSelection policy = EeSelection::FirstEnumerated) {
    const int n = model.n();
    MechanismReport rep;
    rep.taxes = externality_tax_profile(model, x_star);
    rep.exit_sets.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rep.exit_sets[static_cast<std::size_t>(i)] = exit_equilibria(model, i);
    detail::fill_report_verdicts(model, x_star, rep, policy);
    return rep;
}

}  // namespace secgame
