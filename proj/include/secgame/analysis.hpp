#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mechanisms.hpp"
#include "model.hpp"
#include "solver.hpp"

namespace secgame {

enum class CaseLabel { Alpha, Beta, Gamma, Omega, Zeta, DominantAlpha, DominantBeta };

inline std::string to_string(CaseLabel c) {
    switch (c) {
        case CaseLabel::Alpha: return "alpha";
        case CaseLabel::Beta: return "beta";
        case CaseLabel::Gamma: return "gamma";
        case CaseLabel::Omega: return "omega";
        case CaseLabel::Zeta: return "zeta";
        case CaseLabel::DominantAlpha: return "dominant-alpha";
        case CaseLabel::DominantBeta: return "dominant-beta";
    }
    return "?";
}

enum class Guarantee { Always, Never };

struct ConditionEval {
    std::string desc;
    double lhs_log = 0.0;
    double rhs_log = 0.0;
    bool holds = false;
};

struct RegimeVerdict {
    CaseLabel label;
    std::vector<ConditionEval> conditions;
    Guarantee vp_externality = Guarantee::Never;
    Guarantee bb_pivotal = Guarantee::Never;
    // omega and zeta are gated by one shared parameter condition; both are
    // reported when it holds and this flag marks the duplication.
    bool shares_condition = false;
};

// Which exit-equilibrium cases the parameters admit, each with its VP/BB
// verdict. All comparisons in log space: a/c can be enormous.
inline std::vector<RegimeVerdict> classify_self_dependence(double a, int n, double c) {
    require(n >= 3, "classify_self_dependence: n >= 3 required");
    require(c > 0 && c < a, "classify_self_dependence: 0 < c < a required");
    const double L1 = std::log(a / c);
    const double D = std::log1p((n - 2) / a);
    std::vector<RegimeVerdict> cases;
    if (a >= 1.0) {
        ConditionEval outlier_freerides{"(n-1)ln(1+(n-2)/a) >= (a-1)ln(a/c)", (n - 1) * D, (a - 1) * L1,
                                        (n - 1) * D >= (a - 1) * L1};
        ConditionEval both_invest{"(n-1)ln(1+(n-2)/a) <= (a-1)ln(a/c)", (n - 1) * D, (a - 1) * L1,
                                  (n - 1) * D <= (a - 1) * L1};
        if (outlier_freerides.holds)
            cases.push_back({CaseLabel::Alpha, {outlier_freerides}, Guarantee::Never, Guarantee::Never, false});
        if (both_invest.holds)
            cases.push_back({CaseLabel::Beta, {both_invest}, Guarantee::Never, Guarantee::Never, false});
    } else {
        cases.push_back({CaseLabel::Gamma,
                         {{"a < 1 (outlier always free-rides on the remaining investors)", a, 1.0, true}},
                         Guarantee::Never,
                         Guarantee::Never,
                         false});
        ConditionEval favor_exchange{"a ln(1+(n-2)/a) <= (1-a)ln(a/c)", a * D, (1.0 - a) * L1,
                                     a * D <= (1.0 - a) * L1};
        if (favor_exchange.holds) {
            cases.push_back({CaseLabel::Omega, {favor_exchange}, Guarantee::Always, Guarantee::Always, true});
            cases.push_back({CaseLabel::Zeta, {favor_exchange}, Guarantee::Always, Guarantee::Always, true});
        }
    }
    return cases;
}

inline RegimeVerdict classify_dominant(double a, int n, double c) {
    require(n >= 3, "classify_dominant: n >= 3 required");
    require(c > 0 && c < 1.0 && a > 1.0, "classify_dominant: c < 1 < a required");
    ConditionEval cond{"a < n-1 (dominant user free-rides when it exits)", a, static_cast<double>(n - 1),
                       a < n - 1};
    RegimeVerdict v;
    v.label = cond.holds ? CaseLabel::DominantAlpha : CaseLabel::DominantBeta;  // tie -> beta
    v.conditions = {cond};
    v.vp_externality = Guarantee::Never;
    v.bb_pivotal = Guarantee::Never;
    return v;
}

struct TwoClassEeFlags {
    bool reliant_invests = false;          // a reliant outlier carries the system alone
    bool self_dependent_free_rides = false;  // a self-dependent outlier can free-ride
    bool reliant_free_rides = true;          // always available
    ConditionEval reliant_invests_cond;
    ConditionEval self_dependent_cond;
};

inline TwoClassEeFlags two_class_exit_conditions(double a1, double a2, int n1, int n2, double c) {
    require(n1 >= 2 && n2 >= 1, "two_class_exit_conditions: n1 >= 2 and n2 >= 1 required");
    require(c > 0 && c < a2 && a2 < 1.0 && 1.0 < a1, "two_class_exit_conditions: c < a2 < 1 < a1 required");
    const int n = n1 + n2;
    TwoClassEeFlags flags;
    flags.reliant_invests_cond = {"ln((a1+n-2)/c) <= (1/a2)ln(a2/c)", std::log((a1 + n - 2) / c),
                                  std::log(a2 / c) / a2, false};
    flags.reliant_invests_cond.holds =
        flags.reliant_invests_cond.lhs_log <= flags.reliant_invests_cond.rhs_log;
    flags.reliant_invests = flags.reliant_invests_cond.holds;

    double lhs = (a1 + n1 - 2) * std::exp((a1 - 1.0) / (n1 - 1.0) * std::log(c / a1)) + n2;
    flags.self_dependent_cond = {"(a1+n1-2)(c/a1)^((a1-1)/(n1-1)) + n2 >= a1", lhs, a1, lhs >= a1};
    flags.self_dependent_free_rides = flags.self_dependent_cond.holds;
    return flags;
}

struct ImpossibilityReport {
    std::string model;
    Vec per_user_tax_cap;  // largest tax each user tolerates before opting out
    double cap_sum = 0.0;
    bool impossible = false;          // cap_sum < 0: no mechanism can hold VP and BB at once
    bool degenerate_topology = false;  // star with n = 2
    bool footnote_regime = false;      // weakest link with n <= e^rho 2^(1-rho)
    bool externality_achieves_bb_vp = false;  // verified numerically in the footnote regime
};

// VP tax caps on the hub-and-leaves graph, from the closed-form optimum and
// the two exit patterns. For exponential risk the sum collapses to c(1 - ln n).
inline ImpossibilityReport star_impossibility(int n, double c, RiskKind kind) {
    require(n >= 2, "star_impossibility: n >= 2 required");
    require(c > 0, "star_impossibility: c > 0 required");
    if (kind == RiskKind::Exponential) require(c <= 1.0, "star_impossibility: c <= 1 required for exponential risk");
    const bool expo = kind == RiskKind::Exponential;
    auto f = [&](double z) { return expo ? std::exp(-z) : 1.0 / z; };
    double hub_opt = expo ? std::log(n / c) : std::sqrt(n / c);
    double hub_self = expo ? std::log(1.0 / c) : std::sqrt(1.0 / c);
    double hub_leaf_exit = expo ? std::log((n - 1) / c) : std::sqrt((n - 1) / c);

    ImpossibilityReport rep;
    rep.model = "star(n=" + std::to_string(n) + ", c=" + std::to_string(c) + (expo ? ", exp)" : ", reciprocal)");
    rep.degenerate_topology = n == 2;
    rep.per_user_tax_cap.assign(static_cast<std::size_t>(n), 0.0);
    rep.per_user_tax_cap[0] = f(hub_self) - f(hub_opt) + c * (hub_self - hub_opt);
    for (int j = 1; j < n; ++j)
        rep.per_user_tax_cap[static_cast<std::size_t>(j)] = f(hub_leaf_exit) - f(hub_opt);
    rep.cap_sum = 0.0;
    for (double t : rep.per_user_tax_cap) rep.cap_sum += t;
    rep.impossible = rep.cap_sum < -kVerdictTol;
    return rep;
}

// Smooth weakest-link bound. n may be fractional so the sign flip at
// n = e^rho 2^(1-rho) can be probed exactly; the numeric cross-check of the
// benign regime needs an integer model.
inline ImpossibilityReport weakest_link_impossibility(double n, double rho, double c) {
    require(n >= 2.0 && rho > 0 && c > 0, "weakest_link_impossibility: n >= 2, rho > 0, c > 0 required");
    ImpossibilityReport rep;
    rep.model = "weakest-link(n=" + std::to_string(n) + ", rho=" + std::to_string(rho) +
                ", c=" + std::to_string(c) + ")";
    double cap = c * (1.0 + ((1.0 - rho) * std::log(2.0) - std::log(n)) / rho);
    rep.per_user_tax_cap.assign(static_cast<std::size_t>(std::llround(std::floor(n))), cap);
    rep.cap_sum = c * n * (1.0 + ((1.0 - rho) * std::log(2.0) - std::log(n)) / rho);
    rep.impossible = rep.cap_sum < -kVerdictTol;
    rep.footnote_regime = std::log(n) <= rho + (1.0 - rho) * std::log(2.0);
    if (rep.footnote_regime && std::abs(n - std::round(n)) < 1e-12 && n >= 2.0) {
        const auto ni = static_cast<int>(std::llround(n));
        GameModel model = GameModel::weakest_link(ni, rho, c);
        SocialOptimum so = social_optimum(model);
        MechanismReport ext = externality_equilibrium_taxes(model, so.x);
        bool all_vp = ext.budget_balanced;
        for (std::size_t i = 0; i < ext.vp_per_ee.size() && all_vp; ++i)
            for (bool v : ext.vp_per_ee[i]) all_vp = all_vp && v;
        rep.externality_achieves_bb_vp = all_vp;
    }
    return rep;
}

inline double price_of_anarchy(const GameModel& model) {
    InvestmentProfile ne = nash_equilibrium(model);
    SocialOptimum so = social_optimum(model);
    return social_cost(model, ne) / social_cost(model, so.x);
}

}  // namespace secgame
