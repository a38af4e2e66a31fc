#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace secgame;
using Catch::Approx;

namespace {

std::vector<CaseLabel> labels_of(const std::vector<RegimeVerdict>& vs) {
    std::vector<CaseLabel> out;
    for (const auto& v : vs) out.push_back(v.label);
    return out;
}

}  // namespace

TEST_CASE("self-dependence regimes") {
    CHECK(labels_of(classify_self_dependence(10, 6, 1)) == std::vector<CaseLabel>{CaseLabel::Beta});
    CHECK(labels_of(classify_self_dependence(2, 6, 1.9)) == std::vector<CaseLabel>{CaseLabel::Alpha});
    CHECK(labels_of(classify_self_dependence(0.5, 6, 0.1)) == std::vector<CaseLabel>{CaseLabel::Gamma});
    CHECK(labels_of(classify_self_dependence(0.5, 3, 0.01)) ==
          std::vector<CaseLabel>{CaseLabel::Gamma, CaseLabel::Omega, CaseLabel::Zeta});

    auto multi = classify_self_dependence(0.5, 3, 0.01);
    CHECK(multi[1].shares_condition);
    CHECK(multi[2].shares_condition);
    for (const auto& v : classify_self_dependence(2, 6, 1.9)) {
        CHECK(v.vp_externality == Guarantee::Never);
        CHECK(v.bb_pivotal == Guarantee::Never);
    }
    for (std::size_t k = 1; k < multi.size(); ++k) {
        CHECK(multi[k].vp_externality == Guarantee::Always);
        CHECK(multi[k].bb_pivotal == Guarantee::Always);
    }
    CHECK_THROWS_AS(classify_self_dependence(1.5, 6, 1.6), std::invalid_argument);
    CHECK_THROWS_AS(classify_self_dependence(10, 2, 1), std::invalid_argument);
}

TEST_CASE("dominant regimes split at a = n-1") {
    CHECK(classify_dominant(5, 10, 0.45).label == CaseLabel::DominantAlpha);
    CHECK(classify_dominant(12, 10, 0.45).label == CaseLabel::DominantBeta);
    CHECK(classify_dominant(9, 10, 0.45).label == CaseLabel::DominantBeta);  // tie goes to beta
    CHECK(classify_dominant(5, 10, 0.45).vp_externality == Guarantee::Never);
    CHECK(classify_dominant(5, 10, 0.45).bb_pivotal == Guarantee::Never);
    CHECK_THROWS_AS(classify_dominant(0.9, 10, 0.45), std::invalid_argument);
}

TEST_CASE("two-class exit-pattern conditions") {
    auto f1 = two_class_exit_conditions(4, 0.1, 8, 2, 0.05);
    CHECK(f1.reliant_invests);       // 240 <= 2^10
    CHECK(f1.reliant_free_rides);
    CHECK_FALSE(f1.self_dependent_free_rides);

    auto f2 = two_class_exit_conditions(4, 0.9, 8, 2, 0.05);
    CHECK_FALSE(f2.reliant_invests);  // 240 > 18^(1/0.9)

    auto f3 = two_class_exit_conditions(2, 0.1, 8, 2, 0.05);
    CHECK(f3.self_dependent_free_rides);  // 8 * 0.025^(1/7) + 2 >= 2
    CHECK(f3.self_dependent_cond.lhs_log == Approx(6.723068822199973).margin(1e-9));
}

TEST_CASE("star topology tax caps") {
    auto rep = star_impossibility(10, 1, RiskKind::Exponential);
    CHECK(rep.cap_sum == Approx(-1.302585092994046).margin(1e-9));
    CHECK(rep.cap_sum == Approx(1.0 * (1.0 - std::log(10.0))).margin(1e-12));
    CHECK(rep.impossible);
    CHECK_FALSE(rep.degenerate_topology);
    CHECK(rep.per_user_tax_cap[0] == Approx(-1.402585092994046).margin(1e-9));
    CHECK(rep.per_user_tax_cap[5] == Approx(1.0 / 9 - 0.1).margin(1e-12));

    auto tiny = star_impossibility(2, 1, RiskKind::Exponential);
    CHECK(tiny.cap_sum == Approx(0.3068528194400547).margin(1e-9));
    CHECK_FALSE(tiny.impossible);
    CHECK(tiny.degenerate_topology);

    auto rec = star_impossibility(10, 1, RiskKind::Reciprocal);
    CHECK(rec.cap_sum < 0.0);
    CHECK(rec.cap_sum == Approx(2.0 + 3.0 - 2.0 * std::sqrt(10.0)).margin(1e-9));
}

TEST_CASE("weakest-link tax caps and the benign regime") {
    auto rep = weakest_link_impossibility(4, 1, 1);
    CHECK(rep.cap_sum == Approx(-1.5451774444795623).margin(1e-9));
    CHECK(rep.impossible);
    CHECK_FALSE(rep.footnote_regime);

    auto benign = weakest_link_impossibility(2, 1, 0.5);
    CHECK(benign.cap_sum == Approx(0.3068528194400547).margin(1e-9));
    CHECK_FALSE(benign.impossible);
    CHECK(benign.footnote_regime);
    CHECK(benign.externality_achieves_bb_vp);
}

TEST_CASE("weakest-link cap sum flips sign exactly at the threshold") {
    for (double rho : {0.5, 1.0, 2.0}) {
        double threshold = std::exp(rho) * std::pow(2.0, 1.0 - rho);
        CHECK(std::abs(weakest_link_impossibility(threshold, rho, 0.8).cap_sum) <= 1e-9);
        CHECK(weakest_link_impossibility(threshold * (1 - 1e-3), rho, 0.8).cap_sum > 0.0);
        CHECK(weakest_link_impossibility(threshold * (1 + 1e-3), rho, 0.8).cap_sum < 0.0);
    }
}

TEST_CASE("price of anarchy on the reference instances") {
    CHECK(price_of_anarchy(GameModel::self_dependence(10, 6, 1)) ==
          Approx(1.0254945016288441).epsilon(1e-10));
    CHECK(price_of_anarchy(GameModel::dominant(5, 10, 0.45)) ==
          Approx(2.172818299545363).epsilon(1e-10));
    // no externalities: equilibrium and optimum coincide
    auto solo = GameModel::general_wte({{2.0, 0.0}, {0.0, 1.5}}, {0.5, 0.4});
    CHECK(price_of_anarchy(solo) == Approx(1.0).margin(1e-12));
}

TEST_CASE("classified verdicts match the numerically computed ones") {
    std::mt19937_64 rng(2024);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        GameModel m = testhelpers::random_self_dependence(rng, trial % 5 != 0);
        const auto& p = m.as_self_dependence();
        auto so = social_optimum(m);
        auto cases = classify_self_dependence(p.a, p.n, p.c);
        auto ees = exit_equilibria(m, 0);
        for (const auto& verdict : cases) {
            const ExitEquilibrium* ee = nullptr;
            for (const auto& e : ees)
                if (e.case_label == to_string(verdict.label)) ee = &e;
            REQUIRE(ee != nullptr);
            // budget of the per-case pivotal taxes: all outliers are symmetric
            double t = pivotal_tax_against(m, so.x, 0, *ee);
            bool bb = p.n * t >= -1e-9;
            bool vp = user_cost(m, 0, so.x) <= user_cost(m, 0, ee->profile) + 1e-9;  // taxes are zero
            CHECK(bb == (verdict.bb_pivotal == Guarantee::Always));
            CHECK(vp == (verdict.vp_externality == Guarantee::Always));
            ++checked;
        }
    }
    CHECK(checked >= 200);
}

TEST_CASE("dominant verdicts are never/never on random instances") {
    std::mt19937_64 rng(2025);
    for (int trial = 0; trial < 50; ++trial) {
        GameModel m = testhelpers::random_dominant(rng);
        auto piv = pivotal_taxes(m);
        CHECK(piv.budget < -1e-9);
        auto ext = externality_equilibrium_taxes(m, social_optimum(m).x);
        CHECK_FALSE(ext.vp[1]);  // a non-dominant user never wants to stay
    }
}
