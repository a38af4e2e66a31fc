#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace secgame;
using Catch::Approx;

TEST_CASE("closed-form social optima") {
    auto sd = social_optimum(GameModel::self_dependence(10, 6, 1));
    for (double v : sd.x) CHECK(v == Approx(0.18053668007348067).epsilon(1e-12));
    CHECK(sd.kkt.valid);

    auto dom = social_optimum(GameModel::dominant(5, 10, 0.45));
    CHECK(dom.x[0] == Approx(0.9421061403291835).epsilon(1e-12));
    for (int j = 1; j < 10; ++j) CHECK(dom.x[static_cast<std::size_t>(j)] == 0.0);

    auto wl = social_optimum(GameModel::weakest_link(4, 1, 1));
    for (double v : wl.x) CHECK(v == Approx(1.3862943611198906).epsilon(1e-12));

    auto star = social_optimum(GameModel::star(10, 1, RiskKind::Exponential));
    CHECK(star.x[0] == Approx(std::log(10.0)).epsilon(1e-12));
}

TEST_CASE("two-class optimum from the monotone scalar equation") {
    auto so = social_optimum(GameModel::two_class(4, 0.1, 8, 2, 0.05));
    CHECK(so.x[0] == Approx(0.5510246757671151).epsilon(1e-8));
    CHECK(so.x[0] == Approx(0.551).margin(1e-3));
    for (int j = 8; j < 10; ++j) CHECK(so.x[static_cast<std::size_t>(j)] == 0.0);
    // the root satisfies the first-order condition to near machine precision
    double k1 = 4 + 8 - 1;
    double resid = k1 * std::exp(-k1 * so.x[0]) + 2 * std::exp(-8 * so.x[0]) - 0.05;
    CHECK(std::abs(resid) <= 1e-13);
}

TEST_CASE("general weighted-total-effort optimum carries a clean certificate") {
    std::vector<Vec> w{{2, 0.5, 0.3}, {0.4, 1.5, 0.2}, {0.1, 0.6, 1.8}};
    auto m = GameModel::general_wte(w, {0.5, 0.4, 0.6});
    auto so = social_optimum(m);
    CHECK(so.kkt.valid);
    CHECK(so.kkt.max_residual <= 1e-8);
    CHECK(so.kkt.max_slackness <= 1e-9);
    for (double lambda : so.kkt.multipliers) CHECK(lambda >= 0.0);
}

TEST_CASE("grid oracle agrees with the solver on every family") {
    struct Item {
        GameModel model;
        double bound;
    };
    std::vector<Item> items{
        {GameModel::self_dependence(10, 3, 1), 1.0},
        {GameModel::star(3, 1, RiskKind::Exponential), 2.0},
        {GameModel::weakest_link(3, 1, 1), 2.0},
    };
    for (const auto& it : items) {
        auto so = social_optimum(it.model);
        auto grid = brute_force_social_optimum(it.model, it.bound, 61);
        for (std::size_t k = 0; k < so.x.size(); ++k)
            CHECK(std::abs(so.x[k] - grid.x[k]) <= grid.cell + 1e-12);
        CHECK(social_cost(it.model, so.x) <= grid.value + 1e-12);
    }
}

TEST_CASE("grid oracle pins an unprofitable coordinate at zero") {
    // column 2 influence never reaches its unit cost, so user 2 free-rides
    std::vector<Vec> w{{2.0, 0.3, 0.2}, {0.3, 1.5, 0.2}, {0.2, 0.3, 0.1}};
    auto m = GameModel::general_wte(w, {0.5, 0.4, 0.6});
    auto grid = brute_force_social_optimum(m, 2.0, 51);
    CHECK(grid.x[2] == 0.0);
    CHECK(social_optimum(m).x[2] == 0.0);
}

TEST_CASE("grid oracle is deterministic across thread counts") {
    auto m = GameModel::self_dependence(10, 3, 1);
    auto a = brute_force_social_optimum(m, 1.0, 61, 1);
    auto b = brute_force_social_optimum(m, 1.0, 61, 4);
    CHECK(a.x == b.x);
    CHECK(a.value == b.value);
}

TEST_CASE("nash equilibria of the symmetric families") {
    auto ne = nash_equilibrium(GameModel::self_dependence(10, 6, 1));
    for (double v : ne) CHECK(v == Approx(0.15350567286626973).epsilon(1e-12));

    auto dom = nash_equilibrium(GameModel::dominant(5, 10, 0.45));
    CHECK(dom[0] == Approx(0.4815891217303744).epsilon(1e-12));
    for (int j = 1; j < 10; ++j) CHECK(dom[static_cast<std::size_t>(j)] == 0.0);
}

TEST_CASE("best-response equilibrium is a fixed point of best responses") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        GameModel m = trial % 2 ? testhelpers::random_two_class(rng) : testhelpers::random_general_wte(rng);
        Vec ne = nash_equilibrium(m);
        for (int i = 0; i < m.n(); ++i) {
            double cross = 0.0;
            for (int j = 0; j < m.n(); ++j)
                if (j != i) cross += m.influence(i, j) * ne[static_cast<std::size_t>(j)];
            double wii = m.influence(i, i);
            double best = std::max(0.0, (std::log(wii / m.unit_cost(i)) - cross) / wii);
            CHECK(ne[static_cast<std::size_t>(i)] == Approx(best).margin(1e-9));
        }
    }
}

TEST_CASE("self-dependence exit equilibria match the closed forms") {
    auto ees = exit_equilibria(GameModel::self_dependence(10, 6, 1), 2);
    REQUIRE(ees.size() == 1);
    CHECK(ees[0].case_label == "beta");
    CHECK(ees[0].profile[2] == Approx(0.14104373817659518).epsilon(1e-10));
    CHECK(ees[0].profile[0] == Approx(0.1784295422456188).epsilon(1e-10));

    auto alpha = exit_equilibria(GameModel::self_dependence(2, 6, 1.9), 0);
    REQUIRE(alpha.size() == 1);
    CHECK(alpha[0].case_label == "alpha");
    CHECK(alpha[0].profile[0] == 0.0);
    CHECK(alpha[0].profile[1] == Approx(0.1916509305092767).epsilon(1e-10));
}

TEST_CASE("three exit equilibria coexist for weakly self-dependent users") {
    auto ees = exit_equilibria(GameModel::self_dependence(0.5, 3, 0.01), 1);
    REQUIRE(ees.size() == 3);
    CHECK(ees[0].case_label == "gamma");   // outlier-invests patterns come last
    CHECK(ees[1].case_label == "omega");
    CHECK(ees[2].case_label == "zeta");
    CHECK(ees[0].profile[1] == 0.0);
    CHECK(ees[1].profile[1] == Approx(7.824046010856292).epsilon(1e-10));
    CHECK(ees[1].profile[0] == 0.0);
    CHECK(ees[2].profile[1] == Approx(3.3225888640402337).epsilon(1e-10));
    CHECK(ees[2].profile[0] == Approx(1.1253642867040146).epsilon(1e-10));
}

TEST_CASE("weakest-link exit equilibrium") {
    auto ees = exit_equilibria(GameModel::weakest_link(4, 1, 1), 0);
    REQUIRE(ees.size() == 1);
    CHECK(ees[0].profile[0] == 0.0);
    CHECK(ees[0].profile[1] == Approx(1.0986122886681098).epsilon(1e-10));
}

TEST_CASE("dominant-user exit equilibria split on the externality share") {
    auto low = exit_equilibria(GameModel::dominant(5, 10, 0.45), 0);
    REQUIRE(low.size() == 1);
    CHECK(low[0].case_label == "dominant-alpha");
    CHECK(low[0].profile[0] == 0.0);
    CHECK(low[0].profile[3] == Approx(0.332859141505999).epsilon(1e-10));

    auto high = exit_equilibria(GameModel::dominant(12, 10, 0.45), 0);
    REQUIRE(high.size() == 1);
    CHECK(high[0].case_label == "dominant-beta");
    CHECK(high[0].profile[0] == Approx(std::log(12 / 0.45) / 12).epsilon(1e-10));

    auto follower = exit_equilibria(GameModel::dominant(5, 10, 0.45), 4);
    REQUIRE(follower.size() == 1);
    CHECK(follower[0].profile[0] == Approx(0.9210340371976183).epsilon(1e-10));
    CHECK(follower[0].profile[4] == 0.0);
}

TEST_CASE("every reported exit equilibrium survives an independent check") {
    std::vector<GameModel> models{
        GameModel::self_dependence(10, 6, 1),
        GameModel::self_dependence(0.5, 3, 0.01),
        GameModel::self_dependence(2, 6, 1.9),
        GameModel::two_class(4, 0.1, 8, 2, 0.05),
        GameModel::two_class(4, 0.9, 8, 2, 0.05),
        GameModel::dominant(5, 10, 0.45),
        GameModel::dominant(12, 10, 0.45),
        GameModel::star(5, 0.7, RiskKind::Exponential),
        GameModel::weakest_link(4, 1, 1),
        GameModel::weakest_link(2, 1, 0.5),
        GameModel::general_wte({{2, 0.5, 0.3}, {0.4, 1.5, 0.2}, {0.1, 0.6, 1.8}}, {0.5, 0.4, 0.6}),
    };
    for (const auto& m : models)
        for (int i = 0; i < m.n(); ++i)
            for (const auto& ee : exit_equilibria(m, i)) {
                INFO(m.describe() << " outlier " << i << " case " << ee.case_label);
                CHECK(testhelpers::exit_equilibrium_checks_out(m, ee));
            }
}

TEST_CASE("price of anarchy never drops below one on random instances") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        GameModel m = testhelpers::random_self_dependence(rng, trial % 3 != 0);
        double ne = social_cost(m, nash_equilibrium(m));
        double so = social_cost(m, social_optimum(m).x);
        CHECK(ne >= so - 1e-9);
    }
}

TEST_CASE("certificates keep complementary slackness tight") {
    std::mt19937_64 rng(78);
    for (int trial = 0; trial < 30; ++trial) {
        GameModel m = trial % 2 ? testhelpers::random_general_wte(rng)
                                : testhelpers::random_two_class(rng);
        auto so = social_optimum(m);
        CHECK(so.kkt.valid);
        for (std::size_t i = 0; i < so.x.size(); ++i)
            CHECK(std::abs(so.kkt.multipliers[i] * so.x[i]) <= 1e-9);
    }
}
