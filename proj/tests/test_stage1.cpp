#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include "lem/stage1.hpp"

using lem::GenerationDistribution;
using lem::InvestmentEquilibrium;
using lem::MarketCell;
using lem::ProfitMatrix;
using lem::ScenarioFamily;
using lem::SubgameRevenues;

namespace {

// Shared symmetric fixture: pi^{S1S1}=5, pi^{S1S0|Y}=8, pi^{S1S0|N}=3, pi^{S0S0}=4.
SubgameRevenues fixture_revenues() {
    SubgameRevenues r;
    r.s1s1 = {5.0, 5.0};
    r.s1s0_with = {8.0, 8.0};
    r.s1s0_without = {3.0, 3.0};
    r.s0s0 = {4.0, 4.0};
    return r;
}

ScenarioFamily uniform_family(double cap, double penalty, double demand, double xbar1,
                              double xbar2, int months = 1, int hours = 1) {
    ScenarioFamily f;
    f.price_cap = cap;
    f.penalty = penalty;
    f.grid_price = std::max(cap, penalty) + 0.5;
    f.weights = lem::ScenarioWeights::uniform(months, hours);
    f.cells.resize(std::size_t(months));
    for (int m = 0; m < months; ++m) {
        for (int t = 0; t < hours; ++t) {
            MarketCell cell;
            cell.demand = demand;
            cell.dists = {GenerationDistribution::uniform(0.0, xbar1),
                          GenerationDistribution::uniform(0.0, xbar2)};
            f.cells[std::size_t(m)].push_back(std::move(cell));
        }
    }
    return f;
}

}  // namespace

TEST_SUITE_BEGIN("stage1");

TEST_CASE("profit matrix follows the payoff table") {
    {
        SubgameRevenues zero;
        zero.s1s0_without = {1e-9, 1e-9};
        zero.s0s0 = {1e-9, 1e-9};
        const ProfitMatrix m = lem::profit_matrix(zero, {1.0, 1.0});
        CHECK(m.payoff[0][1][1] == doctest::Approx(-1.0));
        CHECK(m.payoff[1][1][1] == doctest::Approx(-1.0));
        CHECK(m.payoff[0][1][0] == doctest::Approx(-1.0));
        CHECK(m.payoff[1][1][0] == doctest::Approx(1e-9));
    }
    {
        const ProfitMatrix m = lem::profit_matrix(fixture_revenues(), {2.0, 2.0});
        CHECK(m.payoff[0][1][1] == doctest::Approx(3.0));
        CHECK(m.payoff[1][1][1] == doctest::Approx(3.0));
        CHECK(m.payoff[0][1][0] == doctest::Approx(6.0));
        CHECK(m.payoff[1][1][0] == doctest::Approx(3.0));
        CHECK(m.payoff[0][0][1] == doctest::Approx(3.0));
        CHECK(m.payoff[1][0][1] == doctest::Approx(6.0));
        CHECK(m.payoff[0][0][0] == doctest::Approx(4.0));
        CHECK(m.payoff[1][0][0] == doctest::Approx(4.0));
    }
    {
        const ProfitMatrix m = lem::profit_matrix(fixture_revenues(), {0.0, 0.0});
        CHECK(m.payoff[0][1][1] == doctest::Approx(5.0));
        CHECK(m.payoff[0][1][0] == doctest::Approx(8.0));
    }
}

TEST_CASE("pure equilibria on the shared fixture") {
    const SubgameRevenues rev = fixture_revenues();
    {
        const auto eq = lem::pure_investment_equilibria(lem::profit_matrix(rev, {1.0, 1.0}));
        REQUIRE(eq.size() == 1);
        CHECK(eq[0] == std::array<int, 2>{1, 1});
    }
    {
        const auto eq = lem::pure_investment_equilibria(lem::profit_matrix(rev, {10.0, 10.0}));
        REQUIRE(eq.size() == 1);
        CHECK(eq[0] == std::array<int, 2>{0, 0});
    }
    {
        const auto eq = lem::pure_investment_equilibria(lem::profit_matrix(rev, {3.0, 3.0}));
        REQUIRE(eq.size() == 2);
        CHECK(eq[0] == std::array<int, 2>{0, 1});
        CHECK(eq[1] == std::array<int, 2>{1, 0});
    }
}

TEST_CASE("interval conditions agree with the best-response scan") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> unif(0.0, 10.0);
    for (int rep = 0; rep < 500; ++rep) {
        SubgameRevenues rev;
        rev.s1s1 = {unif(rng), unif(rng)};
        rev.s1s0_with = {unif(rng), unif(rng)};
        rev.s1s0_without = {unif(rng), unif(rng)};
        rev.s0s0 = {unif(rng), unif(rng)};
        const std::array<double, 2> costs = {unif(rng), unif(rng)};
        const auto scan = lem::pure_investment_equilibria(lem::profit_matrix(rev, costs));
        const auto cond = lem::pure_equilibria_from_conditions(rev, costs);
        CHECK(scan == cond);
    }
}

TEST_CASE("mixed investment equilibrium") {
    const SubgameRevenues rev = fixture_revenues();
    {
        const auto mixed = lem::mixed_investment_equilibrium(lem::profit_matrix(rev, {3.0, 3.0}));
        REQUIRE(mixed.exists);
        CHECK(mixed.invest_prob[0] == doctest::Approx(0.5));
        CHECK(mixed.invest_prob[1] == doctest::Approx(0.5));
    }
    {
        const auto mixed = lem::mixed_investment_equilibrium(lem::profit_matrix(rev, {10.0, 10.0}));
        CHECK(!mixed.exists);
    }
    {
        // Equal rows: indifference holds identically, reported as degenerate.
        ProfitMatrix m;
        for (int i = 0; i < 2; ++i) {
            for (int a = 0; a <= 1; ++a) {
                for (int b = 0; b <= 1; ++b) m.payoff[i][a][b] = 1.0;
            }
        }
        const auto mixed = lem::mixed_investment_equilibrium(m);
        CHECK(mixed.degenerate);
    }
}

TEST_CASE("mixed equilibrium satisfies indifference") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> unif(0.0, 5.0);
    int interior = 0;
    for (int rep = 0; rep < 300; ++rep) {
        ProfitMatrix m;
        for (int i = 0; i < 2; ++i) {
            for (int a = 0; a <= 1; ++a) {
                for (int b = 0; b <= 1; ++b) m.payoff[i][a][b] = unif(rng);
            }
        }
        const auto mixed = lem::mixed_investment_equilibrium(m);
        if (!mixed.exists) continue;
        ++interior;
        const double q2 = mixed.invest_prob[1];
        const double inv1 = q2 * m.payoff[0][1][1] + (1.0 - q2) * m.payoff[0][1][0];
        const double skip1 = q2 * m.payoff[0][0][1] + (1.0 - q2) * m.payoff[0][0][0];
        CHECK(inv1 == doctest::Approx(skip1).epsilon(1e-9));
        const double q1 = mixed.invest_prob[0];
        const double inv2 = q1 * m.payoff[1][1][1] + (1.0 - q1) * m.payoff[1][0][1];
        const double skip2 = q1 * m.payoff[1][1][0] + (1.0 - q1) * m.payoff[1][0][0];
        CHECK(inv2 == doctest::Approx(skip2).epsilon(1e-9));
    }
    CHECK(interior > 10);
}

TEST_CASE("every matrix has a pure or a mixed equilibrium") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int rep = 0; rep < 500; ++rep) {
        ProfitMatrix m;
        for (int i = 0; i < 2; ++i) {
            for (int a = 0; a <= 1; ++a) {
                for (int b = 0; b <= 1; ++b) m.payoff[i][a][b] = unif(rng);
            }
        }
        const InvestmentEquilibrium eq = lem::solve_stage1(m);
        CHECK((!eq.pure.empty() || eq.mixed.exists || eq.mixed.degenerate));
    }
}

TEST_CASE("expected subgame revenues over cells") {
    // One cell: the averages are the stage-two revenues themselves.
    const auto f1 = uniform_family(0.5, 1.0, 1.0, 1.0, 1.0);
    const auto avg1 = lem::expected_subgame_revenues(f1, 0.005);
    CHECK(avg1.s0s0[0] == doctest::Approx(0.125));  // cap regime, lambda*int_0^{1/2} x dx
    CHECK(avg1.s0s0[1] == doctest::Approx(0.125));

    // Duplicating the cell with equal weights changes nothing.
    const auto f2 = uniform_family(0.5, 1.0, 1.0, 1.0, 1.0, 2, 2);
    const auto avg2 = lem::expected_subgame_revenues(f2, 0.005);
    CHECK(avg2.s1s1[0] == doctest::Approx(avg1.s1s1[0]));
    CHECK(avg2.s1s0_with[1] == doctest::Approx(avg1.s1s0_with[1]));
    CHECK(avg2.s1s0_without[0] == doctest::Approx(avg1.s1s0_without[0]));
    CHECK(avg2.s0s0[1] == doctest::Approx(avg1.s0s0[1]));
}

TEST_CASE("subgame revenue positivity under randomness") {
    const auto f = uniform_family(1.0, 2.0, 1.3, 2.0, 2.6);
    const auto rev = lem::expected_subgame_revenues(f, 0.01);
    CHECK(rev.s1s0_with[0] > 0.0);
    CHECK(rev.s1s0_with[1] > 0.0);
    CHECK(rev.s1s0_without[0] > 0.0);
    CHECK(rev.s1s0_without[1] > 0.0);
    CHECK(rev.s0s0[0] > 0.0);
    CHECK(rev.s0s0[1] > 0.0);
}

TEST_CASE("dominant-strategy cost threshold") {
    // U[0,1], cap 1, penalty 2: C^th = 1*0.5 - 2*int_0^{1/2} x dx = 0.25.
    auto f = uniform_family(1.0, 2.0, 1.2, 1.0, 1.0);
    CHECK(lem::dominant_strategy_threshold(f, 0) == doctest::Approx(0.25));
    CHECK(lem::dominant_strategy_threshold(f, 1) == doctest::Approx(0.25));

    // Below the high-demand threshold the precondition fails.
    auto low = uniform_family(1.0, 2.0, 0.9, 1.0, 1.0);
    CHECK_THROWS_AS(lem::dominant_strategy_threshold(low, 0), std::invalid_argument);

    // Point-mass output: storage brings no benefit.
    ScenarioFamily pm = uniform_family(1.0, 2.0, 2.5, 1.0, 1.0);
    pm.cells[0][0].dists[0] = GenerationDistribution::point_mass(1.0);
    CHECK(lem::dominant_strategy_threshold(pm, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(lem::dominant_strategy_threshold(pm, 1) > 0.0);
}

TEST_CASE("oligopoly investment checks") {
    ScenarioFamily f;
    f.price_cap = 1.0;
    f.penalty = 2.0;
    f.grid_price = 2.5;
    f.weights = lem::ScenarioWeights::uniform(1, 1);
    MarketCell cell;
    cell.demand = 3.5;
    cell.dists = {GenerationDistribution::uniform(0.0, 1.0),
                  GenerationDistribution::uniform(0.0, 1.0),
                  GenerationDistribution::uniform(0.0, 1.0)};
    f.cells = {{cell}};

    // High demand: per-supplier dominant choice matches sign(C^th - C).
    auto rep = lem::oligopoly_investment_checks(f, {0.1, 0.3, 0.1});
    CHECK(rep.high_demand);
    CHECK(rep.cost_threshold[0] == doctest::Approx(0.25));
    CHECK(rep.dominant_choice[0] == 1);
    CHECK(rep.dominant_choice[1] == 0);
    CHECK(rep.dominant_choice[2] == 1);
    CHECK(!rep.all_out_unique);

    // Costs above the benefit bound: no supplier invests.
    rep = lem::oligopoly_investment_checks(f, {3.0, 3.0, 3.0});
    CHECK(rep.all_out_unique);

    // Low demand: every storage set of two or more is ruled out.
    f.cells[0][0].demand = 0.4;
    rep = lem::oligopoly_investment_checks(f, {0.1, 0.1, 0.1});
    CHECK(!rep.high_demand);
    CHECK(rep.excluded_profiles.size() == 4);  // {1,2},{1,3},{2,3},{1,2,3}
}

TEST_CASE("family validation") {
    auto f = uniform_family(1.0, 2.0, 1.0, 1.0, 1.0);
    CHECK_NOTHROW(f.validate());
    f.cells[0][0].demand = 0.0;
    CHECK_THROWS_AS(f.validate(), std::invalid_argument);
}

TEST_SUITE_END();
