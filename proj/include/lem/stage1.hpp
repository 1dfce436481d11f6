#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "lem/stage2.hpp"

namespace lem {

// One (month, hour) cell of the scenario family: demand plus each supplier's
// generation law in that cell.
struct MarketCell {
    double demand = 0.0;
    std::vector<GenerationDistribution> dists;
};

// All the data needed to evaluate Stage II across the investment horizon.
struct ScenarioFamily {
    double price_cap = 0.0;
    double penalty = 0.0;
    double grid_price = 0.0;
    ScenarioWeights weights;
    std::vector<std::vector<MarketCell>> cells;  // [month][hour]

    std::size_t supplier_count() const;
    void validate() const;
    MarketScenario scenario(std::size_t month, std::size_t hour,
                            const std::vector<bool>& invests) const;
};

// Expected Stage II equilibrium revenues per investment profile, averaged
// over (month, hour) with the month weights.
struct SubgameRevenues {
    std::array<double, 2> s1s1{};          // both invest
    std::array<double, 2> s1s0_with{};     // [i]: i invests, the other does not
    std::array<double, 2> s1s0_without{};  // [i]: i does not invest, the other does
    std::array<double, 2> s0s0{};          // neither invests
};

// Revenues plus expected bidding prices per profile (profile index phi1*2+phi2).
struct StageTwoAverages {
    SubgameRevenues revenues;
    std::array<std::array<double, 2>, 4> expected_prices{};
};

StageTwoAverages expected_subgame_summary(const ScenarioFamily& family, double price_step,
                                          int threads = 1);
SubgameRevenues expected_subgame_revenues(const ScenarioFamily& family, double price_step,
                                          int threads = 1);

// The 2x2 bimatrix of Stage I: payoff[i][phi1][phi2] is supplier i's profit,
// storage cost subtracted for investors.
struct ProfitMatrix {
    double payoff[2][2][2] = {};
};

ProfitMatrix profit_matrix(const SubgameRevenues& rev, const std::array<double, 2>& costs);

// All profiles (phi1, phi2) from which neither supplier gains by deviating,
// in lexicographic order. Brute-force best-response scan over the matrix.
std::vector<std::array<int, 2>> pure_investment_equilibria(const ProfitMatrix& matrix);

// The same set derived from the closed interval conditions on costs and
// subgame revenues; must agree with the scan.
std::vector<std::array<int, 2>> pure_equilibria_from_conditions(const SubgameRevenues& rev,
                                                                const std::array<double, 2>& costs);

struct MixedInvestment {
    bool exists = false;      // interior solution of the indifference system
    bool degenerate = false;  // indifference holds identically
    std::array<double, 2> invest_prob{};  // pr_i^s
};

MixedInvestment mixed_investment_equilibrium(const ProfitMatrix& matrix);

struct InvestmentEquilibrium {
    std::vector<std::array<int, 2>> pure;
    MixedInvestment mixed;
};

InvestmentEquilibrium solve_stage1(const ProfitMatrix& matrix);

// High-demand dominant-strategy cost threshold for one supplier:
// C^th = E_{m,t}[cap * E[X] - penalty * TFM(F^{-1}(cap/penalty))].
// Requires D >= D^th (every profile in the cap regime) in every cell.
double dominant_strategy_threshold(const ScenarioFamily& family, std::size_t supplier);

// Per-cell demand threshold above which every profile has the cap equilibrium.
double high_demand_threshold(const ScenarioFamily& family, std::size_t month, std::size_t hour);

struct OligopolyInvestmentReport {
    std::vector<double> benefit_upper_bound;   // per supplier
    bool all_out_unique = false;               // costs above every benefit bound
    std::vector<unsigned> excluded_profiles;   // storage-set bitmasks ruled out at low demand
    bool high_demand = false;                  // every cell above its threshold
    std::vector<double> cost_threshold;        // per supplier, valid when high_demand
    std::vector<int> dominant_choice;          // 1/0 when high_demand, else -1
};

OligopolyInvestmentReport oligopoly_investment_checks(const ScenarioFamily& family,
                                                      const std::vector<double>& costs);

}  // namespace lem
