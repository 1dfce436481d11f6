#pragma once

#include <cstddef>
#include <vector>

#include "lem/market.hpp"

namespace lem {

// Discretized duopoly price game: payoff[i][a][b] is supplier i's revenue
// when it bids grid[a] and the opponent bids grid[b], with quantities pinned
// at the dominant strategies and demand split by the market tie rule.
struct DiscreteGame {
    std::vector<double> price_grid;  // 0, step, ..., price_cap
    std::vector<std::vector<std::vector<double>>> payoff;
    double demand = 0.0;
    double price_cap = 0.0;
};

// price_step must divide the cap; the grid includes the zero price.
DiscreteGame build_discrete_game(const MarketScenario& scenario, double price_step);

struct NashCheck {
    bool pass = false;
    double worst_gain = 0.0;   // best deviation payoff minus the mixture value
    std::size_t worst_supplier = 0;
    double worst_price = 0.0;
};

// Certifies a strategy profile (one probability vector per supplier over the
// grid) as an epsilon-equilibrium: no pure grid deviation gains more than
// epsilon for either supplier.
NashCheck epsilon_nash_check(const DiscreteGame& game,
                             const std::vector<std::vector<double>>& strategies, double epsilon);

// Scale-aware default tolerance for epsilon_nash_check.
double default_epsilon(const MarketScenario& scenario);

struct BestResponse {
    std::size_t index = 0;
    double price = 0.0;
    double payoff = 0.0;
};

// Argmax of supplier `who`'s expected payoff against the opponent mixture;
// ties break to the lowest price index.
BestResponse best_response_scan(const DiscreteGame& game, std::size_t who,
                                const std::vector<double>& opponent_mixture);

// N-supplier pure-profile check: the largest gain any supplier can obtain by
// a unilateral grid price deviation from `prices` (quantities follow the
// dominant strategies). Gain <= 0 certifies a pure equilibrium on the grid.
double pure_profile_deviation_gain(const MarketScenario& scenario,
                                   const std::vector<double>& prices, double price_step);

}  // namespace lem
