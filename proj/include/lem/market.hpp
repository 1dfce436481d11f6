#pragma once

#include <cstddef>
#include <vector>

#include "lem/distribution.hpp"

namespace lem {

struct SupplierSpec {
    int id = 0;
    bool invests = false;           // has storage, bids its mean output
    GenerationDistribution dist;    // generation law for the current (month, hour)
};

// One market hour: price cap p̄, shortfall penalty λ, grid price and demand.
struct MarketScenario {
    double price_cap = 0.0;
    double penalty = 0.0;
    double grid_price = 0.0;
    double demand = 0.0;
    std::vector<SupplierSpec> suppliers;

    // Enforces 0 < p̄ < grid price, λ > p̄, D > 0.
    void validate() const;
};

struct Bid {
    double price = 0.0;     // in [0, price_cap]
    double quantity = 0.0;  // >= 0
};

struct Allocation {
    std::vector<double> purchased;  // x_i, one per supplier
};

// Consumers saturate suppliers in ascending price order (cost-saving LP).
// Price ties are averaged over all saturation orders of the tied group.
Allocation allocate_demand(const std::vector<Bid>& bids, double demand);

// Same, but tied groups are first restricted to the saturation orders that
// maximize total supplier revenue under the scenario's revenue functions;
// remaining ties are averaged.
Allocation allocate_demand(const std::vector<Bid>& bids, double demand,
                           const MarketScenario& scenario);

// Revenue-maximizing bid quantity at a given price: the mean output with
// storage, F^{-1}(price/penalty) without.
double dominant_quantity(double price, bool invests, const GenerationDistribution& dist,
                         double penalty);

// Expected hourly revenue from selling `sold` at `price`: commitment revenue
// minus the penalty on the (expected) shortfall.
double supplier_revenue(double price, double sold, bool invests,
                        const GenerationDistribution& dist, double penalty);

}  // namespace lem
