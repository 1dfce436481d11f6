#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lem/sizing.hpp"
#include "lem/stage1.hpp"

namespace lem {

// Synthetic or data-backed generation source for one supplier.
struct SupplierConfig {
    std::string generation_csv;                       // per-(m,t) ECDFs from data
    std::optional<GenerationDistribution> synthetic;  // replicated across all cells
};

struct SizingConfig {
    double alpha = 0.05;
    double step = 0.0;  // 0: 1% of the largest daily |partial sum|
    StorageCostParams cost;
};

struct SweepConfig {
    double price_cap = 0.0;
    double penalty = 0.0;  // used when penalty_grid is empty
    double grid_price = 0.0;
    int months = 1;
    int hours = 1;
    std::vector<double> month_probabilities;  // empty: uniform
    std::vector<SupplierConfig> suppliers;    // exactly two

    std::vector<double> demand_grid;
    std::vector<double> cost_grid;          // common storage cost per cell
    std::vector<double> penalty_grid;       // empty: {penalty}
    std::optional<SizingConfig> sizing;     // derive per-supplier costs from data

    double price_step = 0.0;  // 0: price_cap / 200
    std::uint64_t seed = 0;
    int threads = 1;
    std::string currency = "";
    double unit_scale = 1.0;  // configured per-kWh prices scaled to per-MWh

    void validate() const;
};

struct SweepCell {
    double demand = 0.0;
    std::array<double, 2> costs{};
    double penalty = 0.0;
    std::string label;  // S1S1 | S1S0 | S0S0 | combinations | mixed-only
    std::array<double, 2> profits{};
    std::array<double, 2> expected_prices{};
    std::array<double, 2> invest_probabilities{};  // mixed-only cells
};

struct SweepResult {
    std::vector<SweepCell> cells;
    std::array<double, 2> sized_costs{};   // when sizing was configured
    std::array<double, 2> sized_capacity{};
    double elapsed_seconds = 0.0;
};

SweepResult run_sweep(const SweepConfig& config);

// Long-format CSV plus a JSON run manifest into `out_dir`; returns the CSV
// path. The CSV bytes depend only on config and seed.
std::string emit_results(const SweepResult& result, const SweepConfig& config,
                         const std::string& out_dir);

// Equilibrium-set label shared by the sweep and the CLI: orientation-collapsed
// pure subgame names joined in lexicographic profile order, or "mixed-only".
std::string equilibrium_label(const InvestmentEquilibrium& eq);

}  // namespace lem
