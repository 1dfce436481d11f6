#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace lem {

struct SampleGrid;  // io.hpp

// Daily charge/discharge trajectories per month, CD = X - E[X] per (m,t)
// cell, optionally efficiency-adjusted to the net storage flow
// eta_c * CD^+ - CD^- / eta_d.
struct ChargeDischargeSeries {
    int hours_per_day = 0;
    std::vector<std::vector<std::vector<double>>> trajectories;  // [month][day][hour]
    double mean_abs_cd = 0.0;  // E_{m,t}[CD^+ + CD^-] of the raw series
    double max_abs_flow = 0.0; // bound on |flow|, for the termination guard
};

ChargeDischargeSeries charge_discharge_series(const SampleGrid& samples,
                                              double charge_efficiency = 1.0,
                                              double discharge_efficiency = 1.0);

enum class CapacitySide { Underflow, Overflow };

// Markov/Chernoff upper bound on the probability that some intra-day partial
// sum of the (signed) flow exceeds the capacity: max over horizons of the
// minimized exponential-moment bound, clamped to [0,1].
double chernoff_bound(const ChargeDischargeSeries& cd, std::size_t month, double capacity,
                      CapacitySide side);

// Month-averaged bound used by the sizing loop.
double month_averaged_bound(const ChargeDischargeSeries& cd, double capacity, CapacitySide side);

struct CapacityResult {
    double underflow_capacity = 0.0;  // S^l
    double overflow_capacity = 0.0;   // S^u
    double total = 0.0;               // S = S^l + S^u
    std::array<double, 2> achieved_bounds{};  // month-averaged, {underflow, overflow}
    double probability_target = 0.0;
    double step = 0.0;
};

// Grid search from one step upward on each side until the month-averaged
// bound drops to the target; the result is grid-minimal per side.
CapacityResult size_capacity(const ChargeDischargeSeries& cd, double alpha, double step);

struct StorageCostParams {
    double unit_capacity_cost = 0.0;    // per MWh of capacity, whole horizon
    double interest_rate = 0.05;        // per year
    double lifetime_years = 15.0;
    double hours_per_year = 8760.0;
    double degradation_unit_cost = 0.0; // per MWh of throughput
    double charge_efficiency = 1.0;
    double discharge_efficiency = 1.0;

    void validate() const;
};

// Annuity conversion of the capital cost into a per-hour fraction:
// kappa = r(1+r)^y / ((1+r)^y - 1) / Y_d.
double annuity_factor(const StorageCostParams& params);

// Hourly investment cost c * kappa * S.
double storage_cost(double capacity, const StorageCostParams& params);

// Hourly expected degradation cost c_o * E[CD^+ + CD^-] of the raw series.
double degradation_cost(const ChargeDischargeSeries& cd, double unit_cost);

}  // namespace lem
