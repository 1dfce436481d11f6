#include "lem/sizing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lem/io.hpp"

namespace lem {

namespace {

constexpr double kSMax = 50.0;  // upper edge of the exponent search domain

// log of the empirical bound B(s) = exp(-s*capacity) * mean_d exp(s*ps_d),
// evaluated stably via log-sum-exp over the daily partial sums.
double log_bound(double s, double capacity, const std::vector<double>& partial_sums) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double ps : partial_sums) hi = std::max(hi, s * ps);
    double acc = 0.0;
    for (double ps : partial_sums) acc += std::exp(s * ps - hi);
    return -s * capacity + hi + std::log(acc / double(partial_sums.size()));
}

double log_bound_deriv(double s, double capacity, const std::vector<double>& partial_sums) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double ps : partial_sums) hi = std::max(hi, s * ps);
    double w = 0.0, wx = 0.0;
    for (double ps : partial_sums) {
        const double e = std::exp(s * ps - hi);
        w += e;
        wx += e * ps;
    }
    return -capacity + wx / w;
}

// min over s in (0, kSMax] of B(s); log B is convex, so a safeguarded Newton
// on the derivative suffices, with golden-section as the fallback. A bound
// greater than one is replaced by the trivial bound 1.
double minimize_bound(double capacity, const std::vector<double>& partial_sums) {
    const auto f = [&](double s) { return log_bound(s, capacity, partial_sums); };
    const auto df = [&](double s) { return log_bound_deriv(s, capacity, partial_sums); };

    const double d_hi = df(kSMax);
    if (d_hi <= 0.0) return std::min(1.0, std::exp(f(kSMax)));  // decreasing throughout
    const double s_eps = 1e-12;
    if (df(s_eps) >= 0.0) return 1.0;  // increasing throughout; infimum at s -> 0+

    double lo = s_eps, hi = kSMax;
    double s = 1.0;
    if (df(1.0) > 0.0) hi = 1.0; else lo = 1.0;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
        const double d = df(s);
        if (d > 0.0) hi = s; else lo = s;
        // Newton step on the derivative, via a finite-difference second
        // derivative; fall back to bisection when it leaves the bracket.
        const double h = std::max(1e-6, 1e-6 * s);
        const double dd = (df(s + h) - df(std::max(s - h, s_eps))) / (h + std::min(h, s - s_eps));
        double next = dd > 0.0 ? s - d / dd : 0.5 * (lo + hi);
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - s) < 1e-12 * std::max(1.0, s)) {
            s = next;
            converged = true;
            break;
        }
        s = next;
    }
    if (!converged && hi - lo > 1e-9) {
        // Golden-section on log B over the final bracket.
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = lo, b = hi;
        double c = b - phi * (b - a), d = a + phi * (b - a);
        double fc = f(c), fd = f(d);
        for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
            if (fc < fd) {
                b = d; d = c; fd = fc;
                c = b - phi * (b - a);
                fc = f(c);
            } else {
                a = c; c = d; fc = fd;
                d = a + phi * (b - a);
                fd = f(d);
            }
        }
        s = 0.5 * (a + b);
    }
    return std::min(1.0, std::exp(f(s)));
}

}  // namespace

ChargeDischargeSeries charge_discharge_series(const SampleGrid& grid, double charge_efficiency,
                                              double discharge_efficiency) {
    if (!(charge_efficiency > 0.0 && charge_efficiency <= 1.0) ||
        !(discharge_efficiency > 0.0 && discharge_efficiency <= 1.0)) {
        throw std::invalid_argument("charge_discharge_series: efficiencies must lie in (0,1]");
    }
    grid.validate_complete();

    ChargeDischargeSeries out;
    out.hours_per_day = grid.hours;
    out.trajectories.resize(std::size_t(grid.months));
    double month_abs_mean_sum = 0.0;

    for (int m = 0; m < grid.months; ++m) {
        const auto& by_hour = grid.samples[std::size_t(m)];
        const std::size_t days = by_hour[0].size();
        for (int t = 1; t < grid.hours; ++t) {
            if (by_hour[std::size_t(t)].size() != days) {
                throw std::runtime_error("charge_discharge_series: incomplete day trajectories in "
                                         "month " + std::to_string(m + 1));
            }
        }
        std::vector<double> cell_mean(std::size_t(grid.hours), 0.0);
        for (int t = 0; t < grid.hours; ++t) {
            double s = 0.0;
            for (double v : by_hour[std::size_t(t)]) s += v;
            cell_mean[std::size_t(t)] = s / double(days);
        }
        auto& month_traj = out.trajectories[std::size_t(m)];
        month_traj.assign(days, std::vector<double>(std::size_t(grid.hours)));
        double abs_sum = 0.0;
        for (std::size_t d = 0; d < days; ++d) {
            for (int t = 0; t < grid.hours; ++t) {
                const double cd = by_hour[std::size_t(t)][d] - cell_mean[std::size_t(t)];
                abs_sum += std::fabs(cd);
                const double flow = cd >= 0.0 ? charge_efficiency * cd
                                              : cd / discharge_efficiency;
                month_traj[d][std::size_t(t)] = flow;
                out.max_abs_flow = std::max(out.max_abs_flow, std::fabs(flow));
            }
        }
        month_abs_mean_sum += abs_sum / double(days * std::size_t(grid.hours));
    }
    // Months weighted equally, matching the uniform type probabilities.
    out.mean_abs_cd = month_abs_mean_sum / double(grid.months);
    return out;
}

double chernoff_bound(const ChargeDischargeSeries& cd, std::size_t month, double capacity,
                      CapacitySide side) {
    if (!(capacity > 0.0)) throw std::invalid_argument("chernoff_bound: capacity must be positive");
    if (month >= cd.trajectories.size()) {
        throw std::invalid_argument("chernoff_bound: month index out of range");
    }
    const auto& days = cd.trajectories[month];
    if (days.empty()) return 0.0;
    const double sign = side == CapacitySide::Overflow ? 1.0 : -1.0;

    double worst = 0.0;
    std::vector<double> partial(days.size(), 0.0);
    for (int t = 0; t < cd.hours_per_day; ++t) {
        for (std::size_t d = 0; d < days.size(); ++d) {
            partial[d] += sign * days[d][std::size_t(t)];
        }
        worst = std::max(worst, minimize_bound(capacity, partial));
        if (worst >= 1.0) return 1.0;
    }
    return worst;
}

double month_averaged_bound(const ChargeDischargeSeries& cd, double capacity, CapacitySide side) {
    const std::size_t months = cd.trajectories.size();
    if (months == 0) return 0.0;
    double acc = 0.0;
    for (std::size_t m = 0; m < months; ++m) acc += chernoff_bound(cd, m, capacity, side);
    return acc / double(months);
}

CapacityResult size_capacity(const ChargeDischargeSeries& cd, double alpha, double step) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("size_capacity: alpha in (0,1)");
    if (!(step > 0.0)) throw std::invalid_argument("size_capacity: step must be positive");

    CapacityResult res;
    res.probability_target = alpha;
    res.step = step;
    const double guard = double(cd.hours_per_day) * cd.max_abs_flow + step;
    for (int k = 0; k < 2; ++k) {
        const CapacitySide side = k == 0 ? CapacitySide::Underflow : CapacitySide::Overflow;
        double cap = 0.0;
        double bound = 1.0;
        do {
            cap += step;
            if (cap > guard + step) {
                throw std::runtime_error("size_capacity: capacity search failed to terminate");
            }
            bound = month_averaged_bound(cd, cap, side);
        } while (bound > alpha);
        res.achieved_bounds[std::size_t(k)] = bound;
        if (k == 0) res.underflow_capacity = cap; else res.overflow_capacity = cap;
    }
    res.total = res.underflow_capacity + res.overflow_capacity;
    return res;
}

void StorageCostParams::validate() const {
    if (!(interest_rate > 0.0 && interest_rate <= 1.0)) {
        throw std::invalid_argument("StorageCostParams: interest rate in (0,1]");
    }
    if (!(charge_efficiency > 0.0 && charge_efficiency <= 1.0) ||
        !(discharge_efficiency > 0.0 && discharge_efficiency <= 1.0)) {
        throw std::invalid_argument("StorageCostParams: efficiencies in (0,1]");
    }
    if (!(lifetime_years >= 1.0)) throw std::invalid_argument("StorageCostParams: lifetime >= 1");
    if (!(hours_per_year > 0.0)) throw std::invalid_argument("StorageCostParams: hours per year");
    if (unit_capacity_cost < 0.0 || degradation_unit_cost < 0.0) {
        throw std::invalid_argument("StorageCostParams: negative cost");
    }
}

double annuity_factor(const StorageCostParams& p) {
    p.validate();
    const double growth = std::pow(1.0 + p.interest_rate, p.lifetime_years);
    return p.interest_rate * growth / (growth - 1.0) / p.hours_per_year;
}

double storage_cost(double capacity, const StorageCostParams& p) {
    if (capacity < 0.0) throw std::invalid_argument("storage_cost: negative capacity");
    return p.unit_capacity_cost * annuity_factor(p) * capacity;
}

double degradation_cost(const ChargeDischargeSeries& cd, double unit_cost) {
    if (unit_cost < 0.0) throw std::invalid_argument("degradation_cost: negative unit cost");
    return unit_cost * cd.mean_abs_cd;
}

}  // namespace lem
