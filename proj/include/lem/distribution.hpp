#pragma once

#include <vector>

namespace lem {

// One renewable-generation observation for a (month, hour) cell.
struct GenerationSample {
    int month = 0;  // 1..M
    int hour = 0;   // 1..T
    double value = 0.0;  // MW, nonnegative
};

// Month mixture weights used when averaging per-cell results.
struct ScenarioWeights {
    std::vector<double> month_probabilities;  // sums to 1
    int hours_per_day = 24;

    static ScenarioWeights uniform(int months, int hours);
    void validate() const;
};

// Continuous piecewise-linear CDF of renewable output on [support_min, support_max].
//
// Built either from samples (linearly interpolated ECDF anchored at
// F(min)=0, F(max)=1) or from explicit knots. Knots with repeated values
// encode a vertical CDF segment (an atom); degenerate all-equal sample sets
// are flagged as a point mass. Immutable after construction.
class GenerationDistribution {
public:
    GenerationDistribution() = default;

    // Linearly interpolated ECDF of the samples; throws on empty input or
    // negative values.
    static GenerationDistribution from_samples(std::vector<double> samples);

    // Explicit CDF knots: values nondecreasing, probs nondecreasing from 0 to 1.
    static GenerationDistribution from_knots(std::vector<double> values, std::vector<double> probs);

    static GenerationDistribution uniform(double lo, double hi);
    static GenerationDistribution point_mass(double value);

    double cdf(double x) const;        // F(x), clamped to [0,1] outside support
    double inv_cdf(double p) const;    // generalized inverse; left endpoint on flats
    double mean() const;
    // Integral of x dF over [0, q]; q must lie in [0, support_max].
    double truncated_first_moment(double q) const;
    // E[(x - X)^+] = integral of F over [0, x]; convex nondecreasing in x.
    double expected_shortfall(double x) const;

    double support_min() const { return x_.front(); }
    double support_max() const { return x_.back(); }
    bool is_point_mass() const { return point_mass_; }

    const std::vector<double>& knot_values() const { return x_; }
    const std::vector<double>& knot_probs() const { return p_; }

private:
    std::vector<double> x_;  // knot values, nondecreasing
    std::vector<double> p_;  // knot probabilities, nondecreasing, first 0, last 1
    bool point_mass_ = false;
};

}  // namespace lem
