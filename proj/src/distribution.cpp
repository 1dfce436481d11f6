#include "lem/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lem {

ScenarioWeights ScenarioWeights::uniform(int months, int hours) {
    ScenarioWeights w;
    w.month_probabilities.assign(std::size_t(months), 1.0 / double(months));
    w.hours_per_day = hours;
    return w;
}

void ScenarioWeights::validate() const {
    if (month_probabilities.empty() || hours_per_day <= 0) {
        throw std::invalid_argument("ScenarioWeights: empty months or nonpositive hours");
    }
    double sum = 0.0;
    for (double p : month_probabilities) {
        if (p < 0.0) throw std::invalid_argument("ScenarioWeights: negative month probability");
        sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("ScenarioWeights: month probabilities must sum to 1");
    }
}

GenerationDistribution GenerationDistribution::from_samples(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("build_ecdf: empty sample list");
    for (double v : samples) {
        if (v < 0.0) throw std::invalid_argument("build_ecdf: negative sample");
        if (!std::isfinite(v)) throw std::invalid_argument("build_ecdf: non-finite sample");
    }
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    if (samples.front() == samples.back()) {
        return point_mass(samples.front());
    }
    // Knot k (0-based) sits at cumulative probability k/(n-1), so the CDF
    // rises from 0 at the minimum sample to 1 at the maximum. Tied samples
    // collapse to a vertical segment kept as two knots sharing a value.
    GenerationDistribution d;
    d.x_.reserve(n);
    d.p_.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double prob = double(k) / double(n - 1);
        if (k > 0 && samples[k] == d.x_.back()) {
            if (d.x_.size() >= 2 && d.x_[d.x_.size() - 2] == samples[k]) {
                d.p_.back() = prob;  // extend the existing vertical segment
                continue;
            }
        }
        d.x_.push_back(samples[k]);
        d.p_.push_back(prob);
    }
    return d;
}

GenerationDistribution GenerationDistribution::from_knots(std::vector<double> values,
                                                          std::vector<double> probs) {
    if (values.size() != probs.size() || values.size() < 2) {
        throw std::invalid_argument("from_knots: need at least two matching knots");
    }
    if (probs.front() != 0.0 || std::fabs(probs.back() - 1.0) > 1e-12) {
        throw std::invalid_argument("from_knots: probabilities must span [0,1]");
    }
    for (std::size_t k = 1; k < values.size(); ++k) {
        if (values[k] < values[k - 1] || probs[k] < probs[k - 1]) {
            throw std::invalid_argument("from_knots: knots must be nondecreasing");
        }
    }
    GenerationDistribution d;
    d.x_ = std::move(values);
    d.p_ = std::move(probs);
    d.p_.back() = 1.0;
    d.point_mass_ = d.x_.front() == d.x_.back();
    return d;
}

GenerationDistribution GenerationDistribution::uniform(double lo, double hi) {
    if (hi <= lo) throw std::invalid_argument("uniform: empty support");
    return from_knots({lo, hi}, {0.0, 1.0});
}

GenerationDistribution GenerationDistribution::point_mass(double value) {
    GenerationDistribution d;
    d.x_ = {value, value};
    d.p_ = {0.0, 1.0};
    d.point_mass_ = true;
    return d;
}

double GenerationDistribution::cdf(double x) const {
    if (x < x_.front()) return 0.0;
    if (x >= x_.back()) return 1.0;
    // Last knot with value <= x; right-continuous across vertical segments.
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t hi = std::size_t(it - x_.begin());
    const std::size_t lo = hi - 1;
    const double dx = x_[hi] - x_[lo];
    if (dx <= 0.0) return p_[hi];
    return p_[lo] + (x - x_[lo]) / dx * (p_[hi] - p_[lo]);
}

double GenerationDistribution::inv_cdf(double p) const {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("inv_cdf: probability outside [0,1]");
    // First knot with probability >= p; flats therefore return their left edge.
    const auto it = std::lower_bound(p_.begin(), p_.end(), p);
    const std::size_t hi = std::size_t(it - p_.begin());
    if (hi == 0) return x_.front();
    if (p == p_[hi]) return x_[hi];
    const std::size_t lo = hi - 1;
    const double dp = p_[hi] - p_[lo];
    if (dp <= 0.0) return x_[lo];
    return x_[lo] + (p - p_[lo]) / dp * (x_[hi] - x_[lo]);
}

double GenerationDistribution::mean() const {
    // Per segment: (p1-p0)*(x0+x1)/2 covers both sloped pieces and atoms.
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < x_.size(); ++k) {
        m += (p_[k + 1] - p_[k]) * 0.5 * (x_[k] + x_[k + 1]);
    }
    return m;
}

double GenerationDistribution::truncated_first_moment(double q) const {
    if (q < -1e-12 || q > x_.back() + 1e-12) {
        throw std::invalid_argument("truncated_first_moment: q outside support");
    }
    q = std::min(std::max(q, 0.0), x_.back());
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < x_.size(); ++k) {
        const double x0 = x_[k], x1 = x_[k + 1];
        const double dp = p_[k + 1] - p_[k];
        if (dp <= 0.0) continue;
        if (x1 == x0) {
            if (x0 <= q) m += dp * x0;  // atom at or below q
            continue;
        }
        if (q <= x0) break;
        const double upper = std::min(q, x1);
        const double density = dp / (x1 - x0);
        m += density * 0.5 * (upper * upper - x0 * x0);
    }
    return m;
}

double GenerationDistribution::expected_shortfall(double x) const {
    if (x <= x_.front()) return 0.0;
    // Integral of F from support_min to x, trapezoid-exact per linear segment.
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < x_.size(); ++k) {
        const double x0 = x_[k], x1 = x_[k + 1];
        if (x1 == x0) continue;
        if (x <= x0) return acc;
        const double upper = std::min(x, x1);
        const double f0 = p_[k];
        const double f_up = p_[k] + (upper - x0) / (x1 - x0) * (p_[k + 1] - p_[k]);
        acc += 0.5 * (f0 + f_up) * (upper - x0);
    }
    if (x > x_.back()) acc += x - x_.back();  // F == 1 beyond the support
    return acc;
}

}  // namespace lem
