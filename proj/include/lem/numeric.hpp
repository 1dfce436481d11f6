#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace lem {

// Recursive adaptive Simpson quadrature on [a,b], absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-9, int max_depth = 48);

// Same, but the interval is first split at the given interior points so the
// integrand only has to be smooth between consecutive splits.
double integrate_with_splits(const std::function<double(double)>& f, double a, double b,
                             const std::vector<double>& splits, double tol = 1e-9);

// Bisection root finding; g(lo) and g(hi) must have opposite signs.
double bisect(const std::function<double(double)>& g, double lo, double hi,
              double xtol = 1e-10, int max_iter = 200);

// Gaussian elimination with partial pivoting. Throws std::runtime_error on a
// (numerically) singular system.
std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b);

// Apply fn to 0..n-1 on a small worker pool. Completion order is unspecified;
// callers must write results by index.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace lem
