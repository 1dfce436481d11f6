#include "lem/stage2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lem/numeric.hpp"

namespace lem {

namespace {

constexpr double kQtyTol = 1e-12;

// Indices of suppliers that invest in storage.
std::vector<std::size_t> storage_set(const MarketScenario& s) {
    std::vector<std::size_t> u;
    for (std::size_t i = 0; i < s.suppliers.size(); ++i) {
        if (s.suppliers[i].invests) u.push_back(i);
    }
    return u;
}

double cap_quantity(const MarketScenario& s, std::size_t i) {
    return dominant_quantity(s.price_cap, s.suppliers[i].invests, s.suppliers[i].dist, s.penalty);
}

// Price breakpoints of the without-storage quantity p -> F^{-1}(p/penalty):
// one per CDF knot probability.
std::vector<double> quantity_kinks(const SupplierSpec& sp, double penalty, double cap) {
    std::vector<double> ks;
    if (sp.invests) return ks;
    for (double q : sp.dist.knot_probs()) {
        const double p = q * penalty;
        if (p > 0.0 && p < cap) ks.push_back(p);
    }
    return ks;
}

// Integral of du / (u^2 (c + b u)) over [u0, u1] with b >= 0 and the line
// positive on the segment. Diverges where the line touches zero.
double inv_u2_linear_integral(double u0, double u1, double b, double c) {
    if (u1 <= u0) return 0.0;
    const double h0 = c + b * u0;
    const double h1 = c + b * u1;
    if (!(h0 > 0.0) || !(h1 > 0.0)) return std::numeric_limits<double>::infinity();
    if (b <= 1e-14 * std::fabs(c)) {
        return (1.0 / c) * (1.0 / u0 - 1.0 / u1);
    }
    if (std::fabs(c) <= 0.125 * b * u0) {
        // Series in c/(bu); the partial-fraction form cancels badly here.
        double acc = 0.0;
        double coef = 1.0 / b;
        for (int k = 0; k < 48; ++k) {
            const double expo = double(k + 2);
            const double term =
                coef * (std::pow(u0, -expo) - std::pow(u1, -expo)) / expo;
            acc += term;
            coef *= -c / b;
            if (std::fabs(coef) * std::pow(u0, -(expo + 1.0)) / (expo + 1.0) <
                1e-16 * std::fabs(acc)) {
                break;
            }
        }
        return acc;
    }
    return (b / (c * c)) * std::log((u0 * h1) / (u1 * h0)) + (1.0 / c) * (1.0 / u0 - 1.0 / u1);
}

// Linear pieces of h(u) = min(F^{-1}(u/lambda), d) - r over [lo, hi]; the
// generation CDF is piecewise linear, so this is exact.
struct HSeg {
    double u0, u1, b, c;
};

std::vector<HSeg> h_segments(const GenerationDistribution& dn, double lam, double d, double r,
                             double lo, double hi) {
    std::vector<double> cuts = {lo, hi};
    for (double q : dn.knot_probs()) {
        const double u = q * lam;
        if (u > lo && u < hi) cuts.push_back(u);
    }
    const double u_sat = lam * dn.cdf(std::min(d, dn.support_max()));
    if (u_sat > lo && u_sat < hi) cuts.push_back(u_sat);
    std::sort(cuts.begin(), cuts.end());
    std::vector<HSeg> segs;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double u0 = cuts[k], u1 = cuts[k + 1];
        if (u1 - u0 < 1e-15 * std::max(1.0, hi)) continue;
        // Classify by the midpoint: cut points may graze the demand crossing.
        const double ym = dn.inv_cdf(std::clamp(0.5 * (u0 + u1) / lam, 0.0, 1.0));
        HSeg seg;
        seg.u0 = u0;
        seg.u1 = u1;
        if (ym >= d) {  // saturated at the demand
            seg.b = 0.0;
            seg.c = d - r;
        } else {
            const double y0 = dn.inv_cdf(std::clamp(u0 / lam, 0.0, 1.0));
            const double y1 = dn.inv_cdf(std::clamp(u1 / lam, 0.0, 1.0));
            seg.b = (y1 - y0) / (u1 - u0);
            seg.c = y0 - seg.b * u0 - r;
        }
        segs.push_back(seg);
    }
    return segs;
}

// F_n(p | lower) = num * integral over [lower, p] of du / (u^2 h(u)).
double fn_cdf_value(double lower, double p, double num, const std::vector<HSeg>& segs) {
    double acc = 0.0;
    for (const HSeg& seg : segs) {
        const double a = std::max(seg.u0, lower);
        const double b = std::min(seg.u1, p);
        if (b <= a) continue;
        acc += num * inv_u2_linear_integral(a, b, seg.b, seg.c);
        if (!std::isfinite(acc)) return std::numeric_limits<double>::infinity();
    }
    return acc;
}

}  // namespace

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::PureCap: return "pure-cap";
        case Regime::PureZero: return "pure-zero";
        case Regime::Mixed: return "mixed";
    }
    return "?";
}

double MixedPriceCdf::cdf_left(double p) const {
    const double ptol = 1e-9 * std::max(1.0, upper);
    if (discrete()) {
        double acc = 0.0;
        for (std::size_t k = 0; k < support.size(); ++k) {
            if (support[k] < p - ptol) acc += mass[k];
        }
        return acc;
    }
    if (p <= lower) return 0.0;
    if (p >= upper) return 1.0 - atom_at_cap;
    return std::clamp(cdf_fn(p), 0.0, 1.0 - atom_at_cap);
}

double MixedPriceCdf::cdf(double p) const {
    const double ptol = 1e-9 * std::max(1.0, upper);
    if (discrete()) {
        double acc = 0.0;
        for (std::size_t k = 0; k < support.size(); ++k) {
            if (support[k] <= p + ptol) acc += mass[k];
        }
        return acc;
    }
    if (p < lower) return 0.0;
    if (p >= upper - ptol) return 1.0;
    return std::clamp(cdf_fn(p), 0.0, 1.0 - atom_at_cap);
}

double MixedPriceCdf::expected_price() const {
    if (discrete()) {
        double acc = 0.0;
        for (std::size_t k = 0; k < support.size(); ++k) acc += support[k] * mass[k];
        return acc;
    }
    const double cont = integrate_with_splits([&](double p) { return p * pdf_fn(p); },
                                              lower, upper, kinks, 1e-10);
    return cont + atom_at_cap * upper;
}

Regime classify_regime(const MarketScenario& s) {
    s.validate();
    double sum_cap = 0.0;
    for (std::size_t i = 0; i < s.suppliers.size(); ++i) sum_cap += cap_quantity(s, i);
    if (s.demand >= sum_cap - kQtyTol) return Regime::PureCap;

    const auto u = storage_set(s);
    if (u.size() >= 2) {
        double sum_u = 0.0;
        for (std::size_t i : u) sum_u += cap_quantity(s, i);
        double threshold = 1e300;
        for (std::size_t j : u) threshold = std::min(threshold, sum_u - cap_quantity(s, j));
        if (s.demand <= threshold + kQtyTol) return Regime::PureZero;
    }
    return Regime::Mixed;
}

std::optional<PriceEquilibrium> pure_equilibrium(const MarketScenario& s) {
    const Regime regime = classify_regime(s);
    if (regime == Regime::Mixed) return std::nullopt;

    PriceEquilibrium eq;
    eq.kind = regime;
    const std::size_t n = s.suppliers.size();
    if (regime == Regime::PureCap) {
        eq.prices.assign(n, s.price_cap);
        for (std::size_t i = 0; i < n; ++i) {
            const SupplierSpec& sp = s.suppliers[i];
            if (sp.invests) {
                eq.revenues.push_back(s.price_cap * sp.dist.mean());
            } else {
                // Equals penalty * truncated_first_moment(F^{-1}(cap/penalty))
                // for continuous CDFs, and stays exact at atom quantiles.
                const double q = sp.dist.inv_cdf(s.price_cap / s.penalty);
                eq.revenues.push_back(
                    supplier_revenue(s.price_cap, q, false, sp.dist, s.penalty));
            }
        }
    } else {
        eq.prices.assign(n, 0.0);
        eq.revenues.assign(n, 0.0);
    }
    eq.expected_prices = eq.prices;
    return eq;
}

PriceEquilibrium s1s1_mixed(const MarketScenario& s) {
    s.validate();
    if (s.suppliers.size() != 2 || !s.suppliers[0].invests || !s.suppliers[1].invests) {
        throw std::invalid_argument("s1s1_mixed: both suppliers must have storage");
    }
    const double cap = s.price_cap;
    const double d = s.demand;
    const double y[2] = {s.suppliers[0].dist.mean(), s.suppliers[1].dist.mean()};
    if (!(std::min(y[0], y[1]) < d - kQtyTol) || !(d < y[0] + y[1] - kQtyTol)) {
        throw std::invalid_argument("s1s1_mixed: demand outside the mixed regime");
    }

    PriceEquilibrium eq;
    eq.kind = Regime::Mixed;
    eq.revenues.resize(2);
    for (int i = 0; i < 2; ++i) {
        const double yi = y[i], yo = y[1 - i];
        if (yi > yo + kQtyTol) {
            eq.revenues[i] = cap * (d - yo);
        } else {
            eq.revenues[i] = cap * (d - yi) * yi / std::min(yo, d);
        }
    }
    const double lower = eq.revenues[0] / std::min(d, y[0]);

    for (int i = 0; i < 2; ++i) {
        // Supplier i's CDF inverts the opponent's indifference condition;
        // with both quantities pinned at the means there is no penalty term.
        const double m = std::min(d, y[1 - i]);
        const double r = std::max(d - y[i], 0.0);
        const double c = eq.revenues[1 - i];
        MixedPriceCdf cdf;
        cdf.lower = lower;
        cdf.upper = cap;
        cdf.cdf_fn = [m, r, c](double p) { return (p * m - c) / (p * (m - r)); };
        cdf.pdf_fn = [m, r, c](double p) { return c / (p * p * (m - r)); };
        double at_cap = cdf.cdf_fn(cap);
        cdf.atom_at_cap = std::clamp(1.0 - at_cap, 0.0, 1.0);
        if (cdf.atom_at_cap < 1e-12) cdf.atom_at_cap = 0.0;
        eq.mixed.push_back(std::move(cdf));
    }
    for (int i = 0; i < 2; ++i) eq.expected_prices.push_back(eq.mixed[i].expected_price());
    return eq;
}

PriceEquilibrium s1s0_mixed(const MarketScenario& s) {
    s.validate();
    if (s.suppliers.size() != 2 || (s.suppliers[0].invests == s.suppliers[1].invests)) {
        throw std::invalid_argument("s1s0_mixed: exactly one supplier must have storage");
    }
    const std::size_t w = s.suppliers[0].invests ? 0 : 1;  // with storage
    const std::size_t nn = 1 - w;                          // without
    const SupplierSpec& sw = s.suppliers[w];
    const SupplierSpec& sn = s.suppliers[nn];
    const double cap = s.price_cap;
    const double lam = s.penalty;
    const double d = s.demand;

    // The stored CDF closures must own their data, so the without-storage
    // distribution is captured by value throughout.
    const GenerationDistribution dn = sn.dist;
    const double y_w = sw.dist.mean();
    const auto y_n = [dn, lam](double p) { return dn.inv_cdf(std::clamp(p / lam, 0.0, 1.0)); };
    if (!(d > 0.0) || !(d < y_w + y_n(cap) - kQtyTol)) {
        throw std::invalid_argument("s1s0_mixed: demand outside the mixed regime");
    }

    const double r = std::max(d - y_w, 0.0);  // leftover sold by n when undercut
    const auto a_of = [dn, lam, d, y_n](double p) {
        return supplier_revenue(p, std::min(y_n(p), d), false, dn, lam);
    };
    const auto b_of = [dn, lam, r](double p) { return supplier_revenue(p, r, false, dn, lam); };
    const double a_cap = a_of(cap);
    const double den_cap = a_cap - b_of(cap);
    if (!(den_cap > 0.0)) {
        throw std::runtime_error("s1s0_mixed: degenerate cap indifference denominator");
    }

    const double eps = 1e-9 * cap;
    // Root of F_w(cap^- | l) = 1, i.e. pi_n(l) = pi_n(cap bid, leftover).
    const auto g_w = [&](double l) { return (a_cap - a_of(l)) / den_cap - 1.0; };
    bool has_w_root = false;
    double l_w = 0.0;
    if (g_w(eps) >= 0.0 && g_w(cap - eps) < 0.0) {
        l_w = bisect(g_w, eps, cap - eps, 1e-10);
        has_w_root = true;
    }

    // Root of F_n(cap^- | l) = 1, with the CDF integral taken in closed form
    // per linear segment of the generation CDF.
    std::vector<double> n_kinks = quantity_kinks(sn, lam, cap);
    n_kinks.push_back(lam * dn.cdf(std::min(d, dn.support_max())));
    const double l_feas = r > 0.0 ? lam * dn.cdf(r) : 0.0;
    const double lo_n = std::max(eps, l_feas * (1.0 + 1e-12) + eps);
    const double num_factor = std::min(d, y_w);
    const std::vector<HSeg> segs = h_segments(dn, lam, d, r, std::min(lo_n, cap), cap);
    const auto g_n = [&](double l) {
        return fn_cdf_value(l, cap, l * num_factor, segs) - 1.0;
    };
    bool has_n_root = false;
    double l_n = 0.0;
    if (lo_n < cap - eps && g_n(lo_n) >= 0.0 && g_n(cap - eps) < 0.0) {
        l_n = bisect(g_n, lo_n, cap - eps, 1e-10);
        has_n_root = true;
    }

    if (!has_w_root && !has_n_root) {
        throw std::runtime_error("s1s0_mixed: no lower-support root for either supplier");
    }
    const double lower = has_w_root && has_n_root ? std::max(l_w, l_n)
                                                  : (has_w_root ? l_w : l_n);

    PriceEquilibrium eq;
    eq.kind = Regime::Mixed;
    eq.revenues.resize(2);
    eq.revenues[w] = lower * std::min(d, y_w);
    eq.revenues[nn] = a_of(lower);
    eq.mixed.resize(2);

    {
        // With-storage supplier's CDF from the without-storage indifference.
        const double c = eq.revenues[nn];
        MixedPriceCdf cdf;
        cdf.lower = lower;
        cdf.upper = cap;
        cdf.kinks = n_kinks;
        cdf.cdf_fn = [=](double p) {
            const double ap = a_of(p);
            return (ap - c) / (ap - b_of(p));
        };
        cdf.pdf_fn = [=](double p) {
            const double ap = a_of(p);
            const double bp = b_of(p);
            const double q = std::min(y_n(p), d);
            const double den = ap - bp;
            return (q * (c - bp) + r * (ap - c)) / (den * den);
        };
        double at_cap = cdf.cdf_fn(cap);
        cdf.atom_at_cap = std::clamp(1.0 - at_cap, 0.0, 1.0);
        if (cdf.atom_at_cap < 1e-9) cdf.atom_at_cap = 0.0;
        eq.mixed[w] = std::move(cdf);
    }
    {
        // Without-storage supplier's CDF: the segment-exact integral of the
        // indifference density.
        MixedPriceCdf cdf;
        cdf.lower = lower;
        cdf.upper = cap;
        cdf.kinks = n_kinks;
        const double num = lower * num_factor;
        cdf.pdf_fn = [y_n, d, r, num](double u) {
            const double h = std::min(y_n(u), d) - r;
            return num / (u * u * h);
        };
        cdf.cdf_fn = [segs, lower, num](double p) { return fn_cdf_value(lower, p, num, segs); };
        double at_cap = cdf.cdf_fn(cap);
        cdf.atom_at_cap = std::clamp(1.0 - at_cap, 0.0, 1.0);
        if (cdf.atom_at_cap < 1e-9) cdf.atom_at_cap = 0.0;
        eq.mixed[nn] = std::move(cdf);
    }
    for (int i = 0; i < 2; ++i) eq.expected_prices.push_back(eq.mixed[i].expected_price());
    return eq;
}

namespace {

struct GridGame {
    std::vector<double> grid;                 // Δp .. cap
    std::vector<std::vector<double>> qty;     // [supplier][price index]
    // payoff[i][a][b]: supplier i bidding grid[a] against the opponent at grid[b]
    std::vector<std::vector<std::vector<double>>> payoff;
};

GridGame build_grid_game(const MarketScenario& s, double price_step) {
    const double cap = s.price_cap;
    const double m_real = cap / price_step;
    const long m = std::lround(m_real);
    if (m < 2 || std::fabs(double(m) * price_step - cap) > 1e-9 * cap) {
        throw std::invalid_argument("price_step must divide the price cap");
    }
    GridGame g;
    g.grid.resize(std::size_t(m));
    for (long k = 0; k < m; ++k) g.grid[std::size_t(k)] = cap * double(k + 1) / double(m);
    g.grid.back() = cap;

    g.qty.assign(2, std::vector<double>(g.grid.size()));
    for (int i = 0; i < 2; ++i) {
        for (std::size_t k = 0; k < g.grid.size(); ++k) {
            g.qty[i][k] = dominant_quantity(g.grid[k], s.suppliers[i].invests,
                                            s.suppliers[i].dist, s.penalty);
        }
    }

    const std::size_t n = g.grid.size();
    g.payoff.assign(2, std::vector<std::vector<double>>(n, std::vector<double>(n)));
    for (std::size_t a = 0; a < n; ++a) {
        // Tie cell once per price level.
        const std::vector<Bid> tie_bids = {{g.grid[a], g.qty[0][a]}, {g.grid[a], g.qty[1][a]}};
        const Allocation tie = allocate_demand(tie_bids, s.demand, s);
        for (int i = 0; i < 2; ++i) {
            g.payoff[i][a][a] = supplier_revenue(g.grid[a], tie.purchased[std::size_t(i)],
                                                 s.suppliers[i].invests, s.suppliers[i].dist,
                                                 s.penalty);
        }
        for (std::size_t b = 0; b < n; ++b) {
            if (b == a) continue;
            for (int i = 0; i < 2; ++i) {
                const int o = 1 - i;
                double x;
                if (a < b) {
                    x = std::min(s.demand, g.qty[i][a]);
                } else {
                    const double leftover = std::max(s.demand - std::min(s.demand, g.qty[o][b]), 0.0);
                    x = std::min(leftover, g.qty[i][a]);
                }
                g.payoff[i][a][b] = supplier_revenue(g.grid[a], x, s.suppliers[i].invests,
                                                     s.suppliers[i].dist, s.penalty);
            }
        }
    }
    return g;
}

// Solve the indifference system of `who` on the given support: returns the
// opponent's masses plus the constant value, or empty on a singular system.
std::vector<double> indifference_solve(const GridGame& g, int who,
                                       const std::vector<std::size_t>& support) {
    const std::size_t k = support.size();
    std::vector<std::vector<double>> mat(k + 1, std::vector<double>(k + 1, 0.0));
    std::vector<double> rhs(k + 1, 0.0);
    for (std::size_t row = 0; row < k; ++row) {
        for (std::size_t col = 0; col < k; ++col) {
            mat[row][col] = g.payoff[who][support[row]][support[col]];
        }
        mat[row][k] = -1.0;  // minus the value
    }
    for (std::size_t col = 0; col < k; ++col) mat[k][col] = 1.0;
    rhs[k] = 1.0;
    try {
        return solve_linear(std::move(mat), std::move(rhs));
    } catch (const std::runtime_error&) {
        return {};
    }
}

}  // namespace

PriceEquilibrium mixed_discretized(const MarketScenario& s, double price_step) {
    s.validate();
    if (s.suppliers.size() != 2) {
        throw std::invalid_argument("mixed_discretized: duopoly solver");
    }
    if (!(price_step > 0.0)) throw std::invalid_argument("mixed_discretized: price_step <= 0");
    const GridGame g = build_grid_game(s, price_step);
    const std::size_t n = g.grid.size();
    const double d = s.demand;
    if (!(d < g.qty[0].back() + g.qty[1].back() - kQtyTol)) {
        throw std::invalid_argument("mixed_discretized: demand outside the mixed regime");
    }
    const double gain_slack = d * price_step + 1e-9;

    for (std::size_t j = 0; j + 1 < n; ++j) {
        // Candidate lower supports restricted to the feasible range:
        // min_i y_i(l) < D <= sum_i y_i(l).
        const double min_y = std::min(g.qty[0][j], g.qty[1][j]);
        const double sum_y = g.qty[0][j] + g.qty[1][j];
        if (!(min_y < d - kQtyTol)) continue;
        if (!(d <= sum_y + kQtyTol)) continue;

        std::vector<std::size_t> support;
        for (std::size_t t = j; t < n; ++t) support.push_back(t);

        for (int attempt = 0; attempt < 2; ++attempt) {
            std::vector<double> sol1 = indifference_solve(g, 0, support);  // masses of supplier 2
            std::vector<double> sol2 = indifference_solve(g, 1, support);  // masses of supplier 1
            if (sol1.empty() || sol2.empty()) break;
            const std::size_t k = support.size();

            bool ok = true;
            bool prunable = false;
            std::vector<std::size_t> pruned;
            for (std::size_t t = 0; t < k; ++t) {
                const double q2 = sol1[t], q1 = sol2[t];
                const bool zero2 = std::fabs(q2) <= 1e-9;
                const bool zero1 = std::fabs(q1) <= 1e-9;
                if (zero1 || zero2) {
                    prunable = true;
                    continue;
                }
                pruned.push_back(support[t]);
                if (q2 <= 1e-9 || q2 >= 1.0 - 1e-12 || q1 <= 1e-9 || q1 >= 1.0 - 1e-12) ok = false;
            }
            if (!ok) break;
            if (prunable) {
                if (attempt == 1 || pruned.size() < 2) break;
                support = std::move(pruned);  // drop boundary-zero masses, re-solve once
                continue;
            }

            // No grid price (inside or outside the support) may beat the
            // indifference value by more than the grid Lipschitz slack.
            const double v1 = sol1[k], v2 = sol2[k];
            double worst = 0.0;
            for (std::size_t a = 0; a < n; ++a) {
                double e1 = 0.0, e2 = 0.0;
                for (std::size_t t = 0; t < k; ++t) {
                    e1 += sol1[t] * g.payoff[0][a][support[t]];
                    e2 += sol2[t] * g.payoff[1][a][support[t]];
                }
                worst = std::max(worst, std::max(e1 - v1, e2 - v2));
            }
            if (worst > gain_slack) break;

            PriceEquilibrium eq;
            eq.kind = Regime::Mixed;
            eq.mixed.resize(2);
            const double lower = g.grid[support.front()];
            for (int i = 0; i < 2; ++i) {
                MixedPriceCdf cdf;
                cdf.lower = lower;
                cdf.upper = s.price_cap;
                for (std::size_t t = 0; t < k; ++t) {
                    cdf.support.push_back(g.grid[support[t]]);
                    cdf.mass.push_back(i == 0 ? sol2[t] : sol1[t]);
                }
                if (support.back() == n - 1) cdf.atom_at_cap = cdf.mass.back();
                eq.mixed[i] = std::move(cdf);
            }
            for (int i = 0; i < 2; ++i) {
                const double yl = g.qty[i][support.front()];
                eq.revenues.push_back(supplier_revenue(lower, std::min(d, yl),
                                                       s.suppliers[i].invests, s.suppliers[i].dist,
                                                       s.penalty));
                eq.expected_prices.push_back(eq.mixed[i].expected_price());
            }
            return eq;
        }
    }
    throw std::runtime_error("mixed_discretized: no feasible lower support on the grid "
                             "(price step too coarse)");
}

PriceEquilibrium s0s0_mixed_discretized(const MarketScenario& s, double price_step) {
    if (s.suppliers.size() != 2 || s.suppliers[0].invests || s.suppliers[1].invests) {
        throw std::invalid_argument("s0s0_mixed_discretized: neither supplier may have storage");
    }
    return mixed_discretized(s, price_step);
}

PriceEquilibrium solve_stage2(const MarketScenario& s, double price_step) {
    if (s.suppliers.size() != 2) {
        throw std::invalid_argument("solve_stage2: duopoly solver; use oligopoly_pure_check");
    }
    if (auto pure = pure_equilibrium(s)) return *pure;
    const int investors = int(s.suppliers[0].invests) + int(s.suppliers[1].invests);
    if (investors == 2) return s1s1_mixed(s);
    if (investors == 1) return s1s0_mixed(s);
    return s0s0_mixed_discretized(s, price_step);
}

double expected_revenue_vs_mixed(double price, std::size_t own, const MixedPriceCdf& opponent,
                                 const MarketScenario& s) {
    if (s.suppliers.size() != 2 || own > 1) {
        throw std::invalid_argument("expected_revenue_vs_mixed: duopoly only");
    }
    const std::size_t opp = 1 - own;
    const SupplierSpec& mine = s.suppliers[own];
    const SupplierSpec& other = s.suppliers[opp];
    const double d = s.demand;
    const double lam = s.penalty;
    const double ptol = 1e-9 * std::max(1.0, s.price_cap);

    const double y_own = dominant_quantity(price, mine.invests, mine.dist, lam);
    const auto y_opp = [&](double p) { return dominant_quantity(p, other.invests, other.dist, lam); };
    const auto rev = [&](double x) { return supplier_revenue(price, x, mine.invests, mine.dist, lam); };
    const auto leftover_rev = [&](double opp_price) {
        const double leftover = std::max(d - std::min(d, y_opp(opp_price)), 0.0);
        return rev(std::min(leftover, y_own));
    };

    double below = 0.0, at = 0.0, lose_sum = 0.0;
    if (opponent.discrete()) {
        for (std::size_t k = 0; k < opponent.support.size(); ++k) {
            const double u = opponent.support[k];
            if (u < price - ptol) {
                below += opponent.mass[k];
                lose_sum += opponent.mass[k] * leftover_rev(u);
            } else if (u <= price + ptol) {
                at += opponent.mass[k];
            }
        }
    } else {
        if (price <= opponent.lower + ptol) {
            below = 0.0;
        } else {
            const double hi = std::min(price, opponent.upper);
            below = opponent.cdf_left(price);
            std::vector<double> splits = opponent.kinks;
            splits.push_back(lam * other.dist.cdf(std::min(d, other.dist.support_max())));
            if (d - y_own > 0.0 && d - y_own <= other.dist.support_max()) {
                splits.push_back(lam * other.dist.cdf(d - y_own));
            }
            lose_sum = integrate_with_splits(
                [&](double u) { return leftover_rev(u) * opponent.pdf_fn(u); },
                opponent.lower, hi, splits, 1e-10);
        }
        if (price >= opponent.upper - ptol) at = opponent.atom_at_cap;
    }

    double total = rev(std::min(d, y_own)) * std::max(1.0 - below - at, 0.0) + lose_sum;
    if (at > 0.0) {
        std::vector<Bid> bids(2);
        bids[own] = {price, y_own};
        bids[opp] = {price, y_opp(price)};
        const Allocation tie = allocate_demand(bids, d, s);
        total += at * rev(tie.purchased[own]);
    }
    return total;
}

OligopolyCheck oligopoly_pure_check(const MarketScenario& s) {
    OligopolyCheck out;
    out.regime = classify_regime(s);
    if (out.regime == Regime::Mixed) {
        out.mixed_exists = true;  // finite-game existence; CDFs not computed
        return out;
    }
    out.equilibrium = pure_equilibrium(s);
    return out;
}

}  // namespace lem
