#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "lem/market.hpp"

namespace lem {

enum class Regime { PureCap, PureZero, Mixed };

const char* regime_name(Regime r);

// One supplier's mixed price strategy on [lower, upper]: a continuous part
// over [lower, upper) plus an optional atom at the cap. Analytic equilibria
// carry closed-form cdf/pdf callables; grid equilibria carry a discrete
// support with point masses.
struct MixedPriceCdf {
    double lower = 0.0;
    double upper = 0.0;  // the price cap
    double atom_at_cap = 0.0;

    std::function<double(double)> cdf_fn;  // continuous part, valid on [lower, upper)
    std::function<double(double)> pdf_fn;  // its density (analytic equilibria only)
    std::vector<double> kinks;             // density kink points, for quadrature splits

    std::vector<double> support;  // discrete representation (grid equilibria)
    std::vector<double> mass;

    bool discrete() const { return !support.empty(); }
    // F(p^-): probability of prices strictly below p (up to the continuous
    // part's continuity; excludes the cap atom for p <= upper).
    double cdf_left(double p) const;
    // F(p): includes the cap atom once p >= upper.
    double cdf(double p) const;
    // Mean bidding price, cap atom included.
    double expected_price() const;
};

struct PriceEquilibrium {
    Regime kind = Regime::Mixed;
    std::vector<double> prices;           // pure equilibria only
    std::vector<MixedPriceCdf> mixed;     // mixed equilibria only
    std::vector<double> revenues;         // pi_i^RE
    std::vector<double> expected_prices;  // pure price, or mixture mean
};

// Pure-equilibrium classification per demand thresholds (duopoly and
// oligopoly alike): cap equilibrium when demand covers every maximum bid,
// zero-price equilibrium when the with-storage set saturates demand even
// with any one member removed, mixed otherwise.
Regime classify_regime(const MarketScenario& scenario);

// The pure equilibrium where one exists (PureCap / PureZero), absent in the
// mixed regime. Works for any number of suppliers.
std::optional<PriceEquilibrium> pure_equilibrium(const MarketScenario& scenario);

// Closed-form mixed equilibrium when both suppliers have storage.
PriceEquilibrium s1s1_mixed(const MarketScenario& scenario);

// Mixed equilibrium when exactly one supplier has storage: the common lower
// support is found by root-finding on the indifference CDFs, the CDFs
// themselves are analytic.
PriceEquilibrium s1s0_mixed(const MarketScenario& scenario);

// Grid approximation of the mixed equilibrium: scans candidate lower
// supports, solving the linear indifference system on each support and
// accepting the candidate with a valid probability vector. Works for any
// duopoly profile; s0s0_mixed_discretized restricts it to the no-storage
// subgame.
PriceEquilibrium mixed_discretized(const MarketScenario& scenario, double price_step);
PriceEquilibrium s0s0_mixed_discretized(const MarketScenario& scenario, double price_step);

// Dispatch: pure where it exists, else the closed-form / analytic / grid
// solver appropriate for the investment profile.
PriceEquilibrium solve_stage2(const MarketScenario& scenario, double price_step);

// Expected revenue of supplier `own` bidding a fixed price against the
// opponent's mixed strategy; the verification identity for every mixed
// output (constant on the support, no better off it).
double expected_revenue_vs_mixed(double price, std::size_t own, const MixedPriceCdf& opponent,
                                 const MarketScenario& scenario);

struct OligopolyCheck {
    Regime regime = Regime::Mixed;
    std::optional<PriceEquilibrium> equilibrium;  // set for the pure regimes
    bool mixed_exists = false;                    // set in the mixed regime
};

// N-supplier pure-equilibrium classification; mixed CDFs are not computed.
OligopolyCheck oligopoly_pure_check(const MarketScenario& scenario);

}  // namespace lem
