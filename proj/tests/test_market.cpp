#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "lem/market.hpp"

using lem::Allocation;
using lem::Bid;
using lem::GenerationDistribution;
using lem::MarketScenario;
using lem::SupplierSpec;

namespace {

double saving_value(const std::vector<Bid>& bids, const std::vector<double>& x, double grid_price) {
    double v = 0.0;
    for (std::size_t i = 0; i < bids.size(); ++i) v += (grid_price - bids[i].price) * x[i];
    return v;
}

// LP oracle over the vertices of {0 <= x <= y, sum x <= D}: each coordinate
// is at a bound except at most one, which absorbs the demand residue.
double lp_optimum(const std::vector<Bid>& bids, double demand, double grid_price) {
    const std::size_t n = bids.size();
    double best = 0.0;
    for (unsigned at_cap = 0; at_cap < (1u << n); ++at_cap) {
        double base = 0.0;
        std::vector<double> x(n, 0.0);
        bool feasible = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (at_cap & (1u << i)) x[i] = bids[i].quantity;
            base += x[i];
        }
        if (base > demand + 1e-9) feasible = false;
        if (feasible) best = std::max(best, saving_value(bids, x, grid_price));
        for (std::size_t frac = 0; frac < n && feasible; ++frac) {
            if (at_cap & (1u << frac)) continue;
            std::vector<double> xv = x;
            xv[frac] = std::min(bids[frac].quantity, demand - base);
            if (xv[frac] < 0.0) continue;
            best = std::max(best, saving_value(bids, xv, grid_price));
        }
    }
    return best;
}

MarketScenario two_supplier_scenario(bool invests1, bool invests2,
                                     GenerationDistribution d1, GenerationDistribution d2,
                                     double cap, double penalty, double demand) {
    MarketScenario s;
    s.price_cap = cap;
    s.penalty = penalty;
    s.grid_price = cap * 1.2 + 0.01;
    s.demand = demand;
    s.suppliers = {{0, invests1, std::move(d1)}, {1, invests2, std::move(d2)}};
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("market");

TEST_CASE("cheaper supplier is saturated first") {
    const Allocation a = lem::allocate_demand({{0.5, 2.0}, {0.8, 2.0}}, 3.0);
    CHECK(a.purchased[0] == doctest::Approx(2.0));
    CHECK(a.purchased[1] == doctest::Approx(1.0));

    const Allocation b = lem::allocate_demand({{0.5, 5.0}, {0.8, 5.0}}, 3.0);
    CHECK(b.purchased[0] == doctest::Approx(3.0));
    CHECK(b.purchased[1] == doctest::Approx(0.0));
}

TEST_CASE("ample demand buys every bid in full") {
    const Allocation a = lem::allocate_demand({{0.9, 1.0}, {0.1, 2.5}, {0.4, 0.7}}, 10.0);
    CHECK(a.purchased[0] == doctest::Approx(1.0));
    CHECK(a.purchased[1] == doctest::Approx(2.5));
    CHECK(a.purchased[2] == doctest::Approx(0.7));
}

TEST_CASE("allocation solves the cost-saving LP on random instances") {
    std::mt19937_64 rng(23);
    const double grid_price = 2.0;
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t n = 2 + rng() % 3;
        std::vector<Bid> bids;
        for (std::size_t i = 0; i < n; ++i) {
            const double price = 0.1 * double(1 + rng() % 15);  // quantized: ties occur
            const double qty = 0.25 * double(rng() % 13);
            bids.push_back({price, qty});
        }
        const double demand = 0.25 * double(1 + rng() % 20);
        const Allocation a = lem::allocate_demand(bids, demand);

        double total = 0.0, total_qty = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(a.purchased[i] >= -1e-12);
            CHECK(a.purchased[i] <= bids[i].quantity + 1e-12);
            total += a.purchased[i];
            total_qty += bids[i].quantity;
        }
        CHECK(total == doctest::Approx(std::min(demand, total_qty)).epsilon(1e-12));
        CHECK(saving_value(bids, a.purchased, grid_price) ==
              doctest::Approx(lp_optimum(bids, demand, grid_price)).epsilon(1e-9));
    }
}

TEST_CASE("price ties without supplier context average the saturation orders") {
    const Allocation a = lem::allocate_demand({{0.5, 2.0}, {0.5, 2.0}}, 3.0);
    CHECK(a.purchased[0] == doctest::Approx(1.5));
    CHECK(a.purchased[1] == doctest::Approx(1.5));
}

TEST_CASE("price ties with supplier context pick the revenue-maximizing order") {
    // Storage supplier sells penalty-free; handing it the full demand first
    // strictly beats the reverse order.
    const auto s = two_supplier_scenario(true, false, GenerationDistribution::point_mass(2.0),
                                         GenerationDistribution::uniform(0.0, 1.0), 0.9, 1.0, 2.2);
    const std::vector<Bid> bids = {{0.5, 2.0}, {0.5, 0.5}};
    const Allocation a = lem::allocate_demand(bids, 2.2, s);
    CHECK(a.purchased[0] == doctest::Approx(2.0));
    CHECK(a.purchased[1] == doctest::Approx(0.2));

    // Identical suppliers tie exactly: allocations are averaged.
    const auto sym = two_supplier_scenario(true, true, GenerationDistribution::point_mass(2.0),
                                           GenerationDistribution::point_mass(2.0), 0.9, 1.0, 3.0);
    const Allocation b = lem::allocate_demand({{0.5, 2.0}, {0.5, 2.0}}, 3.0, sym);
    CHECK(b.purchased[0] == doctest::Approx(1.5));
    CHECK(b.purchased[1] == doctest::Approx(1.5));
}

TEST_CASE("dominant quantity") {
    const auto u = GenerationDistribution::uniform(0.0, 1.0);
    const auto three = GenerationDistribution::point_mass(3.0);
    CHECK(lem::dominant_quantity(0.7, true, three, 2.0) == doctest::Approx(3.0));
    CHECK(lem::dominant_quantity(0.5, false, u, 1.0) == doctest::Approx(0.5));
    CHECK(lem::dominant_quantity(0.0, false, u, 1.0) == doctest::Approx(0.0));

    double prev = -1.0;
    for (double p = 0.0; p <= 0.9; p += 0.01) {
        const double q = lem::dominant_quantity(p, false, u, 1.0);
        CHECK(q >= prev);
        prev = q;
        CHECK(q < u.support_max());
    }
}

TEST_CASE("supplier revenue") {
    const auto u = GenerationDistribution::uniform(0.0, 1.0);
    const auto three = GenerationDistribution::point_mass(3.0);
    CHECK(lem::supplier_revenue(1.0, 2.0, true, three, 2.0) == doctest::Approx(2.0));
    CHECK(lem::supplier_revenue(1.0, 4.0, true, three, 2.0) == doctest::Approx(2.0));
    CHECK(lem::supplier_revenue(0.5, 1.0, false, u, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("revenue is maximized at the dominant quantity") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> unif(0.0, 2.0);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<double> samples;
        for (int k = 0; k < 21; ++k) samples.push_back(unif(rng));
        const auto d = GenerationDistribution::from_samples(samples);
        const double penalty = 1.5;
        for (double price : {0.1, 0.4, 0.8, 1.2}) {
            for (bool invests : {false, true}) {
                const double y_star = lem::dominant_quantity(price, invests, d, penalty);
                const double peak = lem::supplier_revenue(price, y_star, invests, d, penalty);
                for (int k = 0; k <= 100; ++k) {
                    const double x = 2.0 * d.support_max() * double(k) / 100.0;
                    CHECK(lem::supplier_revenue(price, x, invests, d, penalty) <= peak + 1e-9);
                }
            }
        }
    }
}

TEST_CASE("no-storage revenue is concave in the quantity") {
    const auto d = GenerationDistribution::from_samples({0.0, 0.4, 1.1, 1.5, 2.0});
    const double price = 0.6, penalty = 1.2;
    const int n = 120;
    std::vector<double> rev(std::size_t(n) + 1);
    for (int k = 0; k <= n; ++k) {
        rev[std::size_t(k)] = lem::supplier_revenue(price, 2.5 * k / n, false, d, penalty);
    }
    for (int k = 1; k < n; ++k) {
        CHECK(rev[std::size_t(k + 1)] - 2.0 * rev[std::size_t(k)] + rev[std::size_t(k - 1)] <=
              1e-9);
    }
}

TEST_CASE("scenario validation") {
    auto s = two_supplier_scenario(true, true, GenerationDistribution::point_mass(1.0),
                                   GenerationDistribution::point_mass(1.0), 1.0, 1.5, 1.0);
    CHECK_NOTHROW(s.validate());
    s.penalty = 0.9;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.penalty = 1.5;
    s.grid_price = 0.5;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_SUITE_END();
