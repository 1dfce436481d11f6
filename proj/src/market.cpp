#include "lem/market.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lem {

namespace {

constexpr double kTieTol = 1e-12;

std::vector<double> saturate(const std::vector<Bid>& bids, const std::vector<std::size_t>& order,
                             double demand) {
    std::vector<double> x(bids.size(), 0.0);
    double left = demand;
    for (std::size_t idx : order) {
        const double take = std::min(left, bids[idx].quantity);
        x[idx] = take;
        left -= take;
    }
    return x;
}

double group_revenue(const std::vector<Bid>& bids, const std::vector<double>& x,
                     const std::vector<std::size_t>& group, const MarketScenario* scenario) {
    if (!scenario) return 0.0;
    double total = 0.0;
    for (std::size_t idx : group) {
        const SupplierSpec& s = scenario->suppliers[idx];
        total += supplier_revenue(bids[idx].price, x[idx], s.invests, s.dist, scenario->penalty);
    }
    return total;
}

Allocation allocate_impl(const std::vector<Bid>& bids, double demand,
                         const MarketScenario* scenario) {
    if (demand <= 0.0) throw std::invalid_argument("allocate_demand: demand must be positive");
    for (const Bid& b : bids) {
        if (b.price < -kTieTol || b.quantity < -kTieTol) {
            throw std::invalid_argument("allocate_demand: negative bid");
        }
    }
    std::vector<std::size_t> order(bids.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return bids[a].price < bids[b].price;
    });

    std::vector<double> x(bids.size(), 0.0);
    double left = demand;
    std::size_t pos = 0;
    while (pos < order.size() && left > kTieTol) {
        // Collect the tied group starting at pos.
        std::size_t end = pos + 1;
        while (end < order.size() &&
               std::fabs(bids[order[end]].price - bids[order[pos]].price) <= kTieTol) {
            ++end;
        }
        std::vector<std::size_t> group(order.begin() + pos, order.begin() + end);
        if (group.size() == 1) {
            const double take = std::min(left, bids[group[0]].quantity);
            x[group[0]] = take;
            left -= take;
        } else {
            if (group.size() > 7) {
                throw std::invalid_argument("allocate_demand: too many tied suppliers");
            }
            // Enumerate saturation orders of the tied group, keep the
            // revenue-maximizing ones, average their allocations.
            std::sort(group.begin(), group.end());
            std::vector<std::vector<double>> best;
            double best_rev = -1e300;
            std::vector<std::size_t> perm = group;
            do {
                std::vector<double> gx = saturate(bids, perm, left);
                const double rev = group_revenue(bids, gx, group, scenario);
                if (rev > best_rev + kTieTol) {
                    best_rev = rev;
                    best.clear();
                    best.push_back(std::move(gx));
                } else if (rev >= best_rev - kTieTol) {
                    best.push_back(std::move(gx));
                }
            } while (std::next_permutation(perm.begin(), perm.end()));
            double taken = 0.0;
            for (std::size_t idx : group) {
                double avg = 0.0;
                for (const auto& gx : best) avg += gx[idx];
                avg /= double(best.size());
                x[idx] = avg;
                taken += avg;
            }
            left -= taken;
        }
        pos = end;
    }
    return Allocation{std::move(x)};
}

}  // namespace

void MarketScenario::validate() const {
    if (!(price_cap > 0.0) || !(price_cap < grid_price)) {
        throw std::invalid_argument("MarketScenario: need 0 < price_cap < grid_price");
    }
    if (!(penalty > price_cap)) {
        throw std::invalid_argument("MarketScenario: need penalty > price_cap");
    }
    if (!(demand > 0.0)) {
        throw std::invalid_argument("MarketScenario: need demand > 0");
    }
    if (suppliers.size() < 2) {
        throw std::invalid_argument("MarketScenario: need at least two suppliers");
    }
}

Allocation allocate_demand(const std::vector<Bid>& bids, double demand) {
    return allocate_impl(bids, demand, nullptr);
}

Allocation allocate_demand(const std::vector<Bid>& bids, double demand,
                           const MarketScenario& scenario) {
    if (scenario.suppliers.size() != bids.size()) {
        throw std::invalid_argument("allocate_demand: bids/suppliers size mismatch");
    }
    return allocate_impl(bids, demand, &scenario);
}

double dominant_quantity(double price, bool invests, const GenerationDistribution& dist,
                         double penalty) {
    if (invests) return dist.mean();
    return dist.inv_cdf(std::clamp(price / penalty, 0.0, 1.0));
}

double supplier_revenue(double price, double sold, bool invests,
                        const GenerationDistribution& dist, double penalty) {
    if (sold < 0.0) throw std::invalid_argument("supplier_revenue: negative quantity");
    if (invests) {
        return price * sold - penalty * std::max(sold - dist.mean(), 0.0);
    }
    return price * sold - penalty * dist.expected_shortfall(sold);
}

}  // namespace lem
