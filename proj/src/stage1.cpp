#include "lem/stage1.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lem/numeric.hpp"

namespace lem {

std::size_t ScenarioFamily::supplier_count() const {
    if (cells.empty() || cells.front().empty()) return 0;
    return cells.front().front().dists.size();
}

void ScenarioFamily::validate() const {
    weights.validate();
    if (cells.size() != weights.month_probabilities.size()) {
        throw std::invalid_argument("ScenarioFamily: cell rows must match month weights");
    }
    const std::size_t n = supplier_count();
    if (n < 2) throw std::invalid_argument("ScenarioFamily: need at least two suppliers");
    for (const auto& row : cells) {
        if (row.size() != std::size_t(weights.hours_per_day)) {
            throw std::invalid_argument("ScenarioFamily: cell columns must match hours_per_day");
        }
        for (const auto& cell : row) {
            if (cell.dists.size() != n) {
                throw std::invalid_argument("ScenarioFamily: inconsistent supplier count");
            }
            if (!(cell.demand > 0.0)) {
                throw std::invalid_argument("ScenarioFamily: nonpositive demand in a cell");
            }
        }
    }
}

MarketScenario ScenarioFamily::scenario(std::size_t month, std::size_t hour,
                                        const std::vector<bool>& invests) const {
    const MarketCell& cell = cells.at(month).at(hour);
    MarketScenario s;
    s.price_cap = price_cap;
    s.penalty = penalty;
    s.grid_price = grid_price;
    s.demand = cell.demand;
    s.suppliers.resize(cell.dists.size());
    for (std::size_t i = 0; i < cell.dists.size(); ++i) {
        s.suppliers[i] = SupplierSpec{int(i), invests[i], cell.dists[i]};
    }
    return s;
}

StageTwoAverages expected_subgame_summary(const ScenarioFamily& family, double price_step,
                                          int threads) {
    family.validate();
    if (family.supplier_count() != 2) {
        throw std::invalid_argument("expected_subgame_summary: duopoly only");
    }
    const std::size_t months = family.cells.size();
    const std::size_t hours = family.cells.front().size();
    const std::size_t jobs = months * hours * 4;

    struct CellResult {
        std::array<double, 2> revenue{};
        std::array<double, 2> eprice{};
    };
    std::vector<CellResult> results(jobs);

    parallel_for(jobs, threads, [&](std::size_t idx) {
        const std::size_t profile = idx % 4;
        const std::size_t cell = idx / 4;
        const std::size_t m = cell / hours;
        const std::size_t t = cell % hours;
        const std::vector<bool> invests = {(profile & 2u) != 0, (profile & 1u) != 0};
        try {
            const PriceEquilibrium eq =
                solve_stage2(family.scenario(m, t, invests), price_step);
            results[idx].revenue = {eq.revenues[0], eq.revenues[1]};
            results[idx].eprice = {eq.expected_prices[0], eq.expected_prices[1]};
        } catch (const std::exception& e) {
            throw std::runtime_error("stage2 failed at month " + std::to_string(m + 1) +
                                     ", hour " + std::to_string(t + 1) + ", profile (" +
                                     std::to_string(int(invests[0])) + "," +
                                     std::to_string(int(invests[1])) + "): " + e.what());
        }
    });

    StageTwoAverages out;
    std::array<std::array<double, 2>, 4> rev{};
    const double hour_w = 1.0 / double(hours);
    for (std::size_t m = 0; m < months; ++m) {
        const double w = family.weights.month_probabilities[m] * hour_w;
        for (std::size_t t = 0; t < hours; ++t) {
            for (std::size_t profile = 0; profile < 4; ++profile) {
                const CellResult& r = results[(m * hours + t) * 4 + profile];
                for (int i = 0; i < 2; ++i) {
                    rev[profile][std::size_t(i)] += w * r.revenue[std::size_t(i)];
                    out.expected_prices[profile][std::size_t(i)] += w * r.eprice[std::size_t(i)];
                }
            }
        }
    }
    // Profile encoding: phi1*2 + phi2.
    out.revenues.s0s0 = rev[0];
    out.revenues.s1s1 = rev[3];
    out.revenues.s1s0_with = {rev[2][0], rev[1][1]};
    out.revenues.s1s0_without = {rev[1][0], rev[2][1]};
    return out;
}

SubgameRevenues expected_subgame_revenues(const ScenarioFamily& family, double price_step,
                                          int threads) {
    return expected_subgame_summary(family, price_step, threads).revenues;
}

ProfitMatrix profit_matrix(const SubgameRevenues& rev, const std::array<double, 2>& costs) {
    if (costs[0] < 0.0 || costs[1] < 0.0) {
        throw std::invalid_argument("profit_matrix: negative storage cost");
    }
    ProfitMatrix m;
    m.payoff[0][1][1] = rev.s1s1[0] - costs[0];
    m.payoff[1][1][1] = rev.s1s1[1] - costs[1];
    m.payoff[0][1][0] = rev.s1s0_with[0] - costs[0];
    m.payoff[1][1][0] = rev.s1s0_without[1];
    m.payoff[0][0][1] = rev.s1s0_without[0];
    m.payoff[1][0][1] = rev.s1s0_with[1] - costs[1];
    m.payoff[0][0][0] = rev.s0s0[0];
    m.payoff[1][0][0] = rev.s0s0[1];
    return m;
}

std::vector<std::array<int, 2>> pure_investment_equilibria(const ProfitMatrix& m) {
    std::vector<std::array<int, 2>> out;
    for (int a = 0; a <= 1; ++a) {
        for (int b = 0; b <= 1; ++b) {
            const bool ok1 = m.payoff[0][a][b] >= m.payoff[0][1 - a][b];
            const bool ok2 = m.payoff[1][a][b] >= m.payoff[1][a][1 - b];
            if (ok1 && ok2) out.push_back({a, b});
        }
    }
    return out;
}

std::vector<std::array<int, 2>> pure_equilibria_from_conditions(const SubgameRevenues& rev,
                                                                const std::array<double, 2>& costs) {
    // Closed interval conditions on the storage cost, per supplier:
    //   invest-benefit against a non-investor:   B_i = pi^{S1S0|Y} - pi^{S0S0}
    //   invest-benefit against an investor:      A_i = pi^{S1S1}  - pi^{S1S0|N}
    const std::array<double, 2> b = {rev.s1s0_with[0] - rev.s0s0[0],
                                     rev.s1s0_with[1] - rev.s0s0[1]};
    const std::array<double, 2> a = {rev.s1s1[0] - rev.s1s0_without[0],
                                     rev.s1s1[1] - rev.s1s0_without[1]};
    std::vector<std::array<int, 2>> out;
    if (costs[0] >= b[0] && costs[1] >= b[1]) out.push_back({0, 0});
    if (costs[1] <= b[1] && costs[0] >= a[0]) out.push_back({0, 1});
    if (costs[0] <= b[0] && costs[1] >= a[1]) out.push_back({1, 0});
    if (costs[0] <= a[0] && costs[1] <= a[1]) out.push_back({1, 1});
    return out;
}

MixedInvestment mixed_investment_equilibrium(const ProfitMatrix& m) {
    MixedInvestment out;
    // Supplier i's indifference pins the opponent's invest probability.
    std::array<double, 2> q{};
    bool degenerate = false;
    for (int i = 0; i < 2; ++i) {
        double invest_vs_s, invest_vs_n, skip_vs_s, skip_vs_n;
        if (i == 0) {
            invest_vs_s = m.payoff[0][1][1];
            invest_vs_n = m.payoff[0][1][0];
            skip_vs_s = m.payoff[0][0][1];
            skip_vs_n = m.payoff[0][0][0];
        } else {
            invest_vs_s = m.payoff[1][1][1];
            invest_vs_n = m.payoff[1][0][1];
            skip_vs_s = m.payoff[1][1][0];
            skip_vs_n = m.payoff[1][0][0];
        }
        const double den = (invest_vs_s - invest_vs_n) - (skip_vs_s - skip_vs_n);
        const double num = skip_vs_n - invest_vs_n;
        if (std::fabs(den) < 1e-12) {
            if (std::fabs(num) < 1e-12) {
                degenerate = true;  // indifferent for any opponent mixture
                q[std::size_t(1 - i)] = 0.5;
                continue;
            }
            return out;  // unsolvable: a strict dominant strategy exists
        }
        q[std::size_t(1 - i)] = num / den;
    }
    if (degenerate) {
        out.degenerate = true;
        out.invest_prob = q;
        return out;
    }
    if (q[0] < 0.0 || q[0] > 1.0 || q[1] < 0.0 || q[1] > 1.0) return out;
    out.exists = true;
    out.invest_prob = q;
    return out;
}

InvestmentEquilibrium solve_stage1(const ProfitMatrix& m) {
    InvestmentEquilibrium out;
    out.pure = pure_investment_equilibria(m);
    out.mixed = mixed_investment_equilibrium(m);
    return out;
}

double high_demand_threshold(const ScenarioFamily& family, std::size_t month, std::size_t hour) {
    const MarketCell& cell = family.cells.at(month).at(hour);
    double sum = 0.0;
    for (const auto& dist : cell.dists) {
        const double with = dist.mean();
        const double without = dist.inv_cdf(family.price_cap / family.penalty);
        sum += std::max(with, without);
    }
    return sum;
}

double dominant_strategy_threshold(const ScenarioFamily& family, std::size_t supplier) {
    family.validate();
    if (supplier >= family.supplier_count()) {
        throw std::invalid_argument("dominant_strategy_threshold: bad supplier index");
    }
    const double hour_w = 1.0 / double(family.weights.hours_per_day);
    double threshold = 0.0;
    for (std::size_t m = 0; m < family.cells.size(); ++m) {
        for (std::size_t t = 0; t < family.cells[m].size(); ++t) {
            const MarketCell& cell = family.cells[m][t];
            if (cell.demand < high_demand_threshold(family, m, t) - 1e-12) {
                throw std::invalid_argument(
                    "dominant_strategy_threshold: demand below the high-demand threshold at "
                    "month " + std::to_string(m + 1) + ", hour " + std::to_string(t + 1));
            }
            const GenerationDistribution& dist = cell.dists[supplier];
            const double q = dist.inv_cdf(family.price_cap / family.penalty);
            const double cell_value =
                family.price_cap * dist.mean() -
                supplier_revenue(family.price_cap, q, false, dist, family.penalty);
            threshold += family.weights.month_probabilities[m] * hour_w * cell_value;
        }
    }
    return threshold;
}

OligopolyInvestmentReport oligopoly_investment_checks(const ScenarioFamily& family,
                                                      const std::vector<double>& costs) {
    family.validate();
    const std::size_t n = family.supplier_count();
    if (costs.size() != n) {
        throw std::invalid_argument("oligopoly_investment_checks: cost vector size mismatch");
    }
    OligopolyInvestmentReport rep;
    const double hour_w = 1.0 / double(family.weights.hours_per_day);

    // Investment benefit never exceeds the with-storage revenue ceiling
    // cap * min(D, E[X]) averaged over cells, since the no-storage revenue is
    // nonnegative.
    rep.benefit_upper_bound.assign(n, 0.0);
    for (std::size_t m = 0; m < family.cells.size(); ++m) {
        const double w = family.weights.month_probabilities[m] * hour_w;
        for (const MarketCell& cell : family.cells[m]) {
            for (std::size_t i = 0; i < n; ++i) {
                rep.benefit_upper_bound[i] +=
                    w * family.price_cap * std::min(cell.demand, cell.dists[i].mean());
            }
        }
    }
    rep.all_out_unique = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (costs[i] <= rep.benefit_upper_bound[i]) rep.all_out_unique = false;
    }

    // Low-demand exclusion: a storage set whose members each remain redundant
    // (demand covered without any one of them) in every cell cannot be a pure
    // equilibrium.
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (unsigned(__builtin_popcount(mask)) < 2) continue;
        bool excluded = true;
        for (std::size_t m = 0; m < family.cells.size() && excluded; ++m) {
            for (const MarketCell& cell : family.cells[m]) {
                double sum_u = 0.0, max_y = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (mask & (1u << i)) {
                        const double y = cell.dists[i].mean();
                        sum_u += y;
                        max_y = std::max(max_y, y);
                    }
                }
                if (!(cell.demand <= sum_u - max_y + 1e-12)) {
                    excluded = false;
                    break;
                }
            }
        }
        if (excluded) rep.excluded_profiles.push_back(mask);
    }

    rep.high_demand = true;
    for (std::size_t m = 0; m < family.cells.size() && rep.high_demand; ++m) {
        for (std::size_t t = 0; t < family.cells[m].size(); ++t) {
            if (family.cells[m][t].demand < high_demand_threshold(family, m, t) - 1e-12) {
                rep.high_demand = false;
                break;
            }
        }
    }
    rep.cost_threshold.assign(n, 0.0);
    rep.dominant_choice.assign(n, -1);
    if (rep.high_demand) {
        for (std::size_t i = 0; i < n; ++i) {
            rep.cost_threshold[i] = dominant_strategy_threshold(family, i);
            rep.dominant_choice[i] = costs[i] <= rep.cost_threshold[i] ? 1 : 0;
        }
    }
    return rep;
}

}  // namespace lem
