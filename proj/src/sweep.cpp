#include "lem/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "lem/io.hpp"
#include "lem/numeric.hpp"

namespace lem {

namespace {

void require_ascending(const std::vector<double>& grid, const char* name) {
    if (grid.empty()) throw std::invalid_argument(std::string(name) + " grid is empty");
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (!(grid[k] > grid[k - 1])) {
            throw std::invalid_argument(std::string(name) + " grid must be strictly ascending");
        }
    }
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

void SweepConfig::validate() const {
    if (suppliers.size() != 2) throw std::invalid_argument("sweep: exactly two suppliers");
    if (!(price_cap > 0.0) || !(price_cap < grid_price)) {
        throw std::invalid_argument("sweep: need 0 < price_cap < grid_price");
    }
    require_ascending(demand_grid, "demand");
    if (!sizing) require_ascending(cost_grid, "cost");
    const std::vector<double> penalties = penalty_grid.empty() ? std::vector<double>{penalty}
                                                               : penalty_grid;
    require_ascending(penalties, "penalty");
    for (double lam : penalties) {
        if (!(lam > price_cap)) throw std::invalid_argument("sweep: penalties must exceed the cap");
    }
    if (months < 1 || hours < 1) throw std::invalid_argument("sweep: bad grid dimensions");
    if (!month_probabilities.empty() && month_probabilities.size() != std::size_t(months)) {
        throw std::invalid_argument("sweep: month probability count mismatch");
    }
    for (const auto& s : suppliers) {
        if (s.generation_csv.empty() && !s.synthetic) {
            throw std::invalid_argument("sweep: supplier needs a CSV path or a synthetic law");
        }
    }
}

std::string equilibrium_label(const InvestmentEquilibrium& eq) {
    if (eq.pure.empty()) return "mixed-only";
    bool s0s0 = false, s1s0 = false, s1s1 = false;
    for (const auto& profile : eq.pure) {
        const int total = profile[0] + profile[1];
        if (total == 0) s0s0 = true;
        else if (total == 1) s1s0 = true;
        else s1s1 = true;
    }
    std::string label;
    const auto add = [&](const char* name) {
        if (!label.empty()) label += '+';
        label += name;
    };
    if (s0s0) add("S0S0");
    if (s1s0) add("S1S0");
    if (s1s1) add("S1S1");
    return label;
}

SweepResult run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    const auto t_start = std::chrono::steady_clock::now();

    // Distributions per supplier per (m,t).
    std::vector<std::vector<std::vector<GenerationDistribution>>> dists(2);
    std::vector<SampleGrid> grids(2);
    for (int i = 0; i < 2; ++i) {
        if (!cfg.suppliers[std::size_t(i)].generation_csv.empty()) {
            grids[std::size_t(i)] = ingest_generation_csv(cfg.suppliers[std::size_t(i)].generation_csv,
                                                          cfg.months, cfg.hours);
            dists[std::size_t(i)] = grids[std::size_t(i)].build_distributions();
        } else {
            dists[std::size_t(i)].assign(
                std::size_t(cfg.months),
                std::vector<GenerationDistribution>(std::size_t(cfg.hours),
                                                    *cfg.suppliers[std::size_t(i)].synthetic));
        }
    }

    SweepResult out;
    std::array<double, 2> cell_costs{};
    std::vector<double> cost_grid = cfg.cost_grid;
    if (cfg.sizing) {
        for (int i = 0; i < 2; ++i) {
            if (cfg.suppliers[std::size_t(i)].generation_csv.empty()) {
                throw std::invalid_argument("sweep: sizing requires generation CSV data");
            }
            const ChargeDischargeSeries cd = charge_discharge_series(
                grids[std::size_t(i)], cfg.sizing->cost.charge_efficiency,
                cfg.sizing->cost.discharge_efficiency);
            double step = cfg.sizing->step;
            if (step <= 0.0) {
                step = 0.01 * double(cd.hours_per_day) * cd.max_abs_flow;
                if (!(step > 0.0)) step = 1.0;
            }
            const CapacityResult sized = size_capacity(cd, cfg.sizing->alpha, step);
            out.sized_capacity[std::size_t(i)] = sized.total;
            cell_costs[std::size_t(i)] = storage_cost(sized.total, cfg.sizing->cost) +
                                         degradation_cost(cd, cfg.sizing->cost.degradation_unit_cost);
            out.sized_costs[std::size_t(i)] = cell_costs[std::size_t(i)];
        }
        if (cost_grid.empty()) cost_grid = {0.0};  // placeholder axis, sized costs apply
    }

    const std::vector<double> penalties = cfg.penalty_grid.empty() ? std::vector<double>{cfg.penalty}
                                                                   : cfg.penalty_grid;
    const double price_step = cfg.price_step > 0.0 ? cfg.price_step : cfg.price_cap / 200.0;
    const ScenarioWeights weights = cfg.month_probabilities.empty()
                                        ? ScenarioWeights::uniform(cfg.months, cfg.hours)
                                        : ScenarioWeights{cfg.month_probabilities, cfg.hours};

    // Stage II averages depend on (demand, penalty) only; compute each pair
    // once in parallel, then sweep the cheap cost axis.
    struct PairKey {
        std::size_t d, p;
        bool operator<(const PairKey& o) const { return d != o.d ? d < o.d : p < o.p; }
    };
    std::vector<PairKey> pairs;
    for (std::size_t di = 0; di < cfg.demand_grid.size(); ++di) {
        for (std::size_t pi = 0; pi < penalties.size(); ++pi) pairs.push_back({di, pi});
    }
    std::map<PairKey, StageTwoAverages> averages;
    std::vector<StageTwoAverages> pair_results(pairs.size());
    parallel_for(pairs.size(), cfg.threads, [&](std::size_t idx) {
        const PairKey key = pairs[idx];
        ScenarioFamily family;
        family.price_cap = cfg.price_cap;
        family.penalty = penalties[key.p];
        family.grid_price = cfg.grid_price;
        family.weights = weights;
        family.cells.resize(std::size_t(cfg.months));
        for (int m = 0; m < cfg.months; ++m) {
            for (int t = 0; t < cfg.hours; ++t) {
                MarketCell cell;
                cell.demand = cfg.demand_grid[key.d];
                cell.dists = {dists[0][std::size_t(m)][std::size_t(t)],
                              dists[1][std::size_t(m)][std::size_t(t)]};
                family.cells[std::size_t(m)].push_back(std::move(cell));
            }
        }
        try {
            pair_results[idx] = expected_subgame_summary(family, price_step, 1);
        } catch (const std::exception& e) {
            throw std::runtime_error("sweep cell (demand " + format_number(cfg.demand_grid[key.d]) +
                                     ", penalty " + format_number(penalties[key.p]) + "): " +
                                     e.what());
        }
    });
    for (std::size_t idx = 0; idx < pairs.size(); ++idx) averages[pairs[idx]] = pair_results[idx];

    for (std::size_t di = 0; di < cfg.demand_grid.size(); ++di) {
        for (std::size_t ci = 0; ci < cost_grid.size(); ++ci) {
            for (std::size_t pi = 0; pi < penalties.size(); ++pi) {
                const StageTwoAverages& avg = averages[{di, pi}];
                const std::array<double, 2> costs =
                    cfg.sizing ? cell_costs : std::array<double, 2>{cost_grid[ci], cost_grid[ci]};
                const ProfitMatrix matrix = profit_matrix(avg.revenues, costs);
                const InvestmentEquilibrium eq = solve_stage1(matrix);

                SweepCell cell;
                cell.demand = cfg.demand_grid[di];
                cell.costs = costs;
                cell.penalty = penalties[pi];
                cell.label = equilibrium_label(eq);
                if (!eq.pure.empty()) {
                    const auto& profile = eq.pure.front();  // lexicographic representative
                    const std::size_t idx = std::size_t(profile[0] * 2 + profile[1]);
                    for (int i = 0; i < 2; ++i) {
                        cell.profits[std::size_t(i)] =
                            matrix.payoff[i][profile[0]][profile[1]];
                        cell.expected_prices[std::size_t(i)] =
                            avg.expected_prices[idx][std::size_t(i)];
                        cell.invest_probabilities[std::size_t(i)] = double(profile[std::size_t(i)]);
                    }
                } else {
                    const auto& pr = eq.mixed.invest_prob;
                    cell.invest_probabilities = pr;
                    for (int i = 0; i < 2; ++i) {
                        double profit = 0.0, eprice = 0.0;
                        for (int a = 0; a <= 1; ++a) {
                            for (int b = 0; b <= 1; ++b) {
                                const double w = (a ? pr[0] : 1.0 - pr[0]) *
                                                 (b ? pr[1] : 1.0 - pr[1]);
                                profit += w * matrix.payoff[i][a][b];
                                eprice += w * avg.expected_prices[std::size_t(a * 2 + b)][std::size_t(i)];
                            }
                        }
                        cell.profits[std::size_t(i)] = profit;
                        cell.expected_prices[std::size_t(i)] = eprice;
                    }
                }
                out.cells.push_back(std::move(cell));
            }
        }
    }

    out.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

std::string emit_results(const SweepResult& result, const SweepConfig& cfg,
                         const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const fs::path csv_path = fs::path(out_dir) / "sweep.csv";
    const fs::path manifest_path = fs::path(out_dir) / "manifest.json";

    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
    csv << "demand,cost,penalty,label,profit_1,profit_2,eprice_1,eprice_2\n";
    for (const SweepCell& cell : result.cells) {
        csv << format_number(cell.demand) << ',' << format_number(cell.costs[0]) << ','
            << format_number(cell.penalty) << ',' << cell.label << ','
            << format_number(cell.profits[0]) << ',' << format_number(cell.profits[1]) << ','
            << format_number(cell.expected_prices[0]) << ','
            << format_number(cell.expected_prices[1]) << '\n';
    }
    csv.close();

    nlohmann::json manifest;
    manifest["version"] = "0.1.0";
    manifest["seed"] = cfg.seed;
    manifest["elapsed_seconds"] = result.elapsed_seconds;
    manifest["currency"] = cfg.currency;
    manifest["unit_scale_to_per_mwh"] = cfg.unit_scale;
    manifest["config"] = {
        {"price_cap", cfg.price_cap},
        {"grid_price", cfg.grid_price},
        {"months", cfg.months},
        {"hours", cfg.hours},
        {"demand_grid", cfg.demand_grid},
        {"cost_grid", cfg.cost_grid},
        {"penalty_grid", cfg.penalty_grid.empty() ? std::vector<double>{cfg.penalty}
                                                  : cfg.penalty_grid},
        {"price_step", cfg.price_step > 0.0 ? cfg.price_step : cfg.price_cap / 200.0},
        {"threads", cfg.threads},
    };
    if (cfg.sizing) {
        manifest["sizing"] = {
            {"alpha", cfg.sizing->alpha},
            {"capacity", {result.sized_capacity[0], result.sized_capacity[1]}},
            {"storage_cost", {result.sized_costs[0], result.sized_costs[1]}},
        };
    }
    std::ofstream mf(manifest_path, std::ios::binary);
    if (!mf) throw std::runtime_error("cannot write " + manifest_path.string());
    mf << manifest.dump(2) << '\n';
    return csv_path.string();
}

}  // namespace lem
