// Command-line front end: storage sizing, single-subgame and investment-game
// solves, parameter sweeps, and oracle validation of computed equilibria.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lem/io.hpp"
#include "lem/oracle.hpp"
#include "lem/sweep.hpp"

using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    json j;
    in >> j;
    return j;
}

double price_scale(const json& j) {
    const std::string unit = j.value("price_unit", std::string("per_mwh"));
    if (unit == "per_mwh") return 1.0;
    if (unit == "per_kwh") return 1000.0;
    throw std::invalid_argument("price_unit must be per_mwh or per_kwh");
}

lem::GenerationDistribution dist_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "uniform") {
        return lem::GenerationDistribution::uniform(j.value("min", 0.0),
                                                    j.at("max").get<double>());
    }
    if (type == "point") {
        return lem::GenerationDistribution::point_mass(j.at("value").get<double>());
    }
    if (type == "knots") {
        return lem::GenerationDistribution::from_knots(j.at("values").get<std::vector<double>>(),
                                                       j.at("probs").get<std::vector<double>>());
    }
    if (type == "samples") {
        return lem::GenerationDistribution::from_samples(j.at("values").get<std::vector<double>>());
    }
    if (type == "ecdf_csv") {
        const lem::SampleGrid grid =
            lem::ingest_generation_csv(j.at("path").get<std::string>(), j.value("months", 12),
                                       j.value("hours", 24));
        return lem::GenerationDistribution::from_samples(
            grid.bucket(j.at("month").get<int>(), j.at("hour").get<int>()));
    }
    throw std::invalid_argument("unknown distribution type: " + type);
}

lem::MarketScenario scenario_from_json(const json& j) {
    const double scale = price_scale(j);
    lem::MarketScenario s;
    s.price_cap = scale * j.at("price_cap").get<double>();
    s.penalty = scale * j.at("penalty").get<double>();
    s.grid_price = scale * j.at("grid_price").get<double>();
    s.demand = j.at("demand").get<double>();
    int id = 0;
    for (const json& sj : j.at("suppliers")) {
        s.suppliers.push_back({id++, sj.at("invests").get<bool>(), dist_from_json(sj.at("dist"))});
    }
    s.validate();
    return s;
}

lem::ScenarioFamily family_from_json(const json& j) {
    const double scale = price_scale(j);
    lem::ScenarioFamily family;
    family.price_cap = scale * j.at("price_cap").get<double>();
    family.penalty = scale * j.at("penalty").get<double>();
    family.grid_price = scale * j.at("grid_price").get<double>();
    const int months = j.value("months", 1);
    const int hours = j.value("hours", 1);
    if (j.contains("month_probabilities")) {
        family.weights =
            lem::ScenarioWeights{j.at("month_probabilities").get<std::vector<double>>(), hours};
    } else {
        family.weights = lem::ScenarioWeights::uniform(months, hours);
    }
    const double demand = j.at("demand").get<double>();

    std::vector<std::vector<std::vector<lem::GenerationDistribution>>> dists;
    for (const json& sj : j.at("suppliers")) {
        if (sj.contains("generation_csv")) {
            const lem::SampleGrid grid = lem::ingest_generation_csv(
                sj.at("generation_csv").get<std::string>(), months, hours);
            dists.push_back(grid.build_distributions());
        } else {
            const lem::GenerationDistribution d = dist_from_json(sj.at("dist"));
            dists.emplace_back(std::size_t(months),
                               std::vector<lem::GenerationDistribution>(std::size_t(hours), d));
        }
    }
    family.cells.resize(std::size_t(months));
    for (int m = 0; m < months; ++m) {
        for (int t = 0; t < hours; ++t) {
            lem::MarketCell cell;
            cell.demand = demand;
            for (const auto& per_supplier : dists) {
                cell.dists.push_back(per_supplier[std::size_t(m)][std::size_t(t)]);
            }
            family.cells[std::size_t(m)].push_back(std::move(cell));
        }
    }
    family.validate();
    return family;
}

json equilibrium_to_json(const lem::PriceEquilibrium& eq) {
    json out;
    out["kind"] = lem::regime_name(eq.kind);
    out["revenues"] = eq.revenues;
    out["expected_prices"] = eq.expected_prices;
    if (!eq.prices.empty()) out["prices"] = eq.prices;
    if (!eq.mixed.empty()) {
        json mixed = json::array();
        for (const lem::MixedPriceCdf& cdf : eq.mixed) {
            json mj;
            mj["lower_support"] = cdf.lower;
            mj["upper_support"] = cdf.upper;
            mj["atom_at_cap"] = cdf.atom_at_cap;
            if (cdf.discrete()) {
                mj["support"] = cdf.support;
                mj["mass"] = cdf.mass;
            } else {
                json pts = json::array();
                const int kn = 41;
                for (int k = 0; k <= kn; ++k) {
                    const double p = cdf.lower + (cdf.upper - cdf.lower) * double(k) / double(kn);
                    pts.push_back({{"price", p}, {"cdf", cdf.cdf(p)}});
                }
                mj["cdf"] = pts;
            }
            mixed.push_back(std::move(mj));
        }
        out["mixed"] = std::move(mixed);
    }
    return out;
}

void write_or_print(const json& j, const std::string& out_dir, const std::string& name) {
    if (out_dir.empty()) {
        std::cout << j.dump(2) << std::endl;
        return;
    }
    std::filesystem::create_directories(out_dir);
    const std::string path = (std::filesystem::path(out_dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << '\n';
    std::cout << path << std::endl;
}

int run_capacity(const json& cfg, const std::string& out_dir) {
    const lem::SampleGrid grid =
        lem::ingest_generation_csv(cfg.at("generation_csv").get<std::string>(),
                                   cfg.value("months", 12), cfg.value("hours", 24));
    lem::StorageCostParams params;
    if (cfg.contains("cost")) {
        const json& c = cfg.at("cost");
        params.unit_capacity_cost = c.value("unit_capacity_cost", 0.0);
        params.interest_rate = c.value("interest_rate", 0.05);
        params.lifetime_years = c.value("lifetime_years", 15.0);
        params.hours_per_year = c.value("hours_per_year", 8760.0);
        params.degradation_unit_cost = c.value("degradation_unit_cost", 0.0);
    }
    params.charge_efficiency = cfg.value("charge_efficiency", 1.0);
    params.discharge_efficiency = cfg.value("discharge_efficiency", 1.0);

    const lem::ChargeDischargeSeries cd = lem::charge_discharge_series(
        grid, params.charge_efficiency, params.discharge_efficiency);
    double step = cfg.value("step", 0.0);
    if (step <= 0.0) {
        step = 0.01 * double(cd.hours_per_day) * cd.max_abs_flow;
        if (!(step > 0.0)) step = 1.0;
    }
    const lem::CapacityResult res = lem::size_capacity(cd, cfg.value("alpha", 0.05), step);

    json out;
    out["underflow_capacity"] = res.underflow_capacity;
    out["overflow_capacity"] = res.overflow_capacity;
    out["total"] = res.total;
    out["achieved_bounds"] = {res.achieved_bounds[0], res.achieved_bounds[1]};
    out["probability_target"] = res.probability_target;
    out["step"] = res.step;
    if (params.unit_capacity_cost > 0.0) {
        out["annuity_factor"] = lem::annuity_factor(params);
        out["storage_cost"] = lem::storage_cost(res.total, params);
        out["degradation_cost"] = lem::degradation_cost(cd, params.degradation_unit_cost);
        out["total_cost"] = lem::storage_cost(res.total, params) +
                            lem::degradation_cost(cd, params.degradation_unit_cost);
    }
    write_or_print(out, out_dir, "capacity.json");
    return 0;
}

int run_stage2(const json& cfg, const std::string& out_dir, double price_step_flag) {
    const lem::MarketScenario s = scenario_from_json(cfg);
    double step = price_step_flag > 0.0 ? price_step_flag : cfg.value("price_step", 0.0);
    if (step <= 0.0) step = s.price_cap / 200.0;
    json out;
    if (s.suppliers.size() == 2) {
        out = equilibrium_to_json(lem::solve_stage2(s, step));
    } else {
        const lem::OligopolyCheck check = lem::oligopoly_pure_check(s);
        out["kind"] = lem::regime_name(check.regime);
        if (check.equilibrium) out["equilibrium"] = equilibrium_to_json(*check.equilibrium);
        out["mixed_exists"] = check.mixed_exists;
    }
    write_or_print(out, out_dir, "stage2.json");
    return 0;
}

int run_stage1(const json& cfg, const std::string& out_dir, double price_step_flag, int threads) {
    const lem::ScenarioFamily family = family_from_json(cfg);
    const double scale = price_scale(cfg);
    std::array<double, 2> costs{};
    const auto cj = cfg.at("costs").get<std::vector<double>>();
    if (cj.size() != 2) throw std::invalid_argument("costs must list two suppliers");
    costs = {scale * cj[0], scale * cj[1]};

    double step = price_step_flag > 0.0 ? price_step_flag : cfg.value("price_step", 0.0);
    if (step <= 0.0) step = family.price_cap / 200.0;

    const lem::StageTwoAverages avg = lem::expected_subgame_summary(family, step, threads);
    const lem::ProfitMatrix matrix = lem::profit_matrix(avg.revenues, costs);
    const lem::InvestmentEquilibrium eq = lem::solve_stage1(matrix);

    json out;
    out["revenues"] = {
        {"s1s1", {avg.revenues.s1s1[0], avg.revenues.s1s1[1]}},
        {"s1s0_with", {avg.revenues.s1s0_with[0], avg.revenues.s1s0_with[1]}},
        {"s1s0_without", {avg.revenues.s1s0_without[0], avg.revenues.s1s0_without[1]}},
        {"s0s0", {avg.revenues.s0s0[0], avg.revenues.s0s0[1]}},
    };
    json profit = json::array();
    for (int a = 0; a <= 1; ++a) {
        for (int b = 0; b <= 1; ++b) {
            profit.push_back({{"profile", {a, b}},
                              {"profit", {matrix.payoff[0][a][b], matrix.payoff[1][a][b]}}});
        }
    }
    out["profit_matrix"] = std::move(profit);
    out["pure_equilibria"] = eq.pure;
    out["label"] = lem::equilibrium_label(eq);
    if (eq.mixed.exists || eq.mixed.degenerate) {
        out["mixed"] = {{"invest_probabilities", {eq.mixed.invest_prob[0], eq.mixed.invest_prob[1]}},
                        {"degenerate", eq.mixed.degenerate}};
    }
    write_or_print(out, out_dir, "stage1.json");
    return 0;
}

lem::SweepConfig sweep_config_from_json(const json& cfg) {
    const double scale = price_scale(cfg);
    lem::SweepConfig sc;
    sc.price_cap = scale * cfg.at("price_cap").get<double>();
    sc.grid_price = scale * cfg.at("grid_price").get<double>();
    if (cfg.contains("penalty")) sc.penalty = scale * cfg.at("penalty").get<double>();
    if (cfg.contains("penalty_grid")) {
        for (double v : cfg.at("penalty_grid").get<std::vector<double>>()) {
            sc.penalty_grid.push_back(scale * v);
        }
    }
    sc.months = cfg.value("months", 1);
    sc.hours = cfg.value("hours", 1);
    if (cfg.contains("month_probabilities")) {
        sc.month_probabilities = cfg.at("month_probabilities").get<std::vector<double>>();
    }
    sc.demand_grid = cfg.at("demand_grid").get<std::vector<double>>();
    if (cfg.contains("cost_grid")) {
        for (double v : cfg.at("cost_grid").get<std::vector<double>>()) {
            sc.cost_grid.push_back(scale * v);
        }
    }
    for (const json& sj : cfg.at("suppliers")) {
        lem::SupplierConfig s;
        if (sj.contains("generation_csv")) {
            s.generation_csv = sj.at("generation_csv").get<std::string>();
        } else {
            s.synthetic = dist_from_json(sj.at("dist"));
        }
        sc.suppliers.push_back(std::move(s));
    }
    if (cfg.contains("sizing")) {
        const json& z = cfg.at("sizing");
        lem::SizingConfig sz;
        sz.alpha = z.value("alpha", 0.05);
        sz.step = z.value("step", 0.0);
        sz.cost.unit_capacity_cost = scale * z.value("unit_capacity_cost", 0.0);
        sz.cost.interest_rate = z.value("interest_rate", 0.05);
        sz.cost.lifetime_years = z.value("lifetime_years", 15.0);
        sz.cost.hours_per_year = z.value("hours_per_year", 8760.0);
        sz.cost.degradation_unit_cost = scale * z.value("degradation_unit_cost", 0.0);
        sz.cost.charge_efficiency = z.value("charge_efficiency", 1.0);
        sz.cost.discharge_efficiency = z.value("discharge_efficiency", 1.0);
        sc.sizing = sz;
    }
    sc.price_step = cfg.value("price_step", 0.0) * (cfg.contains("price_step") ? scale : 1.0);
    sc.currency = cfg.value("currency", std::string());
    sc.unit_scale = scale;
    return sc;
}

int run_validate(const json& cfg, double price_step_flag) {
    const lem::MarketScenario s = scenario_from_json(cfg);
    if (s.suppliers.size() != 2) {
        // Pure-regime deviation scan is the only oligopoly certification.
        const lem::OligopolyCheck check = lem::oligopoly_pure_check(s);
        json out;
        out["kind"] = lem::regime_name(check.regime);
        if (check.equilibrium) {
            const double step = s.price_cap / 200.0;
            const double gain =
                lem::pure_profile_deviation_gain(s, check.equilibrium->prices, step);
            out["worst_deviation_gain"] = gain;
            out["pass"] = gain <= lem::default_epsilon(s);
        } else {
            out["pass"] = check.mixed_exists;
        }
        std::cout << out.dump(2) << std::endl;
        return out["pass"].get<bool>() ? 0 : kExitSolver;
    }

    double step = price_step_flag > 0.0 ? price_step_flag : cfg.value("price_step", 0.0);
    if (step <= 0.0) step = s.price_cap / 200.0;
    const lem::PriceEquilibrium eq = lem::solve_stage2(s, step);
    const lem::DiscreteGame game = lem::build_discrete_game(s, step);

    // Project the computed equilibrium onto the oracle grid.
    std::vector<std::vector<double>> strategies(2,
                                                std::vector<double>(game.price_grid.size(), 0.0));
    if (eq.kind != lem::Regime::Mixed) {
        for (int i = 0; i < 2; ++i) {
            const double p = eq.prices[std::size_t(i)];
            std::size_t best = 0;
            for (std::size_t k = 1; k < game.price_grid.size(); ++k) {
                if (std::fabs(game.price_grid[k] - p) <
                    std::fabs(game.price_grid[best] - p)) best = k;
            }
            strategies[std::size_t(i)][best] = 1.0;
        }
    } else {
        for (int i = 0; i < 2; ++i) {
            const lem::MixedPriceCdf& cdf = eq.mixed[std::size_t(i)];
            auto& st = strategies[std::size_t(i)];
            if (cdf.discrete()) {
                for (std::size_t k = 0; k < cdf.support.size(); ++k) {
                    std::size_t best = 0;
                    for (std::size_t g = 1; g < game.price_grid.size(); ++g) {
                        if (std::fabs(game.price_grid[g] - cdf.support[k]) <
                            std::fabs(game.price_grid[best] - cdf.support[k])) best = g;
                    }
                    st[best] += cdf.mass[k];
                }
            } else {
                double prev = 0.0;
                for (std::size_t g = 0; g < game.price_grid.size(); ++g) {
                    const double hi = g + 1 < game.price_grid.size()
                                          ? 0.5 * (game.price_grid[g] + game.price_grid[g + 1])
                                          : game.price_grid[g];
                    const double val = cdf.cdf_left(std::min(hi, cdf.upper));
                    st[g] = std::max(val - prev, 0.0);
                    prev = val;
                }
                st.back() += cdf.atom_at_cap;
            }
            double total = 0.0;
            for (double& q : st) total += q;
            for (double& q : st) q /= total;
        }
    }

    // Discretization moves mass by up to one grid cell, so certify at the
    // revenue Lipschitz slack rather than the raw default epsilon.
    const double eps = std::max(lem::default_epsilon(s), 2.0 * s.demand * step);
    const lem::NashCheck check = lem::epsilon_nash_check(game, strategies, eps);

    json out = equilibrium_to_json(eq);
    out["oracle"] = {{"pass", check.pass},
                     {"worst_gain", check.worst_gain},
                     {"worst_supplier", check.worst_supplier},
                     {"worst_price", check.worst_price},
                     {"epsilon", eps}};
    std::cout << out.dump(2) << std::endl;
    return check.pass ? 0 : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"local energy market equilibrium toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    double price_step = 0.0;
    std::uint64_t seed = 0;
    int threads = 0;

    app.add_option("--config", config_path, "JSON configuration file")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "RNG seed recorded in the manifest");
    app.add_option("--price-step", price_step, "price grid step for solvers and oracles");
    app.add_option("--threads", threads, "worker threads (0 = hardware)");

    auto* cmd_capacity = app.add_subcommand("capacity", "size storage from generation data");
    auto* cmd_stage2 = app.add_subcommand("stage2", "solve one price-quantity subgame");
    auto* cmd_stage1 = app.add_subcommand("stage1", "solve the storage-investment game");
    auto* cmd_sweep = app.add_subcommand("sweep", "run a (demand, cost, penalty) grid");
    auto* cmd_validate = app.add_subcommand("validate", "oracle-check a solved scenario");

    CLI11_PARSE(app, argc, argv);

    json cfg;
    try {
        cfg = load_json(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return kExitConfig;
    }

    try {
        if (cmd_capacity->parsed()) return run_capacity(cfg, out_dir);
        if (cmd_stage2->parsed()) return run_stage2(cfg, out_dir, price_step);
        if (cmd_stage1->parsed()) return run_stage1(cfg, out_dir, price_step, threads);
        if (cmd_validate->parsed()) return run_validate(cfg, price_step);
        if (cmd_sweep->parsed()) {
            lem::SweepConfig sc;
            try {
                sc = sweep_config_from_json(cfg);
                if (seed != 0) sc.seed = seed;
                else sc.seed = cfg.value("seed", std::uint64_t(0));
                if (threads > 0) sc.threads = threads;
                else sc.threads = cfg.value("threads", 1);
                if (price_step > 0.0) sc.price_step = price_step;
                sc.validate();
            } catch (const std::exception& e) {
                std::cerr << "config error: " << e.what() << std::endl;
                return kExitConfig;
            }
            const lem::SweepResult result = lem::run_sweep(sc);
            const std::string csv =
                lem::emit_results(result, sc, out_dir.empty() ? "." : out_dir);
            std::cout << csv << std::endl;
            return 0;
        }
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << std::endl;
        return kExitSolver;
    }
    return 0;
}
