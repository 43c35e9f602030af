// Command-line front end: scenario generation, single solves, epsilon-sweep
// Pareto sets, cost allocation, separated-vs-cooperated comparisons and MILP
// export. All randomness flows from the --seed flag; fixed inputs give
// byte-identical outputs.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "towsched/allocation.hpp"
#include "towsched/coadh.hpp"
#include "towsched/exact.hpp"
#include "towsched/generator.hpp"
#include "towsched/instance.hpp"
#include "towsched/lp_export.hpp"
#include "towsched/pareto.hpp"
#include "towsched/serialize.hpp"

using namespace towsched;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitGuard = 4;

SearchConfig load_config(const std::string& path) {
    SearchConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
        cfg.t_max = j.value("t_max", cfg.t_max);
        cfg.cooling = j.value("cooling", cfg.cooling);
        if (j.contains("weights")) {
            cfg.w_new_best = j["weights"][0].get<double>();
            cfg.w_accepted = j["weights"][1].get<double>();
            cfg.w_rejected = j["weights"][2].get<double>();
        }
        cfg.initial_score = j.value("initial_score", cfg.initial_score);
        cfg.chi_worst = j.value("chi_worst", cfg.chi_worst);
        cfg.chi_shaw = j.value("chi_shaw", cfg.chi_shaw);
        cfg.chi_d = j.value("chi_d", cfg.chi_d);
        cfg.chi_e = j.value("chi_e", cfg.chi_e);
        if (j.contains("destroy_counts"))
            cfg.destroy_counts = j["destroy_counts"].get<std::vector<int>>();
        cfg.k_regret = j.value("k_regret", cfg.k_regret);
        cfg.eval.c_eval_dl = j.value("c_eval_dl", cfg.eval.c_eval_dl);
        cfg.eval.c_eval_pr = j.value("c_eval_pr", cfg.eval.c_eval_pr);
        if (j.contains("t_delay") && !j["t_delay"].is_null())
            cfg.eval.t_delay = j["t_delay"].get<double>();
        cfg.seed = j.value("seed", cfg.seed);
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError("config parse error in " + path + ": " + e.what());
    }
    if (cfg.cooling <= 0 || cfg.cooling >= 1) throw ScenarioError("config.cooling: must lie in (0, 1)");
    if (cfg.w_new_best < cfg.w_accepted || cfg.w_accepted < cfg.w_rejected || cfg.w_rejected < 0)
        throw ScenarioError("config.weights: needs w1 >= w2 >= w3 >= 0");
    if (cfg.initial_score <= 0) throw ScenarioError("config.initial_score: must be > 0");
    return cfg;
}

Instance load_with_mode(const std::string& path, const std::string& mode_flag) {
    Instance inst = load_scenario(path);
    if (!mode_flag.empty()) {
        Mode m = mode_flag == "separated" ? Mode::Separated : Mode::Cooperated;
        if (mode_flag != "separated" && mode_flag != "cooperated")
            throw ScenarioError("--mode: expected 'separated' or 'cooperated'");
        if (m != inst.mode) {
            inst.mode = m;
            inst.finalize();
        }
    }
    return inst;
}

std::vector<double> parse_bounds(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok == "inf") out.push_back(kInfinity);
        else out.push_back(std::stod(tok));
    }
    return out;
}

Instance switched_mode(const Instance& inst, Mode m) {
    Instance out = inst;
    out.mode = m;
    out.finalize();
    return out;
}

// One sensitivity transform from the experiment axes: rebuilds the instance
// with the parameter replaced and everything derived refreshed.
Instance apply_sweep(const Instance& base, const std::string& param, double value) {
    Instance inst = base;
    if (param == "charge_time") {
        // full-charge minutes -> rate
        inst.vehicle_params.charge_rate = inst.vehicle_params.capacity / value;
    } else if (param == "battery_capacity") {
        // rate follows so the full-charge time stays put
        double full_charge = inst.vehicle_params.capacity / inst.vehicle_params.charge_rate;
        inst.vehicle_params.capacity = value;
        inst.vehicle_params.charge_rate = value / full_charge;
    } else if (param == "flights_per_vehicle") {
        int vehicles = std::max<int>(inst.num_operators(),
                                     static_cast<int>(std::lround(inst.num_flights() / value)));
        int per = vehicles / inst.num_operators();
        int extra = vehicles % inst.num_operators();
        for (int r = 0; r < inst.num_operators(); ++r) {
            int n = per + (r < extra ? 1 : 0);
            bool fully_shared = inst.operators[r].shared_count == inst.operators[r].fleet_size;
            inst.operators[r].fleet_size = n;
            inst.operators[r].shared_count =
                fully_shared ? n : std::min(inst.operators[r].shared_count, n);
        }
    } else if (param == "depot_offset") {
        double fx = 0, fy = 0, dx = 0, dy = 0;
        int nf = 0, nd = 0;
        for (const Node& n : inst.graph.nodes) {
            if (n.kind == NodeKind::Flight) { fx += n.x; fy += n.y; ++nf; }
            if (n.kind == NodeKind::DepotOut) { dx += n.x; dy += n.y; ++nd; }
        }
        fx /= nf; fy /= nf; dx /= nd; dy /= nd;
        double ux = dx - fx, uy = dy - fy;
        double len = std::sqrt(ux * ux + uy * uy);
        if (len < 1e-9) { ux = 0; uy = -1; len = 1; }
        double shift = (value - len) / len;
        for (Node& n : inst.graph.nodes)
            if (n.kind == NodeKind::DepotOut || n.kind == NodeKind::DepotIn) {
                n.x += ux * shift;
                n.y += uy * shift;
            }
        inst.graph.distance = SquareMatrix();  // recompute from coordinates
    } else if (param == "service_radius") {
        for (auto& op : inst.operators) op.service_radius = value;
    } else if (param == "shared_count") {
        for (auto& op : inst.operators)
            op.shared_count = std::min(static_cast<int>(value), op.fleet_size);
    } else if (param == "priority_variance") {
        // re-mark own flights so the binary std dev approximates the target
        double m = (1.0 - std::sqrt(std::max(0.0, 1.0 - 4.0 * value * value))) / 2.0;
        for (int r = 0; r < inst.num_operators(); ++r) {
            auto& op = inst.operators[r];
            op.priority.clear();
            std::vector<int> own;
            for (int f = 0; f < inst.num_flights(); ++f)
                if (inst.flights[f].owner == r) own.push_back(f);
            int marks = static_cast<int>(std::lround(m * own.size()));
            for (int i = 0; i < marks && i < static_cast<int>(own.size()); ++i)
                op.priority.emplace_back(inst.flights[own[i]].node, 1);
        }
    } else {
        throw ScenarioError("unknown sweep parameter: " + param);
    }
    inst.finalize();
    return inst;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"electric tow tractor coalition scheduling"};
    app.require_subcommand(1);

    std::string scenario, config_path, out_path, mode_flag, trace_path, bounds_text;
    std::uint64_t seed = 0;
    double t_delay = kInfinity;

    // gen
    auto* gen = app.add_subcommand("gen", "generate a scenario file");
    std::string profile = "A-like";
    int gen_flights = -1, gen_chargers = -1, gen_vehicles = -1;
    double gen_span = -1, gen_consumption = -1, gen_priority_std = -1, gen_window = -1;
    gen->add_option("--profile", profile, "A-like | B-like | C-like | tiny | custom");
    gen->add_option("--seed", seed);
    gen->add_option("--out", out_path)->required();
    gen->add_option("--flights", gen_flights, "override flight count");
    gen->add_option("--vehicles", gen_vehicles, "override total vehicle count (split evenly)");
    gen->add_option("--chargers", gen_chargers);
    gen->add_option("--span", gen_span, "minutes over which windows open");
    gen->add_option("--window", gen_window, "window width in minutes");
    gen->add_option("--consumption", gen_consumption, "kWh per km");
    gen->add_option("--priority-std", gen_priority_std);

    // solve
    auto* solve = app.add_subcommand("solve", "run the heuristic at one delay bound");
    solve->add_option("--scenario", scenario)->required();
    solve->add_option("--config", config_path);
    solve->add_option("--seed", seed);
    solve->add_option("--mode", mode_flag);
    solve->add_option("--t-delay", t_delay);
    solve->add_option("--out", out_path);
    solve->add_option("--trace", trace_path);

    // pareto
    auto* pareto = app.add_subcommand("pareto", "epsilon-constraint sweep");
    std::string solver_name = "coadh";
    pareto->add_option("--scenario", scenario)->required();
    pareto->add_option("--config", config_path);
    pareto->add_option("--seed", seed);
    pareto->add_option("--mode", mode_flag);
    pareto->add_option("--bounds", bounds_text, "comma list, 'inf' allowed; default: 4 levels");
    pareto->add_option("--solver", solver_name, "coadh | exact");
    pareto->add_option("--out", out_path);

    // allocate
    auto* allocate_cmd = app.add_subcommand("allocate", "Shapley cost allocation over a Pareto set");
    std::string methods = "both";
    allocate_cmd->add_option("--scenario", scenario)->required();
    allocate_cmd->add_option("--config", config_path);
    allocate_cmd->add_option("--seed", seed);
    allocate_cmd->add_option("--solver", solver_name);
    allocate_cmd->add_option("--methods", methods, "improved | traditional | both");
    allocate_cmd->add_option("--out", out_path);

    // compare
    auto* compare = app.add_subcommand("compare", "separated vs cooperated shared utility");
    std::string sweep_param, sweep_values;
    compare->add_option("--scenario", scenario)->required();
    compare->add_option("--config", config_path);
    compare->add_option("--seed", seed);
    compare->add_option("--solver", solver_name);
    compare->add_option("--sweep", sweep_param,
                        "charge_time | battery_capacity | flights_per_vehicle | depot_offset | "
                        "service_radius | shared_count | priority_variance");
    compare->add_option("--values", sweep_values, "comma list of sweep values");
    compare->add_option("--out", out_path);

    // export-milp
    auto* milp = app.add_subcommand("export-milp", "write the linear model in LP format");
    milp->add_option("--scenario", scenario)->required();
    milp->add_option("--mode", mode_flag);
    milp->add_option("--t-delay", t_delay);
    milp->add_option("--out", out_path)->required();

    // oracle
    auto* oracle = app.add_subcommand("oracle", "exhaustive optimum for tiny instances");
    oracle->add_option("--scenario", scenario)->required();
    oracle->add_option("--mode", mode_flag);
    oracle->add_option("--t-delay", t_delay);
    oracle->add_option("--out", out_path);

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) {
        GenSpec spec = gen_profile(profile);
        if (gen_flights > 0) spec.flights = gen_flights;
        if (gen_chargers >= 0) spec.chargers = gen_chargers;
        if (gen_span > 0) spec.span = gen_span;
        if (gen_window > 0) spec.window_width = gen_window;
        if (gen_consumption > 0) spec.vehicle_params.consumption_rate = gen_consumption;
        if (gen_priority_std >= 0) spec.priority_std = gen_priority_std;
        if (gen_vehicles > 0) {
            int per = gen_vehicles / spec.operators, extra = gen_vehicles % spec.operators;
            for (int r = 0; r < spec.operators; ++r) {
                spec.fleet_sizes[r] = per + (r < extra ? 1 : 0);
                spec.shared_counts[r] = spec.fleet_sizes[r];
            }
        }
        Instance inst = generate_scenario(spec, seed);
        save_scenario(inst, out_path);
        std::cout << "wrote " << out_path << " (|F|=" << inst.num_flights()
                  << ", |R|=" << inst.num_operators() << ", |K|=" << inst.num_vehicles() << ")\n";
        return 0;
    }

    if (solve->parsed()) {
        Instance inst = load_with_mode(scenario, mode_flag);
        SearchConfig cfg = load_config(config_path);
        cfg.seed = seed ? seed : cfg.seed;
        cfg.eval.t_delay = t_delay;
        cfg.record_trace = !trace_path.empty();
        RunResult res = run(inst, cfg);
        auto [f1, f2] = objectives(res.best, inst.vehicle_params);
        std::cout << "f1=" << fmt_num(f1) << " f2=" << fmt_num(f2)
                  << " evaluate=" << fmt_num(res.best_eval) << " iterations=" << res.iterations
                  << "\n";
        if (!out_path.empty()) write_file(out_path, solution_to_json(res.best, inst).dump(2) + "\n");
        if (!trace_path.empty()) write_file(trace_path, trace_to_csv(res.trace));
        return 0;
    }

    if (pareto->parsed()) {
        Instance inst = load_with_mode(scenario, mode_flag);
        SearchConfig cfg = load_config(config_path);
        cfg.seed = seed ? seed : cfg.seed;
        SolverKind solver = solver_name == "exact" ? SolverKind::Exact : SolverKind::Coadh;
        ParetoSet set =
            bounds_text.empty()
                ? default_sweep(inst, cfg, solver)
                : epsilon_sweep(inst, cfg, parse_bounds(bounds_text), solver);
        std::string csv = pareto_to_csv(set, solver_name, cfg.seed);
        if (!out_path.empty()) write_file(out_path, csv);
        else std::cout << csv;
        return 0;
    }

    if (allocate_cmd->parsed()) {
        Instance inst = load_scenario(scenario);
        SearchConfig cfg = load_config(config_path);
        cfg.seed = seed ? seed : cfg.seed;
        SolverKind solver = solver_name == "exact" ? SolverKind::Exact : SolverKind::Coadh;
        AllocationReport report = allocate(inst, cfg, solver, methods != "traditional",
                                           methods != "improved");
        std::string csv = allocation_to_csv(report, scenario);
        if (!out_path.empty()) write_file(out_path, csv);
        else std::cout << csv;
        std::cout << "negative_utilities improved=" << report.negative_improved
                  << " traditional=" << report.negative_traditional << "\n";
        return 0;
    }

    if (compare->parsed()) {
        Instance base = load_scenario(scenario);
        SearchConfig cfg = load_config(config_path);
        cfg.seed = seed ? seed : cfg.seed;
        SolverKind solver = solver_name == "exact" ? SolverKind::Exact : SolverKind::Coadh;
        std::vector<std::pair<std::string, double>> cells;
        if (sweep_param.empty()) {
            cells.emplace_back("base", 0.0);
        } else {
            for (double v : parse_bounds(sweep_values)) cells.emplace_back(sweep_param, v);
        }
        std::vector<CompareRow> rows;
        for (const auto& [param, value] : cells) {
            Instance inst = param == "base" ? base : apply_sweep(base, param, value);
            ParetoSet os = default_sweep(switched_mode(inst, Mode::Separated), cfg, solver);
            ParetoSet oc = default_sweep(switched_mode(inst, Mode::Cooperated), cfg, solver);
            CompareRow row;
            row.sweep = param;
            row.value = value;
            row.dis_os = os.mean_f1();
            row.dis_oc = oc.mean_f1();
            row.del_os = os.mean_f2();
            row.del_oc = oc.mean_f2();
            row.delta_f1 = shared_utility(os, oc, 1).value_or(0.0);
            row.delta_f2 = shared_utility(os, oc, 2).value_or(0.0);
            rows.push_back(row);
        }
        std::string csv = compare_to_csv(rows);
        if (!out_path.empty()) write_file(out_path, csv);
        else std::cout << csv;
        return 0;
    }

    if (milp->parsed()) {
        Instance inst = load_with_mode(scenario, mode_flag);
        export_milp(inst, t_delay, out_path);
        std::cout << "wrote " << out_path << "\n";
        return 0;
    }

    if (oracle->parsed()) {
        Instance inst = load_with_mode(scenario, mode_flag);
        ExactResult res = solve_exact(inst, t_delay);
        nlohmann::ordered_json j;
        j["optimal_f1"] = res.optimal_f1;
        j["optimal_f2"] = res.optimal_f2;
        j["nodes_explored"] = res.nodes_explored;
        j["proven"] = res.proven;
        j["solution"] = solution_to_json(res.solution, inst);
        std::string text = j.dump(2) + "\n";
        if (!out_path.empty()) write_file(out_path, text);
        else std::cout << text;
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return kExitParse;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const GuardError& e) {
        std::cerr << "guard: " << e.what() << "\n";
        return kExitGuard;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
