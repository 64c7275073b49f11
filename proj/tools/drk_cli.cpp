#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "drk/chain.hpp"
#include "drk/errors.hpp"
#include "drk/metrics.hpp"
#include "drk/scenario.hpp"
#include "drk/simulator.hpp"
#include "drk/studio.hpp"

namespace {

void write_text(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw drk::ParseError("cannot open output file " + path);
    out << text;
}

void emit_json(const nlohmann::json& doc, const std::string& path) {
    write_text(doc.dump(2) + "\n", path);
}

std::string occupancy_csv(const drk::sim::SimEstimate& est) {
    std::string out = "a,b,c,d,occupancy\n";
    char buf[96];
    for (size_t i = 0; i < est.states.size(); ++i) {
        const auto& s = est.states[i];
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%d,%.17g\n", s.a, s.b, s.c,
                      s.d, est.occupancy[i]);
        out += buf;
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Markov chain toolkit for two-cell load balancing with a "
                 "truncated channel-offloading pool"};
    app.require_subcommand(1);

    std::string scenario_path, spec_path, constraints_path, preset_name;
    std::string out_path, csv_path, matrix_path, pi_path;
    std::string backend = "enumeration";
    int budget = 20000;
    bool strict = false, no_simulation = false;
    drk::studio::SimOptions sim;

    auto* solve = app.add_subcommand("solve", "Stationary metrics of a scenario");
    solve->add_option("scenario", scenario_path, "scenario JSON file")->required();
    solve->add_option("--backend", backend,
                      "transition matrix backend: enumeration or closed-form")
        ->check(CLI::IsMember({"enumeration", "closed-form"}));
    solve->add_option("--budget", budget, "maximum number of states");
    solve->add_option("--out", out_path, "JSON report path (default stdout)");
    solve->add_option("--csv", csv_path, "metrics CSV path");
    solve->add_option("--matrix", matrix_path, "transition matrix CSV path");
    solve->add_option("--pi", pi_path, "steady-state distribution CSV path");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of a scenario");
    simulate->add_option("scenario", scenario_path, "scenario JSON file")->required();
    simulate->add_option("--seed", sim.seed, "random seed");
    simulate->add_option("--frames", sim.measure_frames, "measured frames per replication");
    simulate->add_option("--warmup", sim.warmup_frames, "discarded frames per replication");
    simulate->add_option("--reps", sim.replications, "independent replications");
    simulate->add_option("--out", out_path, "JSON report path (default stdout)");
    simulate->add_option("--csv", csv_path, "occupancy CSV path");

    auto* sweep = app.add_subcommand("sweep", "One-axis parameter sweep");
    sweep->add_option("spec", spec_path, "sweep spec JSON file")->required();
    sweep->add_option("--out", out_path, "JSON report path (default stdout)");
    sweep->add_option("--csv", csv_path, "sweep table CSV path");

    auto* optimize = app.add_subcommand("optimize", "Best shared-pool size K by U/K");
    optimize->add_option("scenario", scenario_path, "scenario JSON file")->required();
    optimize->add_option("--constraints", constraints_path,
                         "blocking/collision bounds JSON file");
    optimize->add_option("--budget", budget, "maximum number of states");
    optimize->add_option("--out", out_path, "JSON report path (default stdout)");
    optimize->add_option("--csv", csv_path, "per-K table CSV path");
    optimize->add_flag("--strict", strict, "exit nonzero when no K is feasible");

    auto* validate = app.add_subcommand("validate", "Cross-check backends and simulation");
    validate->add_option("scenario", scenario_path, "scenario JSON file")->required();
    validate->add_option("--budget", budget, "maximum number of states");
    validate->add_option("--seed", sim.seed, "random seed");
    validate->add_option("--frames", sim.measure_frames, "measured frames per replication");
    validate->add_option("--warmup", sim.warmup_frames, "discarded frames per replication");
    validate->add_option("--reps", sim.replications, "independent replications");
    validate->add_flag("--no-simulation", no_simulation,
                       "skip the Monte Carlo comparison");
    validate->add_option("--out", out_path, "JSON report path (default stdout)");
    validate->add_flag("--strict", strict, "exit nonzero when any check fails");

    auto* preset = app.add_subcommand("preset", "Run a named experiment bundle");
    preset->add_option("name", preset_name, "one of: fig2 fig3 fig4 fig5a fig5b fig6 fig7")
        ->required();
    preset->add_option("--out", out_path, "JSON report path (default stdout)");
    preset->add_option("--csv", csv_path, "combined series CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            auto cfg = drk::scenario::load_scenario_file(scenario_path);
            auto m = backend == "closed-form"
                         ? drk::chain::build_closed_form(cfg, budget)
                         : drk::chain::build_enumeration(cfg, budget);
            auto ss = drk::chain::steady_state(m);
            auto rep = drk::metrics::compute_metrics(cfg, ss);
            if (!matrix_path.empty()) drk::chain::write_matrix_csv(m, matrix_path);
            if (!pi_path.empty()) drk::chain::write_pi_csv(ss, pi_path);
            if (!csv_path.empty())
                write_text(drk::metrics::csv_header() + "\n" +
                               drk::metrics::csv_row(cfg.name, rep) + "\n",
                           csv_path);
            emit_json({{"scenario", drk::scenario::to_json(cfg)},
                       {"backend", backend},
                       {"states", m.states.size()},
                       {"residual", ss.residual},
                       {"iterations", ss.iterations},
                       {"metrics", drk::metrics::to_json(rep)}},
                      out_path);
        } else if (simulate->parsed()) {
            auto cfg = drk::scenario::load_scenario_file(scenario_path);
            drk::sim::SimRun run{cfg, sim.seed, sim.warmup_frames,
                                 sim.measure_frames, sim.replications};
            auto est = drk::sim::simulate(run);
            if (!csv_path.empty()) write_text(occupancy_csv(est), csv_path);
            emit_json({{"scenario", drk::scenario::to_json(cfg)},
                       {"seed", run.seed},
                       {"warmup_frames", run.warmup_frames},
                       {"measure_frames", run.measure_frames},
                       {"replications", run.replications},
                       {"measured_frames", est.measured_frames},
                       {"metrics", drk::metrics::to_json(est.report)}},
                      out_path);
        } else if (sweep->parsed()) {
            auto spec = drk::studio::load_sweep_spec_file(spec_path);
            auto res = drk::studio::sweep(spec);
            if (!csv_path.empty()) write_text(drk::studio::sweep_csv(res), csv_path);
            emit_json(drk::studio::to_json(res), out_path);
        } else if (optimize->parsed()) {
            auto cfg = drk::scenario::load_scenario_file(scenario_path);
            drk::studio::OptimizerConstraints cons;
            if (!constraints_path.empty())
                cons = drk::studio::load_constraints_file(constraints_path);
            auto res = drk::studio::optimize_k(cfg, cons, budget);
            if (!csv_path.empty())
                write_text(drk::studio::optimize_csv(res), csv_path);
            emit_json(drk::studio::to_json(res), out_path);
            if (strict && !res.feasible) {
                std::cerr << "optimize: no feasible K under the given bounds\n";
                return 2;
            }
        } else if (validate->parsed()) {
            auto cfg = drk::scenario::load_scenario_file(scenario_path);
            drk::studio::ValidationOptions opts;
            opts.run_monte_carlo = !no_simulation;
            opts.sim = sim;
            opts.state_budget = budget;
            auto rep = drk::studio::validate_scenario(cfg, opts);
            emit_json(drk::studio::to_json(rep), out_path);
            for (const auto& c : rep.checks)
                std::cerr << (c.pass ? "[ ok ] " : "[FAIL] ") << c.name << ": "
                          << c.detail << "\n";
            if (strict && !rep.pass) return 2;
        } else if (preset->parsed()) {
            auto res = drk::studio::run_preset(preset_name);
            if (!csv_path.empty()) write_text(drk::studio::preset_csv(res), csv_path);
            emit_json(drk::studio::to_json(res), out_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
