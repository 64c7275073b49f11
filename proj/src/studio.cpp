#include "drk/studio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "drk/chain.hpp"
#include "drk/errors.hpp"
#include "drk/radio.hpp"

namespace drk::studio {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string csv_quote(const std::string& s) {
    if (s.empty()) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_opt(double v) { return std::isnan(v) ? std::string() : fmt(v); }

nlohmann::json json_opt(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

struct EvalOutcome {
    bool ok = false;
    std::string error;
    metrics::MetricsReport rep;
};

EvalOutcome eval_analytical(const scenario::ScenarioConfig& cfg, int budget) {
    EvalOutcome out;
    try {
        auto m = chain::build_enumeration(cfg, budget);
        auto ss = chain::steady_state(m);
        out.rep = metrics::compute_metrics(cfg, ss);
        out.ok = true;
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

EvalOutcome eval_monte_carlo(const scenario::ScenarioConfig& cfg,
                             const SimOptions& o) {
    EvalOutcome out;
    try {
        sim::SimRun run{cfg, o.seed, o.warmup_frames, o.measure_frames,
                        o.replications};
        out.rep = sim::simulate(run).report;
        out.ok = true;
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

int as_int(const std::string& axis, double v) {
    double r = std::round(v);
    if (std::abs(v - r) > 1e-9 || r < 0)
        throw ValidationError("axis " + axis + ": value " + fmt(v) +
                              " is not a nonnegative integer");
    return static_cast<int>(r);
}

std::vector<double> grid(double lo, double hi, double step) {
    std::vector<double> out;
    for (int i = 0;; ++i) {
        double v = lo + i * step;
        if (v > hi + step * 1e-9) break;
        out.push_back(v);
    }
    return out;
}

metrics::MetricsReport preferred_report(const SweepPoint& row, bool* ok) {
    if (row.analytical_ok) {
        *ok = true;
        return row.analytical;
    }
    if (row.mc_ok) {
        *ok = true;
        return row.mc;
    }
    *ok = false;
    return {};
}

} // namespace

Engine engine_from_string(const std::string& s) {
    if (s == "analytical") return Engine::analytical;
    if (s == "monte_carlo" || s == "monte-carlo") return Engine::monte_carlo;
    if (s == "both") return Engine::both;
    throw ParseError("engine must be analytical, monte_carlo or both, got \"" +
                     s + "\"");
}

std::string engine_to_string(Engine e) {
    switch (e) {
        case Engine::analytical: return "analytical";
        case Engine::monte_carlo: return "monte_carlo";
        case Engine::both: return "both";
    }
    return "analytical";
}

scenario::ScenarioConfig apply_axis(const scenario::ScenarioConfig& base,
                                    const std::string& axis, double value) {
    scenario::ScenarioConfig cfg = base;
    if (axis == "p") {
        cfg.p_1 = cfg.p_2 = cfg.p_3 = value;
    } else if (axis == "p_1") {
        cfg.p_1 = value;
    } else if (axis == "p_2") {
        cfg.p_2 = value;
    } else if (axis == "p_3") {
        cfg.p_3 = value;
    } else if (axis == "K") {
        cfg.k = as_int(axis, value);
    } else if (axis == "L") {
        cfg.l_1 = cfg.l_2 = cfg.l_3 = as_int(axis, value);
    } else if (axis == "L_1") {
        cfg.l_1 = as_int(axis, value);
    } else if (axis == "L_2") {
        cfg.l_2 = as_int(axis, value);
    } else if (axis == "L_3") {
        cfg.l_3 = as_int(axis, value);
    } else if (axis == "w_3_1") {
        cfg.w_3_1.w_up = value;
    } else if (axis == "N_1") {
        cfg.n_1 = as_int(axis, value);
    } else if (axis == "N_2") {
        cfg.n_2 = as_int(axis, value);
    } else if (axis == "N_3") {
        cfg.n_3 = as_int(axis, value);
    } else {
        throw ValidationError("unsupported sweep axis \"" + axis + "\"");
    }
    scenario::validate(cfg);
    return cfg;
}

SweepSpec load_sweep_spec(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ParseError("$: sweep spec must be an object");
    if (!doc.contains("schema_version") ||
        !doc["schema_version"].is_number_integer() ||
        doc["schema_version"].get<int>() != 1)
        throw ParseError("$.schema_version: missing or unsupported (expect 1)");

    SweepSpec spec;
    if (doc.contains("name")) {
        if (!doc["name"].is_string()) throw ParseError("$.name: must be a string");
        spec.name = doc["name"].get<std::string>();
    }

    if (doc.contains("base") == doc.contains("base_file"))
        throw ParseError("$: exactly one of base (inline scenario) or "
                         "base_file (path) is required");
    if (doc.contains("base")) {
        spec.base = scenario::load_scenario(doc["base"]);
    } else {
        if (!doc["base_file"].is_string())
            throw ParseError("$.base_file: must be a string path");
        spec.base = scenario::load_scenario_file(doc["base_file"].get<std::string>());
    }

    if (!doc.contains("axis") || !doc["axis"].is_string())
        throw ParseError("$.axis: missing or not a string");
    spec.axis = doc["axis"].get<std::string>();

    if (!doc.contains("values") || !doc["values"].is_array())
        throw ParseError("$.values: missing or not an array");
    for (const auto& v : doc["values"]) {
        if (!v.is_number()) throw ParseError("$.values: entries must be numbers");
        spec.values.push_back(v.get<double>());
    }

    if (doc.contains("engine")) {
        if (!doc["engine"].is_string())
            throw ParseError("$.engine: must be a string");
        spec.engine = engine_from_string(doc["engine"].get<std::string>());
    }

    if (doc.contains("state_budget")) {
        if (!doc["state_budget"].is_number_integer() ||
            doc["state_budget"].get<long>() < 1)
            throw ParseError("$.state_budget: must be a positive integer");
        spec.state_budget = doc["state_budget"].get<int>();
    }

    if (doc.contains("simulation")) {
        const auto& s = doc["simulation"];
        if (!s.is_object()) throw ParseError("$.simulation: must be an object");
        auto get_long = [&](const char* key, long fallback, long lo) {
            if (!s.contains(key)) return fallback;
            if (!s[key].is_number_integer() || s[key].get<long>() < lo)
                throw ParseError(std::string("$.simulation.") + key +
                                 ": must be an integer >= " + std::to_string(lo));
            return s[key].get<long>();
        };
        if (s.contains("seed")) {
            if (!s["seed"].is_number_integer())
                throw ParseError("$.simulation.seed: must be an integer");
            spec.sim.seed = s["seed"].get<std::uint64_t>();
        }
        spec.sim.warmup_frames = get_long("warmup_frames", spec.sim.warmup_frames, 0);
        spec.sim.measure_frames = get_long("measure_frames", spec.sim.measure_frames, 1);
        spec.sim.replications =
            static_cast<int>(get_long("replications", spec.sim.replications, 1));
    }

    // every value must land in the parameter's legal domain
    for (double v : spec.values) apply_axis(spec.base, spec.axis, v);
    return spec;
}

SweepSpec load_sweep_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open sweep spec file " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    return load_sweep_spec(doc);
}

SweepResult sweep(const SweepSpec& spec) {
    scenario::validate(spec.base);
    SweepResult res;
    res.spec = spec;

    const bool k_axis = spec.axis == "K";
    const bool want_analytical = spec.engine != Engine::monte_carlo;
    if (k_axis) {
        auto base0 = apply_axis(spec.base, "K", 0.0);
        EvalOutcome ev = want_analytical
                             ? eval_analytical(base0, spec.state_budget)
                             : eval_monte_carlo(base0, spec.sim);
        if (ev.ok) {
            res.has_baseline = true;
            res.baseline = ev.rep;
        }
    }

    for (double v : spec.values) {
        SweepPoint row;
        row.value = v;
        row.cfg = apply_axis(spec.base, spec.axis, v);
        if (spec.engine != Engine::monte_carlo) {
            EvalOutcome ev = eval_analytical(row.cfg, spec.state_budget);
            row.analytical_ok = ev.ok;
            row.analytical_error = ev.error;
            if (ev.ok) row.analytical = ev.rep;
        }
        if (spec.engine != Engine::analytical) {
            EvalOutcome ev = eval_monte_carlo(row.cfg, spec.sim);
            row.mc_ok = ev.ok;
            row.mc_error = ev.error;
            if (ev.ok) row.mc = ev.rep;
        }

        if (k_axis && res.has_baseline) {
            bool ok = false;
            metrics::MetricsReport rep = preferred_report(row, &ok);
            if (ok) {
                const auto& b = res.baseline;
                int k = row.cfg.k;
                if (b.utilization > 0.0)
                    row.delta_u_pct =
                        100.0 * (rep.utilization - b.utilization) / b.utilization;
                if (k > 0) {
                    if (!std::isnan(row.delta_u_pct))
                        row.delta_u_pct_per_k = row.delta_u_pct / k;
                    if (b.blocking[2] > 0.0)
                        row.delta_b3_pct_per_k = 100.0 *
                                                 (b.blocking[2] - rep.blocking[2]) /
                                                 b.blocking[2] / k;
                    if (b.blocking[1] > 0.0)
                        row.delta_b2_pct_per_k = 100.0 *
                                                 (rep.blocking[1] - b.blocking[1]) /
                                                 b.blocking[1] / k;
                }
            }
        }
        res.rows.push_back(std::move(row));
    }
    return res;
}

OptimizerConstraints load_constraints(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ParseError("$: constraints must be an object");
    if (!doc.contains("schema_version") ||
        !doc["schema_version"].is_number_integer() ||
        doc["schema_version"].get<int>() != 1)
        throw ParseError("$.schema_version: missing or unsupported (expect 1)");
    OptimizerConstraints out;
    auto read_block = [&](const char* key, std::array<double, 3>& dst) {
        if (!doc.contains(key)) return;
        const auto& blk = doc[key];
        if (!blk.is_object())
            throw ParseError(std::string("$.") + key + ": must be an object");
        const char* groups[3] = {"group_1", "group_2", "group_3"};
        for (int g = 0; g < 3; ++g) {
            if (!blk.contains(groups[g])) continue;
            if (!blk[groups[g]].is_number())
                throw ParseError(std::string("$.") + key + "." + groups[g] +
                                 ": must be a number");
            double v = blk[groups[g]].get<double>();
            if (v < 0.0 || v > 1.0)
                throw ParseError(std::string("$.") + key + "." + groups[g] +
                                 ": must be within [0, 1]");
            dst[static_cast<size_t>(g)] = v;
        }
    };
    read_block("blocking_max", out.blocking_max);
    read_block("collision_max", out.collision_max);
    return out;
}

OptimizerConstraints load_constraints_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open constraints file " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    return load_constraints(doc);
}

OptimizeResult optimize_k(const scenario::ScenarioConfig& cfg,
                          const OptimizerConstraints& constraints,
                          int state_budget) {
    scenario::validate(cfg);
    OptimizeResult res;
    res.cfg = cfg;
    res.constraints = constraints;

    scenario::ScenarioConfig c0 = cfg;
    c0.k = 0;
    EvalOutcome base = eval_analytical(c0, state_budget);
    res.has_baseline = base.ok;
    if (base.ok) res.baseline = base.rep;

    double best = 0.0;
    for (int k = 1; k <= cfg.m_2; ++k) {
        scenario::ScenarioConfig ck = cfg;
        ck.k = k;
        KCandidate cand;
        cand.k = k;
        EvalOutcome ev = eval_analytical(ck, state_budget);
        cand.ok = ev.ok;
        cand.error = ev.error;
        if (ev.ok) {
            cand.report = ev.rep;
            cand.objective = ev.rep.utilization / k;
            const char* bn[3] = {"B_1", "B_2", "B_3"};
            const char* dn[3] = {"D_1", "D_2", "D_3"};
            for (int g = 0; g < 3; ++g) {
                auto gi = static_cast<size_t>(g);
                if (ev.rep.blocking[gi] > constraints.blocking_max[gi])
                    cand.violations.push_back(std::string(bn[g]) + " = " +
                                              fmt_short(ev.rep.blocking[gi]) +
                                              " exceeds " +
                                              fmt_short(constraints.blocking_max[gi]));
                if (ev.rep.collision[gi] > constraints.collision_max[gi])
                    cand.violations.push_back(std::string(dn[g]) + " = " +
                                              fmt_short(ev.rep.collision[gi]) +
                                              " exceeds " +
                                              fmt_short(constraints.collision_max[gi]));
            }
            cand.feasible = cand.violations.empty();
            if (cand.feasible && (!res.feasible || cand.objective > best)) {
                res.feasible = true;
                res.best_k = k;
                best = cand.objective;
            }
        }
        res.table.push_back(std::move(cand));
    }
    return res;
}

ValidationReport validate_scenario(const scenario::ScenarioConfig& cfg,
                                   const ValidationOptions& opts) {
    scenario::validate(cfg);
    ValidationReport rep;
    rep.cfg = cfg;
    auto add = [&](const std::string& name, bool pass, const std::string& detail) {
        rep.checks.push_back({name, pass, detail});
    };

    auto m_enum = chain::build_enumeration(cfg, opts.state_budget);
    auto m_closed = chain::build_closed_form(cfg, opts.state_budget);
    const auto n = static_cast<int>(m_enum.states.size());

    double worst_row_e = 0.0, worst_row_c = 0.0;
    for (int i = 0; i < n; ++i) {
        worst_row_e = std::max(worst_row_e, std::abs(m_enum.row_sum(i) - 1.0));
        worst_row_c = std::max(worst_row_c, std::abs(m_closed.row_sum(i) - 1.0));
    }
    add("row-sums-enumeration", worst_row_e <= opts.row_sum_tol,
        "max |row sum - 1| = " + fmt_short(worst_row_e));
    add("row-sums-closed-form", worst_row_c <= opts.row_sum_tol,
        "max |row sum - 1| = " + fmt_short(worst_row_c));

    double worst_entry = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto& re = m_enum.rows[static_cast<size_t>(i)];
        const auto& rc = m_closed.rows[static_cast<size_t>(i)];
        size_t x = 0, y = 0;
        while (x < re.size() || y < rc.size()) {
            int col;
            double pe = 0.0, pc = 0.0;
            if (y == rc.size() || (x < re.size() && re[x].first < rc[y].first)) {
                col = re[x].first;
                pe = re[x].second;
                ++x;
            } else if (x == re.size() || rc[y].first < re[x].first) {
                col = rc[y].first;
                pc = rc[y].second;
                ++y;
            } else {
                col = re[x].first;
                pe = re[x].second;
                pc = rc[y].second;
                ++x;
                ++y;
            }
            double diff = std::abs(pe - pc);
            worst_entry = std::max(worst_entry, diff);
            if (diff > opts.entry_tol) {
                Discrepancy d;
                d.from = m_enum.states[static_cast<size_t>(i)];
                d.to = m_enum.states[static_cast<size_t>(col)];
                d.enumeration = pe;
                d.closed_form = pc;
                d.case_id = chain::closed_form_entry(cfg, d.from, d.to).second;
                rep.discrepancies.push_back(std::move(d));
            }
        }
    }
    add("backend-agreement", rep.discrepancies.empty(),
        "max entry difference = " + fmt_short(worst_entry) + ", entries above " +
            fmt_short(opts.entry_tol) + ": " +
            std::to_string(rep.discrepancies.size()));

    auto ss_enum = chain::steady_state(m_enum);
    auto ss_closed = chain::steady_state(m_closed);
    double dpi = 0.0;
    for (size_t i = 0; i < ss_enum.pi.size(); ++i)
        dpi = std::max(dpi, std::abs(ss_enum.pi[i] - ss_closed.pi[i]));
    add("steady-state-agreement", dpi <= opts.pi_tol,
        "max |pi difference| = " + fmt_short(dpi));

    if (opts.run_monte_carlo) {
        sim::SimRun run{cfg, opts.sim.seed, opts.sim.warmup_frames,
                        opts.sim.measure_frames, opts.sim.replications};
        auto est = sim::simulate(run);
        auto an = metrics::compute_metrics(cfg, ss_enum);

        struct Row {
            const char* name;
            double a, m, se;
        };
        const Row rows[] = {
            {"U", an.utilization, est.report.utilization, est.report.utilization_se},
            {"B_1", an.blocking[0], est.report.blocking[0], est.report.blocking_se[0]},
            {"B_2", an.blocking[1], est.report.blocking[1], est.report.blocking_se[1]},
            {"B_3", an.blocking[2], est.report.blocking[2], est.report.blocking_se[2]},
            {"D_1", an.collision[0], est.report.collision[0], est.report.collision_se[0]},
            {"D_2", an.collision[1], est.report.collision[1], est.report.collision_se[1]},
            {"D_3", an.collision[2], est.report.collision[2], est.report.collision_se[2]},
        };
        bool all = true;
        std::string worst_name = "none";
        double worst_ratio = 0.0;
        std::string worst_detail;
        for (const auto& row : rows) {
            double tol = std::max(3.0 * row.se, 1e-9);
            double gap = std::abs(row.a - row.m);
            bool pass = gap <= tol;
            all = all && pass;
            double ratio = gap / tol;
            if (ratio >= worst_ratio) {
                worst_ratio = ratio;
                worst_name = row.name;
                worst_detail = std::string(row.name) + ": analytical " +
                               fmt_short(row.a) + ", simulated " + fmt_short(row.m) +
                               " (se " + fmt_short(row.se) + ")";
            }
        }
        add("simulation-three-sigma", all, "worst metric " + worst_detail);

        chain::SteadyStateDistribution emp;
        emp.states = est.states;
        emp.pi = est.occupancy;
        double tv = chain::total_variation(ss_enum, emp);
        add("empirical-distribution", tv < opts.tv_limit,
            "total variation = " + fmt_short(tv) + " over " +
                std::to_string(est.measured_frames) + " frames");
    }

    rep.pass = rep.discrepancies.empty();
    for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
    return rep;
}

scenario::ScenarioConfig two_cell_reference() {
    scenario::ScenarioConfig cfg;
    cfg.name = "two-cell-reference";
    cfg.n_1 = cfg.n_2 = cfg.n_3 = 6;
    cfg.m_1 = cfg.m_2 = 3;
    cfg.k = 3;
    cfg.l_1 = cfg.l_2 = cfg.l_3 = 6;
    cfg.p_1 = cfg.p_2 = cfg.p_3 = 0.4;
    cfg.q = 0.25;
    cfg.h = 250000.0;
    radio::LinkQuality w{0.806, 0.806};
    cfg.w_1_1 = cfg.w_3_1 = cfg.w_3_2 = cfg.w_2_2 = w;
    return cfg;
}

scenario::ScenarioConfig macrocell_reference() {
    scenario::ScenarioConfig cfg;
    cfg.name = "macrocell-reference";
    cfg.n_1 = 25;
    cfg.n_2 = 25;
    cfg.n_3 = 40;
    cfg.m_1 = cfg.m_2 = 10;
    cfg.k = 10;
    cfg.l_1 = 25;
    cfg.l_2 = 25;
    cfg.l_3 = 40;
    cfg.p_1 = cfg.p_2 = cfg.p_3 = 0.2;
    cfg.h = 250000.0;
    cfg.q = 0.41;

    radio::RadioParams rp;
    rp.gamma_q_up = rp.gamma_q_down = -85.0;
    rp.p_t_up = rp.p_t_down = 30.0;
    rp.w_up_db = rp.w_down_db = -31.54;
    rp.sigma_psi = 3.65;
    rp.delta = 3.0;
    rp.d_0_up = rp.d_0_down = 1.0;
    rp.distance = 220.0;
    radio::LinkQuality w = radio::link_quality(rp);
    cfg.w_1_1 = cfg.w_3_1 = cfg.w_3_2 = cfg.w_2_2 = w;
    return cfg;
}

std::vector<std::string> preset_names() {
    return {"fig2", "fig3", "fig4", "fig5a", "fig5b", "fig6", "fig7"};
}

PresetResult run_preset(const std::string& name) {
    PresetResult out;
    out.name = name;

    auto push = [&](const std::string& label, SweepSpec spec) {
        spec.name = label;
        out.series.push_back({label, sweep(spec)});
    };

    if (name == "fig2") {
        for (int k : {0, 3}) {
            SweepSpec spec;
            spec.base = two_cell_reference();
            spec.base.k = k;
            spec.axis = "p";
            spec.values = grid(0.05, 0.95, 0.05);
            push("K=" + std::to_string(k), spec);
        }
    } else if (name == "fig3" || name == "fig4") {
        for (int k : {0, 1, 2, 3}) {
            SweepSpec spec;
            spec.base = two_cell_reference();
            spec.base.k = k;
            spec.axis = "w_3_1";
            spec.values = grid(0.5, 1.0, 0.05);
            push("K=" + std::to_string(k), spec);
        }
    } else if (name == "fig5a") {
        for (int n3 : {4, 6, 8}) {
            SweepSpec spec;
            spec.base = two_cell_reference();
            spec.base.l_1 = spec.base.l_2 = 3;
            spec.base.n_3 = n3;
            spec.axis = "p";
            spec.values = grid(0.05, 0.95, 0.05);
            push("N_3=" + std::to_string(n3), spec);
        }
    } else if (name == "fig5b") {
        SweepSpec spec;
        spec.base = two_cell_reference();
        spec.axis = "L";
        spec.values = grid(1.0, 12.0, 1.0);
        push("two-cell", spec);
    } else if (name == "fig6" || name == "fig7") {
        SweepSpec spec;
        spec.base = macrocell_reference();
        spec.axis = "K";
        spec.values = grid(0.0, 10.0, 1.0);
        push("macrocell", spec);
    } else {
        throw ValidationError("unknown preset \"" + name +
                              "\" (available: fig2 fig3 fig4 fig5a fig5b fig6 fig7)");
    }
    return out;
}

nlohmann::json to_json(const SweepResult& r) {
    nlohmann::json spec{
        {"name", r.spec.name},
        {"axis", r.spec.axis},
        {"engine", engine_to_string(r.spec.engine)},
        {"values", r.spec.values},
        {"state_budget", r.spec.state_budget},
        {"base", scenario::to_json(r.spec.base)},
    };
    if (r.spec.engine != Engine::analytical)
        spec["simulation"] = {{"seed", r.spec.sim.seed},
                              {"warmup_frames", r.spec.sim.warmup_frames},
                              {"measure_frames", r.spec.sim.measure_frames},
                              {"replications", r.spec.sim.replications}};

    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::json j{{"value", row.value}};
        if (r.spec.engine != Engine::monte_carlo) {
            if (row.analytical_ok)
                j["analytical"] = metrics::to_json(row.analytical);
            else
                j["analytical_error"] = row.analytical_error;
        }
        if (r.spec.engine != Engine::analytical) {
            if (row.mc_ok)
                j["monte_carlo"] = metrics::to_json(row.mc);
            else
                j["monte_carlo_error"] = row.mc_error;
        }
        if (r.spec.axis == "K")
            j["baseline_deltas"] = {
                {"delta_u_pct", json_opt(row.delta_u_pct)},
                {"delta_u_pct_per_k", json_opt(row.delta_u_pct_per_k)},
                {"delta_b3_pct_per_k", json_opt(row.delta_b3_pct_per_k)},
                {"delta_b2_pct_per_k", json_opt(row.delta_b2_pct_per_k)},
            };
        rows.push_back(std::move(j));
    }

    nlohmann::json out{{"spec", std::move(spec)}, {"rows", std::move(rows)}};
    out["baseline"] =
        r.has_baseline ? metrics::to_json(r.baseline) : nlohmann::json(nullptr);
    return out;
}

nlohmann::json to_json(const OptimizeResult& r) {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& c : r.table) {
        nlohmann::json j{{"k", c.k}};
        if (c.ok) {
            j["metrics"] = metrics::to_json(c.report);
            j["objective"] = c.objective;
            j["feasible"] = c.feasible;
            j["violations"] = c.violations;
        } else {
            j["error"] = c.error;
        }
        table.push_back(std::move(j));
    }
    return nlohmann::json{
        {"scenario", scenario::to_json(r.cfg)},
        {"constraints",
         {{"blocking_max",
           {{"group_1", r.constraints.blocking_max[0]},
            {"group_2", r.constraints.blocking_max[1]},
            {"group_3", r.constraints.blocking_max[2]}}},
          {"collision_max",
           {{"group_1", r.constraints.collision_max[0]},
            {"group_2", r.constraints.collision_max[1]},
            {"group_3", r.constraints.collision_max[2]}}}}},
        {"feasible", r.feasible},
        {"best_k", r.feasible ? nlohmann::json(r.best_k) : nlohmann::json(nullptr)},
        {"baseline",
         r.has_baseline ? metrics::to_json(r.baseline) : nlohmann::json(nullptr)},
        {"table", std::move(table)},
    };
}

nlohmann::json to_json(const ValidationReport& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    nlohmann::json disc = nlohmann::json::array();
    for (const auto& d : r.discrepancies)
        disc.push_back({{"from", {d.from.a, d.from.b, d.from.c, d.from.d}},
                        {"to", {d.to.a, d.to.b, d.to.c, d.to.d}},
                        {"enumeration", d.enumeration},
                        {"closed_form", d.closed_form},
                        {"case_id", d.case_id}});
    return nlohmann::json{{"scenario", scenario::to_json(r.cfg)},
                          {"pass", r.pass},
                          {"checks", std::move(checks)},
                          {"discrepancies", std::move(disc)}};
}

nlohmann::json to_json(const PresetResult& r) {
    nlohmann::json series = nlohmann::json::array();
    for (const auto& s : r.series)
        series.push_back({{"label", s.label}, {"sweep", to_json(s.result)}});
    return nlohmann::json{{"preset", r.name}, {"series", std::move(series)}};
}

namespace {

const char* kSweepHeader =
    "series,axis,value,source,ok,error,utilization,throughput,"
    "B_1,B_2,B_3,D_1,D_2,D_3,"
    "utilization_se,B_1_se,B_2_se,B_3_se,D_1_se,D_2_se,D_3_se,"
    "delta_u_pct,delta_u_pct_per_k,delta_b3_pct_per_k,delta_b2_pct_per_k";

void sweep_csv_line(std::ostringstream& out, const std::string& series,
                    const std::string& axis, const SweepPoint& row,
                    const std::string& source, bool ok, const std::string& error,
                    const metrics::MetricsReport& rep) {
    out << series << ',' << axis << ',' << fmt(row.value) << ',' << source << ','
        << (ok ? 1 : 0) << ',' << csv_quote(error);
    if (ok) {
        out << ',' << fmt(rep.utilization) << ',' << fmt(rep.throughput);
        for (double v : rep.blocking) out << ',' << fmt(v);
        for (double v : rep.collision) out << ',' << fmt(v);
        out << ',' << fmt(rep.utilization_se);
        for (double v : rep.blocking_se) out << ',' << fmt(v);
        for (double v : rep.collision_se) out << ',' << fmt(v);
    } else {
        for (int i = 0; i < 15; ++i) out << ',';
    }
    out << ',' << csv_opt(row.delta_u_pct) << ',' << csv_opt(row.delta_u_pct_per_k)
        << ',' << csv_opt(row.delta_b3_pct_per_k) << ','
        << csv_opt(row.delta_b2_pct_per_k) << '\n';
}

void sweep_csv_body(std::ostringstream& out, const SweepResult& r,
                    const std::string& series) {
    for (const auto& row : r.rows) {
        if (r.spec.engine != Engine::monte_carlo)
            sweep_csv_line(out, series, r.spec.axis, row, "analytical",
                           row.analytical_ok, row.analytical_error, row.analytical);
        if (r.spec.engine != Engine::analytical)
            sweep_csv_line(out, series, r.spec.axis, row, "monte-carlo", row.mc_ok,
                           row.mc_error, row.mc);
    }
}

} // namespace

std::string sweep_csv(const SweepResult& r) {
    std::ostringstream out;
    out << kSweepHeader << '\n';
    sweep_csv_body(out, r, r.spec.name);
    return out.str();
}

std::string preset_csv(const PresetResult& r) {
    std::ostringstream out;
    out << kSweepHeader << '\n';
    for (const auto& s : r.series) sweep_csv_body(out, s.result, s.label);
    return out.str();
}

std::string optimize_csv(const OptimizeResult& r) {
    std::ostringstream out;
    out << "k,role,ok,error,feasible,objective,violations,utilization,"
           "throughput,B_1,B_2,B_3,D_1,D_2,D_3\n";
    auto line = [&](int k, const std::string& role, bool ok,
                    const std::string& error, const std::string& feasible,
                    const std::string& objective, const std::string& violations,
                    const metrics::MetricsReport* rep) {
        out << k << ',' << role << ',' << (ok ? 1 : 0) << ',' << csv_quote(error)
            << ',' << feasible << ',' << objective << ',' << csv_quote(violations);
        if (rep) {
            out << ',' << fmt(rep->utilization) << ',' << fmt(rep->throughput);
            for (double v : rep->blocking) out << ',' << fmt(v);
            for (double v : rep->collision) out << ',' << fmt(v);
        } else {
            for (int i = 0; i < 8; ++i) out << ',';
        }
        out << '\n';
    };
    if (r.has_baseline)
        line(0, "baseline", true, "", "", "", "", &r.baseline);
    for (const auto& c : r.table) {
        std::string role = c.k == r.best_k && r.feasible ? "best" : "candidate";
        if (!c.ok) {
            line(c.k, role, false, c.error, "", "", "", nullptr);
            continue;
        }
        std::string joined;
        for (const auto& v : c.violations) {
            if (!joined.empty()) joined += "; ";
            joined += v;
        }
        line(c.k, role, true, "", c.feasible ? "1" : "0", fmt(c.objective), joined,
             &c.report);
    }
    return out.str();
}

} // namespace drk::studio
