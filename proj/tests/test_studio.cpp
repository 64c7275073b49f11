#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "drk/chain.hpp"
#include "drk/errors.hpp"
#include "drk/metrics.hpp"
#include "drk/studio.hpp"
#include "support/configs.hpp"

using namespace drk;
using nlohmann::json;

namespace {

json sweep_doc(const scenario::ScenarioConfig& base) {
    json doc;
    doc["schema_version"] = 1;
    doc["base"] = scenario::to_json(base);
    doc["axis"] = "p";
    doc["values"] = {0.1, 0.2};
    return doc;
}

metrics::MetricsReport direct(const scenario::ScenarioConfig& cfg) {
    return metrics::compute_metrics(
        cfg, chain::steady_state(chain::build_enumeration(cfg)));
}

std::size_t line_count(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

std::size_t comma_count(const std::string& line) {
    std::size_t n = 0;
    for (char c : line)
        if (c == ',') ++n;
    return n;
}

} // namespace

TEST_CASE("engine names round-trip") {
    for (auto e : {studio::Engine::analytical, studio::Engine::monte_carlo,
                   studio::Engine::both})
        CHECK(studio::engine_from_string(studio::engine_to_string(e)) == e);
    CHECK(studio::engine_from_string("monte-carlo") ==
          studio::Engine::monte_carlo);
    CHECK_THROWS_AS(studio::engine_from_string("exact"), ParseError);
}

TEST_CASE("axis application touches exactly the advertised fields") {
    const auto base = test::two_cell(0.4, 2);

    auto all_p = studio::apply_axis(base, "p", 0.7);
    CHECK(all_p.p_1 == 0.7);
    CHECK(all_p.p_2 == 0.7);
    CHECK(all_p.p_3 == 0.7);

    auto one_p = studio::apply_axis(base, "p_2", 0.9);
    CHECK(one_p.p_2 == 0.9);
    CHECK(one_p.p_1 == base.p_1);
    CHECK(one_p.p_3 == base.p_3);

    auto k2 = studio::apply_axis(base, "K", 3.0);
    CHECK(k2.k == 3);

    auto all_l = studio::apply_axis(base, "L", 4.0);
    CHECK(all_l.l_1 == 4);
    CHECK(all_l.l_2 == 4);
    CHECK(all_l.l_3 == 4);

    auto one_l = studio::apply_axis(base, "L_3", 9.0);
    CHECK(one_l.l_3 == 9);
    CHECK(one_l.l_1 == base.l_1);

    auto n3 = studio::apply_axis(base, "N_3", 2.0);
    CHECK(n3.n_3 == 2);

    // the transfer-link axis moves the request direction only
    auto w = studio::apply_axis(base, "w_3_1", 0.65);
    CHECK(w.w_3_1.w_up == 0.65);
    CHECK(w.w_3_1.w_down == base.w_3_1.w_down);
    CHECK(w.w_1_1 == base.w_1_1);
    CHECK(w.w_3_2 == base.w_3_2);
    CHECK(w.w_2_2 == base.w_2_2);
}

TEST_CASE("axis application rejects bad values") {
    const auto base = test::two_cell(0.4, 2);
    CHECK_THROWS_AS(studio::apply_axis(base, "K", 2.5), ValidationError);
    CHECK_THROWS_AS(studio::apply_axis(base, "K", -1.0), ValidationError);
    CHECK_THROWS_AS(studio::apply_axis(base, "K", 5.0), ValidationError);
    CHECK_THROWS_AS(studio::apply_axis(base, "p", 1.5), ValidationError);
    CHECK_THROWS_AS(studio::apply_axis(base, "L", 0.0), ValidationError);
    CHECK_THROWS_AS(studio::apply_axis(base, "m_1", 4.0), ValidationError);
    CHECK_THROWS_AS(studio::apply_axis(base, "w_down", 0.5), ValidationError);
}

TEST_CASE("sweep spec loading") {
    const auto base = test::two_cell(0.4, 2);

    SUBCASE("full document") {
        json doc = sweep_doc(base);
        doc["name"] = "traffic";
        doc["engine"] = "both";
        doc["state_budget"] = 5000;
        doc["simulation"] = {{"seed", 42},
                             {"warmup_frames", 5},
                             {"measure_frames", 100},
                             {"replications", 2}};
        const auto spec = studio::load_sweep_spec(doc);
        CHECK(spec.name == "traffic");
        CHECK(spec.base == base);
        CHECK(spec.axis == "p");
        CHECK(spec.values == std::vector<double>{0.1, 0.2});
        CHECK(spec.engine == studio::Engine::both);
        CHECK(spec.state_budget == 5000);
        CHECK(spec.sim.seed == 42);
        CHECK(spec.sim.warmup_frames == 5);
        CHECK(spec.sim.measure_frames == 100);
        CHECK(spec.sim.replications == 2);
    }

    SUBCASE("defaults") {
        const auto spec = studio::load_sweep_spec(sweep_doc(base));
        CHECK(spec.name == "sweep");
        CHECK(spec.engine == studio::Engine::analytical);
        CHECK(spec.state_budget == 20000);
        CHECK(spec.sim.seed == 1);
    }

    SUBCASE("base_file instead of inline base") {
        json doc = sweep_doc(base);
        doc.erase("base");
        doc["base_file"] =
            std::string(DRK_SOURCE_DIR) + "/scenarios/two_cell_reference.json";
        const auto spec = studio::load_sweep_spec(doc);
        CHECK(spec.base == studio::two_cell_reference());
    }

    SUBCASE("rejections") {
        json doc = sweep_doc(base);
        doc.erase("schema_version");
        CHECK_THROWS_AS(studio::load_sweep_spec(doc), ParseError);

        doc = sweep_doc(base);
        doc["schema_version"] = 2;
        CHECK_THROWS_AS(studio::load_sweep_spec(doc), ParseError);

        doc = sweep_doc(base);
        doc["base_file"] = "x.json"; // both forms at once
        CHECK_THROWS_AS(studio::load_sweep_spec(doc), ParseError);

        doc = sweep_doc(base);
        doc.erase("base"); // neither form
        CHECK_THROWS_AS(studio::load_sweep_spec(doc), ParseError);

        doc = sweep_doc(base);
        doc.erase("axis");
        CHECK_THROWS_AS(studio::load_sweep_spec(doc), ParseError);

        doc = sweep_doc(base);
        doc["engine"] = "exact";
        CHECK_THROWS_AS(studio::load_sweep_spec(doc), ParseError);

        doc = sweep_doc(base);
        doc["values"] = {0.1, "x"};
        CHECK_THROWS_AS(studio::load_sweep_spec(doc), ParseError);

        doc = sweep_doc(base);
        doc["state_budget"] = 0;
        CHECK_THROWS_AS(studio::load_sweep_spec(doc), ParseError);

        doc = sweep_doc(base);
        doc["simulation"] = {{"measure_frames", 0}};
        CHECK_THROWS_AS(studio::load_sweep_spec(doc), ParseError);

        // values outside the axis domain are caught at load time
        doc = sweep_doc(base);
        doc["values"] = {0.1, 1.5};
        CHECK_THROWS_AS(studio::load_sweep_spec(doc), ValidationError);

        doc = sweep_doc(base);
        doc["axis"] = "K";
        doc["values"] = {0.0, 1.5};
        CHECK_THROWS_AS(studio::load_sweep_spec(doc), ValidationError);

        CHECK_THROWS_AS(studio::load_sweep_spec(json::array()), ParseError);
    }

    SUBCASE("file loading") {
        const std::string path = "studio_spec_tmp.json";
        {
            std::ofstream out(path);
            out << sweep_doc(base).dump(2);
        }
        const auto spec = studio::load_sweep_spec_file(path);
        CHECK(spec.base == base);
        std::remove(path.c_str());

        CHECK_THROWS_AS(studio::load_sweep_spec_file("no_such_spec.json"),
                        ParseError);
        {
            std::ofstream out(path);
            out << "{ not json";
        }
        CHECK_THROWS_AS(studio::load_sweep_spec_file(path), ParseError);
        std::remove(path.c_str());
    }
}

TEST_CASE("plain sweep rows carry per-point results") {
    studio::SweepSpec spec;
    spec.base = test::two_cell(0.4, 1);
    spec.axis = "p";
    spec.values = {0.2, 0.4};
    const auto res = studio::sweep(spec);

    CHECK(res.has_baseline == false);
    REQUIRE(res.rows.size() == 2);
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
        const auto& row = res.rows[i];
        CHECK(row.value == spec.values[i]);
        CHECK(row.cfg.p_1 == spec.values[i]);
        CHECK(row.analytical_ok);
        CHECK(row.mc_ok == false);
        const auto want = direct(row.cfg);
        CHECK(row.analytical.utilization == want.utilization);
        CHECK(row.analytical.blocking[2] == want.blocking[2]);
        // baseline-relative columns only exist on the pool-size axis
        CHECK(std::isnan(row.delta_u_pct));
        CHECK(std::isnan(row.delta_u_pct_per_k));
        CHECK(std::isnan(row.delta_b3_pct_per_k));
        CHECK(std::isnan(row.delta_b2_pct_per_k));
    }

    spec.values.clear();
    CHECK(studio::sweep(spec).rows.empty());

    spec.base.k = 4; // broken base: pool larger than the donor cell
    spec.values = {0.2};
    CHECK_THROWS_AS(studio::sweep(spec), ValidationError);
}

TEST_CASE("pool-size sweeps report gains against the zero-pool baseline") {
    studio::SweepSpec spec;
    spec.base = test::two_cell(0.4, 2);
    spec.axis = "K";
    spec.values = {0.0, 1.0, 3.0};
    const auto res = studio::sweep(spec);

    REQUIRE(res.has_baseline);
    const auto base0 = direct(studio::apply_axis(spec.base, "K", 0.0));
    CHECK(res.baseline.utilization == base0.utilization);
    CHECK(res.baseline.blocking[1] == base0.blocking[1]);
    CHECK(res.baseline.blocking[2] == base0.blocking[2]);

    REQUIRE(res.rows.size() == 3);
    const auto& r0 = res.rows[0];
    CHECK(r0.delta_u_pct == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(std::isnan(r0.delta_u_pct_per_k)); // no per-channel rate at K = 0

    for (const auto& row : {res.rows[1], res.rows[2]}) {
        REQUIRE(row.analytical_ok);
        const int k = row.cfg.k;
        const double du = 100.0 *
                          (row.analytical.utilization - base0.utilization) /
                          base0.utilization;
        CHECK(row.delta_u_pct == doctest::Approx(du).epsilon(1e-12));
        CHECK(row.delta_u_pct_per_k == doctest::Approx(du / k).epsilon(1e-12));
        const double db3 = 100.0 *
                           (base0.blocking[2] - row.analytical.blocking[2]) /
                           base0.blocking[2] / k;
        CHECK(row.delta_b3_pct_per_k == doctest::Approx(db3).epsilon(1e-12));
        const double db2 = 100.0 *
                           (row.analytical.blocking[1] - base0.blocking[1]) /
                           base0.blocking[1] / k;
        CHECK(row.delta_b2_pct_per_k == doctest::Approx(db2).epsilon(1e-12));
    }
}

TEST_CASE("one oversized point does not abort the sweep") {
    studio::SweepSpec spec;
    spec.base = test::two_cell(0.4, 2);
    spec.axis = "K";
    spec.values = {0.0, 3.0};

    const auto n0 = chain::enumerate_states(
                        studio::apply_axis(spec.base, "K", 0.0)).size();
    const auto n3 = chain::enumerate_states(
                        studio::apply_axis(spec.base, "K", 3.0)).size();
    REQUIRE(n0 < n3);
    spec.state_budget = static_cast<int>((n0 + n3) / 2);

    const auto res = studio::sweep(spec);
    CHECK(res.has_baseline); // the baseline fits the budget
    REQUIRE(res.rows.size() == 2);
    CHECK(res.rows[0].analytical_ok);
    CHECK(res.rows[1].analytical_ok == false);
    CHECK(!res.rows[1].analytical_error.empty());
    CHECK(std::isnan(res.rows[1].delta_u_pct));

    const std::string csv = studio::sweep_csv(res);
    CHECK(line_count(csv) == 3); // header and one line per point
}

TEST_CASE("monte carlo sweeps fill the empirical slots") {
    studio::SweepSpec spec;
    spec.base = test::tiny();
    spec.axis = "K";
    spec.values = {1.0};
    spec.engine = studio::Engine::monte_carlo;
    spec.sim.seed = 3;
    spec.sim.warmup_frames = 100;
    spec.sim.measure_frames = 2000;
    spec.sim.replications = 2;

    const auto res = studio::sweep(spec);
    CHECK(res.has_baseline); // estimated with the same engine
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].mc_ok);
    CHECK(res.rows[0].analytical_ok == false);
    CHECK(res.rows[0].mc.source == "monte-carlo");
    // deltas fall back to the empirical report when that is all there is
    CHECK(!std::isnan(res.rows[0].delta_u_pct));

    const std::string csv = studio::sweep_csv(res);
    CHECK(csv.find(",monte-carlo,") != std::string::npos);
    CHECK(csv.find(",analytical,") == std::string::npos);
}

TEST_CASE("constraint loading") {
    json doc{{"schema_version", 1},
             {"blocking_max", {{"group_3", 0.05}}},
             {"collision_max", {{"group_1", 0.1}}}};
    const auto c = studio::load_constraints(doc);
    CHECK(c.blocking_max[0] == 1.0);
    CHECK(c.blocking_max[1] == 1.0);
    CHECK(c.blocking_max[2] == 0.05);
    CHECK(c.collision_max[0] == 0.1);
    CHECK(c.collision_max[1] == 1.0);

    CHECK_THROWS_AS(studio::load_constraints(json{{"blocking_max", 1}}),
                    ParseError);
    CHECK_THROWS_AS(
        studio::load_constraints(json{
            {"schema_version", 1}, {"blocking_max", {{"group_1", 1.5}}}}),
        ParseError);
    CHECK_THROWS_AS(
        studio::load_constraints(json{
            {"schema_version", 1}, {"collision_max", {{"group_2", -0.1}}}}),
        ParseError);
    CHECK_THROWS_AS(studio::load_constraints_file("no_such_constraints.json"),
                    ParseError);
}

TEST_CASE("pool-size optimizer") {
    const auto cfg = test::two_cell(0.4, 2);

    SUBCASE("unconstrained search maximizes utilization per channel") {
        const auto res = studio::optimize_k(cfg, {});
        REQUIRE(res.has_baseline);
        CHECK(res.baseline.utilization ==
              direct(studio::apply_axis(cfg, "K", 0.0)).utilization);
        REQUIRE(static_cast<int>(res.table.size()) == cfg.m_2);
        CHECK(res.feasible);

        int want = -1;
        double best = 0.0;
        for (const auto& cand : res.table) {
            REQUIRE(cand.ok);
            CHECK(cand.feasible);
            CHECK(cand.violations.empty());
            CHECK(cand.objective ==
                  doctest::Approx(cand.report.utilization / cand.k)
                      .epsilon(1e-15));
            if (want == -1 || cand.objective > best) {
                want = cand.k;
                best = cand.objective;
            }
        }
        CHECK(res.best_k == want);
    }

    SUBCASE("impossible targets leave the whole table infeasible") {
        studio::OptimizerConstraints zero;
        zero.blocking_max = {0.0, 0.0, 0.0};
        zero.collision_max = {0.0, 0.0, 0.0};
        const auto res = studio::optimize_k(cfg, zero);
        CHECK(res.feasible == false);
        CHECK(res.best_k == -1);
        for (const auto& cand : res.table) {
            CHECK(cand.feasible == false);
            CHECK(!cand.violations.empty());
        }
    }

    SUBCASE("tighter targets keep fewer candidates") {
        const auto open = studio::optimize_k(cfg, {});
        // pick a transfer-blocking target separating the candidates
        double lo = 1.0, hi = 0.0;
        for (const auto& cand : open.table) {
            lo = std::min(lo, cand.report.blocking[2]);
            hi = std::max(hi, cand.report.blocking[2]);
        }
        REQUIRE(lo < hi);
        studio::OptimizerConstraints mid;
        mid.blocking_max[2] = 0.5 * (lo + hi);
        const auto res = studio::optimize_k(cfg, mid);
        int n_feasible = 0;
        for (std::size_t i = 0; i < res.table.size(); ++i) {
            const bool want =
                open.table[i].report.blocking[2] <= mid.blocking_max[2];
            CHECK(res.table[i].feasible == want);
            n_feasible += want ? 1 : 0;
        }
        CHECK(n_feasible > 0);
        CHECK(n_feasible < static_cast<int>(res.table.size()));
        CHECK(res.feasible);
        CHECK(res.table[static_cast<std::size_t>(res.best_k) - 1].feasible);
    }

    SUBCASE("csv table") {
        const auto res = studio::optimize_k(cfg, {});
        const std::string csv = studio::optimize_csv(res);
        // header, baseline, one line per candidate
        CHECK(line_count(csv) == 2 + res.table.size());
        CHECK(csv.find(",best,") != std::string::npos);
        CHECK(csv.find("0,baseline,") != std::string::npos);
        std::istringstream in(csv);
        std::string header, line;
        std::getline(in, header);
        while (std::getline(in, line))
            CHECK(comma_count(line) == comma_count(header));
    }
}

TEST_CASE("scenario cross-validation without simulation") {
    studio::ValidationOptions opts;
    opts.run_monte_carlo = false;
    const auto rep = studio::validate_scenario(test::two_cell(0.4, 3), opts);
    CHECK(rep.pass);
    CHECK(rep.discrepancies.empty());
    REQUIRE(rep.checks.size() == 4);
    CHECK(rep.checks[0].name == "row-sums-enumeration");
    CHECK(rep.checks[1].name == "row-sums-closed-form");
    CHECK(rep.checks[2].name == "backend-agreement");
    CHECK(rep.checks[3].name == "steady-state-agreement");
    for (const auto& c : rep.checks) {
        CAPTURE(c.name);
        CAPTURE(c.detail);
        CHECK(c.pass);
        CHECK(!c.detail.empty());
    }

    const auto j = studio::to_json(rep);
    CHECK(j.at("pass").get<bool>());
    CHECK(j.at("checks").size() == 4);
    CHECK(j.at("discrepancies").empty());
}

TEST_CASE("scenario cross-validation with simulation") {
    studio::ValidationOptions opts;
    opts.sim.seed = 5;
    opts.sim.warmup_frames = 500;
    opts.sim.measure_frames = 20000;
    opts.sim.replications = 5;
    const auto rep = studio::validate_scenario(test::tiny(), opts);
    REQUIRE(rep.checks.size() == 6);
    CHECK(rep.checks[4].name == "simulation-three-sigma");
    CHECK(rep.checks[5].name == "empirical-distribution");
    for (const auto& c : rep.checks) {
        CAPTURE(c.name);
        CAPTURE(c.detail);
        CHECK(c.pass);
    }
    CHECK(rep.pass);
}

TEST_CASE("reference scenarios match the shipped files") {
    const auto two = scenario::load_scenario_file(
        std::string(DRK_SOURCE_DIR) + "/scenarios/two_cell_reference.json");
    CHECK(studio::two_cell_reference() == two);
    const auto macro = scenario::load_scenario_file(
        std::string(DRK_SOURCE_DIR) + "/scenarios/macrocell_reference.json");
    CHECK(studio::macrocell_reference() == macro);
}

TEST_CASE("preset catalogue") {
    const auto names = studio::preset_names();
    REQUIRE(names == std::vector<std::string>{"fig2", "fig3", "fig4", "fig5a",
                                              "fig5b", "fig6", "fig7"});
    CHECK_THROWS_AS(studio::run_preset("fig99"), ValidationError);

    const auto a = studio::run_preset("fig2");
    CHECK(a.name == "fig2");
    REQUIRE(a.series.size() == 2);
    CHECK(a.series[0].label == "K=0");
    CHECK(a.series[1].label == "K=3");
    for (const auto& s : a.series) {
        CHECK(s.result.rows.size() == 19);
        for (const auto& row : s.result.rows) CHECK(row.analytical_ok);
    }

    // rerunning is deterministic down to the emitted text
    const auto b = studio::run_preset("fig2");
    CHECK(studio::preset_csv(a) == studio::preset_csv(b));

    const auto lab = studio::run_preset("fig5b");
    REQUIRE(lab.series.size() == 1);
    CHECK(lab.series[0].result.rows.size() == 12);
}

TEST_CASE("sweep csv shape") {
    studio::SweepSpec spec;
    spec.name = "shape";
    spec.base = test::tiny();
    spec.axis = "p_1";
    spec.values = {0.2, 0.5};
    const auto res = studio::sweep(spec);
    const std::string csv = studio::sweep_csv(res);

    std::istringstream in(csv);
    std::string header;
    REQUIRE(std::getline(in, header));
    CHECK(header.rfind("series,axis,value,source,ok,error,", 0) == 0);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(comma_count(line) == comma_count(header));
        CHECK(line.rfind("shape,p_1,", 0) == 0);
    }
    CHECK(rows == 2);

    const auto j = studio::to_json(res);
    CHECK(j.at("rows").size() == 2);
    CHECK(j.at("spec").at("axis").get<std::string>() == "p_1");
    CHECK(j.at("baseline").is_null());
    // baseline-relative deltas belong to the pool-size axis alone
    CHECK(!j.at("rows")[0].contains("baseline_deltas"));

    studio::SweepSpec kspec;
    kspec.base = test::tiny();
    kspec.axis = "K";
    kspec.values = {0.0, 1.0};
    const auto kj = studio::to_json(studio::sweep(kspec));
    CHECK(!kj.at("baseline").is_null());
    const auto& deltas = kj.at("rows")[0].at("baseline_deltas");
    CHECK(deltas.at("delta_u_pct_per_k").is_null()); // undefined at K = 0
    CHECK(!kj.at("rows")[1].at("baseline_deltas").at("delta_u_pct").is_null());
}
