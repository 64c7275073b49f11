#ifndef DRK_STUDIO_HPP
#define DRK_STUDIO_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

#include "drk/metrics.hpp"
#include "drk/scenario.hpp"
#include "drk/simulator.hpp"
#include "drk/state.hpp"

namespace drk::studio {

enum class Engine { analytical, monte_carlo, both };

Engine engine_from_string(const std::string& s);
std::string engine_to_string(Engine e);

struct SimOptions {
    std::uint64_t seed = 1;
    long warmup_frames = 10000;
    long measure_frames = 1000000;
    int replications = 10;
};

/**
 * One-axis parameter sweep. Supported axes: p (all groups), p_1, p_2, p_3,
 * K, L (all groups), L_1, L_2, L_3, w_3_1 (uplink request quality of the
 * transferable group's home link; the downlink keeps its base value),
 * N_1, N_2, N_3. Integer axes require integer values.
 */
struct SweepSpec {
    std::string name = "sweep"; ///< series label in CSV output
    scenario::ScenarioConfig base;
    std::string axis = "p";
    std::vector<double> values;
    Engine engine = Engine::analytical;
    SimOptions sim;
    int state_budget = 20000;
};

SweepSpec load_sweep_spec(const nlohmann::json& doc);
SweepSpec load_sweep_spec_file(const std::string& path);
scenario::ScenarioConfig apply_axis(const scenario::ScenarioConfig& base,
                                    const std::string& axis, double value);

constexpr double kNoValue = std::numeric_limits<double>::quiet_NaN();

struct SweepPoint {
    double value = 0.0;
    scenario::ScenarioConfig cfg;
    bool analytical_ok = false;
    std::string analytical_error;
    metrics::MetricsReport analytical;
    bool mc_ok = false;
    std::string mc_error;
    metrics::MetricsReport mc;

    // Relative changes against the K = 0 baseline; populated on the K axis
    // only (NaN otherwise). Percentages are relative: 100 * (x - x0) / x0.
    double delta_u_pct = kNoValue;        ///< utilization gain
    double delta_u_pct_per_k = kNoValue;  ///< utilization gain per shared channel
    double delta_b3_pct_per_k = kNoValue; ///< group-3 blocking drop per channel
    double delta_b2_pct_per_k = kNoValue; ///< group-2 blocking rise per channel
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepPoint> rows;
    bool has_baseline = false;          ///< K axis: zero-pool reference solved
    metrics::MetricsReport baseline;    ///< the K = 0 metrics the deltas use
};

/** One row per axis value; per-point failures are recorded in the row. */
SweepResult sweep(const SweepSpec& spec);

/** Upper bounds on blocking and collision, per group (1-based index - 1). */
struct OptimizerConstraints {
    std::array<double, 3> blocking_max{1.0, 1.0, 1.0};
    std::array<double, 3> collision_max{1.0, 1.0, 1.0};
};

OptimizerConstraints load_constraints(const nlohmann::json& doc);
OptimizerConstraints load_constraints_file(const std::string& path);

struct KCandidate {
    int k = 0;
    bool ok = false;        ///< metrics evaluated
    std::string error;      ///< failure text when !ok
    metrics::MetricsReport report;
    double objective = 0.0; ///< U / K
    bool feasible = false;
    std::vector<std::string> violations;
};

struct OptimizeResult {
    scenario::ScenarioConfig cfg;
    OptimizerConstraints constraints;
    bool feasible = false;
    int best_k = -1; ///< -1 when infeasible
    bool has_baseline = false;
    metrics::MetricsReport baseline; ///< K = 0 reference, outside the search
    std::vector<KCandidate> table;   ///< K = 1..M_2 in order
};

/**
 * Exhaustive search over K in [1, M_2] maximizing U/K subject to the
 * blocking/collision bounds; ties go to the smaller K. K = 0 is excluded
 * from the objective and reported as the baseline.
 */
OptimizeResult optimize_k(const scenario::ScenarioConfig& cfg,
                          const OptimizerConstraints& constraints,
                          int state_budget = 20000);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/** One backend disagreement above tolerance, keyed by the analytic case. */
struct Discrepancy {
    SystemState from, to;
    double enumeration = 0.0;
    double closed_form = 0.0;
    std::string case_id;
};

struct ValidationOptions {
    bool run_monte_carlo = true;
    SimOptions sim;
    int state_budget = 20000;
    double entry_tol = 1e-9;  ///< backend entrywise agreement
    double row_sum_tol = 1e-9;
    double pi_tol = 1e-9;     ///< backend steady-state agreement
    double tv_limit = 0.01;   ///< empirical vs analytical distribution
};

struct ValidationReport {
    scenario::ScenarioConfig cfg;
    std::vector<CheckResult> checks;
    std::vector<Discrepancy> discrepancies;
    bool pass = false; ///< every check passed and no discrepancies
};

/**
 * Cross-validation of the full pipeline on one scenario: row sums of both
 * backends, entrywise backend agreement (disagreements itemized by case),
 * steady-state agreement, and optionally Monte Carlo agreement (3 standard
 * errors per metric) plus total-variation distance of the empirical
 * distribution. Failures are report content, not exceptions.
 */
ValidationReport validate_scenario(const scenario::ScenarioConfig& cfg,
                                   const ValidationOptions& opts = {});

/** Reference configs used by the presets (also shipped in scenarios/). */
scenario::ScenarioConfig two_cell_reference();
scenario::ScenarioConfig macrocell_reference();

struct PresetSeries {
    std::string label;
    SweepResult result;
};

struct PresetResult {
    std::string name;
    std::vector<PresetSeries> series;
};

/**
 * Named experiment bundles over the reference scenarios: utilization vs
 * traffic intensity (fig2), utilization and blocking vs link quality
 * (fig3, fig4), blocking vs traffic for several group-3 populations
 * (fig5a), access-slot count sweep (fig5b) and the macrocell shared-pool
 * study (fig6, fig7).
 */
std::vector<std::string> preset_names();
PresetResult run_preset(const std::string& name);

nlohmann::json to_json(const SweepResult& r);
nlohmann::json to_json(const OptimizeResult& r);
nlohmann::json to_json(const ValidationReport& r);
nlohmann::json to_json(const PresetResult& r);

/**
 * Plot-ready CSV, one header row. Sweep and preset tables share one format
 * with a leading series column; engine "both" emits one line per engine.
 */
std::string sweep_csv(const SweepResult& r);
std::string preset_csv(const PresetResult& r);
std::string optimize_csv(const OptimizeResult& r);

} // namespace drk::studio

#endif
