#ifndef DRK_METRICS_HPP
#define DRK_METRICS_HPP

#include <array>
#include <string>

#include "json.hpp"

#include "drk/chain.hpp"
#include "drk/scenario.hpp"

namespace drk::metrics {

/**
 * Stationary performance metrics. Blocking and collision entries are
 * frame-level event probabilities: the chance that in a stationary frame at
 * least one success of the group is denied a channel (blocking) or, with a
 * good uplink, at least one requester of the group loses the slot
 * contention (collision). Group indices are 0-based: [0] = group 1,
 * [1] = group 2, [2] = the transferable group 3.
 */
struct MetricsReport {
    std::string source = "analytical"; ///< "analytical" or "monte-carlo"
    std::array<double, 3> blocking{};
    std::array<double, 3> collision{};
    double utilization = 0.0;
    double throughput = 0.0; ///< bit/s over both cells; 0 when H unknown

    /// Standard errors across replications; all zero for analytical results.
    std::array<double, 3> blocking_se{};
    std::array<double, 3> collision_se{};
    double utilization_se = 0.0;

    /// Secondary diagnostic: expected denied successes per expected success.
    std::array<double, 3> per_request_blocking{};
};

/** P(at least one group-1 or group-2 success is denied); group is 1 or 2. */
double blocking_home(const scenario::ScenarioConfig& cfg,
                     const chain::SteadyStateDistribution& pi, int group);

/** P(at least one group-3 success finds neither cell-1 room nor pool room). */
double blocking_ttr(const scenario::ScenarioConfig& cfg,
                    const chain::SteadyStateDistribution& pi);

/** P(uplink good and at least one requester of the group collides). */
double collision_probability(const scenario::ScenarioConfig& cfg,
                             const chain::SteadyStateDistribution& pi, int group);

/** Mean busy fraction of all M_1 + M_2 channels. */
double utilization(const scenario::ScenarioConfig& cfg,
                   const chain::SteadyStateDistribution& pi);

/** All analytical metrics in one pass. */
MetricsReport compute_metrics(const scenario::ScenarioConfig& cfg,
                              const chain::SteadyStateDistribution& pi);

nlohmann::json to_json(const MetricsReport& r);
std::string csv_header();
std::string csv_row(const std::string& label, const MetricsReport& r);

} // namespace drk::metrics

#endif
