#ifndef DRK_SIMULATOR_HPP
#define DRK_SIMULATOR_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "drk/metrics.hpp"
#include "drk/scenario.hpp"
#include "drk/state.hpp"

namespace drk::sim {

/**
 * Frame-level Monte Carlo run. Every random draw is made with the
 * project's own engine (see rng.hpp), so a (scenario, seed) pair gives
 * bit-identical results on every platform. Replication r uses the seed
 * engine advanced by r jumps, which keeps the streams disjoint.
 *
 * Draw order inside a frame is fixed: terminations for the four
 * (group, cell) buckets in state order a, b, c, d, one Bernoulli per active
 * connection; then for each group 1, 2, 3 an uplink Bernoulli and, when the
 * uplink is good, one request Bernoulli per idle member followed by one
 * slot pick per requester.
 */
struct SimRun {
    scenario::ScenarioConfig cfg;
    std::uint64_t seed = 1;
    long warmup_frames = 10000;   ///< discarded per replication
    long measure_frames = 1000000; ///< recorded per replication
    int replications = 10;
};

struct SimEstimate {
    metrics::MetricsReport report; ///< source = "monte-carlo", SEs filled
    std::vector<SystemState> states; ///< canonical state order
    std::vector<double> occupancy;   ///< end-of-frame visit fractions
    std::uint64_t measured_frames = 0;
};

SimEstimate simulate(const SimRun& run);

/**
 * Map an end-of-frame visit histogram onto the canonical state order and
 * normalise it. A histogram state outside the feasible set means the frame
 * dynamics and the state space disagree; that raises IntegrityError.
 */
std::vector<double> occupancy_to_pi(const scenario::ScenarioConfig& cfg,
                                    const std::map<SystemState, std::uint64_t>& hist);

} // namespace drk::sim

#endif
