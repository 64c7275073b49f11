#ifndef DRK_STATE_HPP
#define DRK_STATE_HPP

#include <compare>
#include <cstdint>

#include "drk/scenario.hpp"

namespace drk {

/**
 * Channel occupancy of the two cells at a frame boundary:
 *   a  group-1 connections on cell 1
 *   b  group-3 connections on cell 1
 *   c  group-3 connections on cell 2 (offloaded, at most K)
 *   d  group-2 connections on cell 2
 *
 * Ordering is lexicographic on (a, b, c, d); the enumerated state order is
 * part of the public contract for matrices, distributions and histograms.
 */
struct SystemState {
    int a = 0, b = 0, c = 0, d = 0;
    auto operator<=>(const SystemState&) const = default;
};

/** All occupancy constraints induced by populations, capacities and K. */
bool state_feasible(const SystemState& s, const scenario::ScenarioConfig& cfg);

/** One frame's raw random outcome, before admission. */
struct FrameOutcome {
    int term_a = 0; ///< group-1 terminations (of s.a)
    int term_b = 0; ///< group-3 terminations on cell 1 (of s.b)
    int term_c = 0; ///< group-3 terminations on cell 2 (of s.c)
    int term_d = 0; ///< group-2 terminations (of s.d)
    int arr_1 = 0;  ///< successful group-1 requests
    int arr_2 = 0;  ///< successful group-2 requests
    int arr_3 = 0;  ///< successful group-3 requests
};

/** Deterministic admission result for one frame. */
struct FrameResult {
    SystemState next;
    int blocked_1 = 0; ///< group-1 successes denied a channel
    int blocked_2 = 0;
    int blocked_3 = 0; ///< group-3 successes denied both cells
};

/**
 * Apply one frame to a state. This function is the single definition of the
 * within-frame ordering: terminations free their channels first, groups 1
 * and 2 are admitted onto their own cells (home traffic has priority), and
 * group-3 successes then fill what is left of cell 1 before overflowing
 * onto cell 2, subject to the offloaded total staying within K. Successes
 * that fit nowhere are cleared (no retry, no queueing).
 */
FrameResult apply_frame(const SystemState& s, const FrameOutcome& o,
                        int m_1, int m_2, int k);

} // namespace drk

#endif
