#ifndef DRK_KINETICS_HPP
#define DRK_KINETICS_HPP

#include <vector>

namespace drk::kinetics {

/**
 * Per-frame stochastic behaviour of one (UE group, serving BS) pair.
 *
 * Idle UEs of the group request a connection independently with probability
 * p; requesters contend on `slots` random-access slots and a request goes
 * through only when the shared uplink is good (probability w_up). An active
 * connection survives a frame only if the downlink is good and the transfer
 * is unfinished, so it terminates with probability l = 1 - w_down + w_down*q.
 */
struct GroupKinetics {
    int group = 0;        ///< UE group id (1, 2 or 3)
    int bs = 0;           ///< serving base station id (1 or 2)
    int population = 0;   ///< N, total UEs in the group
    int slots = 1;        ///< L, random-access slots per frame
    double p = 0.0;       ///< request probability per idle UE per frame
    double w_up = 1.0;    ///< uplink quality
    double w_down = 1.0;  ///< downlink quality
    double q = 1.0;       ///< per-frame transfer completion probability
};

/** Per-connection termination probability: 1 - w_down + w_down * q. */
double termination_rate(double w_down, double q);

/**
 * Distribution of the number of new successful requests in a frame, given
 * that i of the group's UEs currently hold connections (so population - i
 * are idle). Entry [j] is the probability of exactly j successes; the vector
 * has population - i + 1 entries.
 *
 * With probability 1 - w_up the shared uplink is bad and no request goes
 * through; otherwise the requester count is Binomial(population - i, p) and
 * the success count follows the random-access contention distribution.
 *
 * Requires 0 <= i <= population; throws DomainError otherwise.
 */
std::vector<double> arrangement_dist(const GroupKinetics& kin, int i);

/**
 * Distribution of the number of terminating connections among i active
 * ones: Binomial(i, l) with l = termination_rate(w_down, q). Entry [j] is
 * the probability that exactly j connections end this frame.
 *
 * Requires 0 <= i <= population; throws DomainError otherwise.
 */
std::vector<double> termination_dist(const GroupKinetics& kin, int i);

/**
 * All arrangement and termination rows of one (group, BS) pair, indexed by
 * the active-connection count, plus suffix sums of the arrangement rows
 * (arrive_tail[i][j] = P(at least j new successes | i active)). Immutable
 * after construction, so it can be read concurrently.
 */
struct GroupTables {
    GroupKinetics kin;
    std::vector<std::vector<double>> arrive;      ///< [i][j]
    std::vector<std::vector<double>> arrive_tail; ///< [i][j], j = 0..N-i+1
    std::vector<std::vector<double>> arrive_excess; ///< [i][j] = E[max(0, successes - j + 1)]... see below
    std::vector<std::vector<double>> terminate;   ///< [i][j]
    std::vector<double> arrive_mean;              ///< [i] = E[successes]
};

// arrive_excess[i][j] = sum over m >= j of arrive_tail[i][m]; evaluating it
// at j = s + 1 gives E[max(0, successes - s)], the mean count above a cap s.

GroupTables tabulate(const GroupKinetics& kin);

} // namespace drk::kinetics

#endif
