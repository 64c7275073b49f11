#ifndef DRK_RACH_HPP
#define DRK_RACH_HPP

#include <vector>

namespace drk::rach {

/**
 * Distribution of the number of successful random-access requests when k
 * stations each pick one of `slots` preamble slots uniformly at random.
 * A request succeeds exactly when its slot holds no other request.
 *
 * probs[j] = P(exactly j singleton slots), j = 0..k.
 */
struct SuccessDistribution {
    int requesters = 0;
    int slots = 1;
    std::vector<double> probs; ///< size requesters + 1
};

/**
 * Exact success-count distribution, computed slot by slot as a convolution
 * of per-slot binomial occupancies. All contributions are non-negative, so
 * the result carries no cancellation error. Results are memoized per (k, L);
 * the cache is safe for concurrent readers.
 *
 * Requires k >= 0 and slots >= 1; throws DomainError otherwise.
 */
const SuccessDistribution& success_dist(int k, int slots);

/**
 * Brute-force reference: enumerates all slots^k slot assignments and counts
 * singleton slots. Throws CapacityError when slots^k exceeds `budget`
 * (default 1e7 assignments).
 */
SuccessDistribution success_dist_oracle(int k, int slots,
                                        long long budget = 10000000LL);

/** Closed-form mean of the distribution: k * (1 - 1/L)^(k-1). */
double expected_successes(int k, int slots);

} // namespace drk::rach

#endif
