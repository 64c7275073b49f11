#ifndef DRK_CHAIN_HPP
#define DRK_CHAIN_HPP

#include <string>
#include <utility>
#include <vector>

#include "drk/scenario.hpp"
#include "drk/state.hpp"

namespace drk::chain {

enum class Backend { enumeration, closed_form };

/**
 * Row-stochastic one-frame transition matrix over the enumerated states.
 * Rows are stored sparse (column index, probability), sorted by column.
 */
struct TransitionMatrix {
    Backend backend = Backend::enumeration;
    std::vector<SystemState> states; ///< lexicographic (a, b, c, d)
    std::vector<std::vector<std::pair<int, double>>> rows;

    double prob(int from, int to) const; ///< 0 when absent
    double row_sum(int from) const;
};

/**
 * All feasible occupancy states in lexicographic order. The order is part
 * of the public contract: matrices, steady-state vectors and simulation
 * histograms all index against it.
 */
std::vector<SystemState> enumerate_states(const scenario::ScenarioConfig& cfg);

/**
 * Reference backend. For every origin state the frame outcome space
 * (independent per-group terminations, per-group arrival successes) is
 * convolved exactly and pushed through the deterministic admission rule of
 * apply_frame; probability mass accumulates on the destination states.
 *
 * Throws CapacityError when the state space exceeds `state_budget`.
 */
TransitionMatrix build_enumeration(const scenario::ScenarioConfig& cfg,
                                   int state_budget = 20000);

/**
 * Analytic backend: every (origin, destination) pair is dispatched to one
 * of the per-case transition expressions (products of termination terms,
 * arrival terms and saturated tail sums). Intended to agree with
 * build_enumeration to well below 1e-9 per entry; `validate` in the studio
 * module itemizes any disagreement by case id.
 *
 * Throws CapacityError on budget, CoverageError if a pair matches no case,
 * IntegrityError if a row sum deviates from 1 by more than 1e-6.
 */
TransitionMatrix build_closed_form(const scenario::ScenarioConfig& cfg,
                                   int state_budget = 20000);

/** One closed-form matrix entry with the analytic case that produced it. */
std::pair<double, std::string> closed_form_entry(const scenario::ScenarioConfig& cfg,
                                                 const SystemState& from,
                                                 const SystemState& to);

/** Stationary distribution with the achieved balance residual. */
struct SteadyStateDistribution {
    std::vector<SystemState> states;
    std::vector<double> pi;
    double residual = 0.0; ///< max_j |sum_i pi_i P_ij - pi_j|
    long iterations = 0;   ///< 0 when solved directly
};

/**
 * Solve pi = pi P, sum(pi) = 1. Small spaces (<= direct_threshold states)
 * use a dense linear solve; larger ones use power iteration with Cesaro
 * averaging as a fallback. Throws StructuralError when the chain has more
 * than one closed communicating class and ConvergenceError when the
 * tolerance cannot be met.
 */
SteadyStateDistribution steady_state(const TransitionMatrix& m,
                                     double tol = 1e-12,
                                     long max_iter = 500000,
                                     int direct_threshold = 2000);

/** Total variation distance between two distributions on the same states. */
double total_variation(const SteadyStateDistribution& x,
                       const SteadyStateDistribution& y);

/** Long-form CSV: a,b,c,d,a_next,b_next,c_next,d_next,prob. */
void write_matrix_csv(const TransitionMatrix& m, const std::string& path);

/** CSV: a,b,c,d,pi. */
void write_pi_csv(const SteadyStateDistribution& d, const std::string& path);

} // namespace drk::chain

#endif
