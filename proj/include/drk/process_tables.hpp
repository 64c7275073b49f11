#ifndef DRK_PROCESS_TABLES_HPP
#define DRK_PROCESS_TABLES_HPP

#include <vector>

#include "drk/kinetics.hpp"
#include "drk/scenario.hpp"

namespace drk::process {

/**
 * Admission outcome of one home group (group 1 on cell 1, group 2 on
 * cell 2) for a fixed origin occupancy and a fixed post-termination count
 * of the other occupant of the cell: the distribution of the group's final
 * occupancy, plus the chance and mean of denied successes.
 */
struct HomeAdmission {
    std::vector<double> dest;  ///< [x'] final occupancy distribution, 0..M
    double block_event = 0.0;  ///< P(at least one success denied)
    double blocked_mean = 0.0; ///< E[number of denied successes]
};

/**
 * Precomputed per-scenario products: kinetics rows of the four (group, BS)
 * pairs and the home-group admission grids. Immutable after construction.
 */
struct Tables {
    kinetics::GroupTables t11, t22, t31, t32;
    std::vector<std::vector<HomeAdmission>> g1; ///< [a][b1]
    std::vector<std::vector<HomeAdmission>> g2; ///< [d][c1]
};

Tables build_tables(const scenario::ScenarioConfig& cfg);

} // namespace drk::process

#endif
