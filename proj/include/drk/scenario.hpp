#ifndef DRK_SCENARIO_HPP
#define DRK_SCENARIO_HPP

#include <string>

#include "json.hpp"

#include "drk/kinetics.hpp"
#include "drk/radio.hpp"

namespace drk::scenario {

using json = nlohmann::json;

/**
 * Fully resolved model configuration for the two-cell system.
 *
 * Group 1 is served by cell 1 only, group 2 by cell 2 only; group 3 attaches
 * to cell 1 and may hold up to K channels of cell 2 when cell 1 is full.
 * Link qualities are stored resolved: configs written with radio parameters
 * have them converted at load time, and a config loaded again after
 * serialization compares equal field by field.
 */
struct ScenarioConfig {
    std::string name;

    int n_1 = 0, n_2 = 0, n_3 = 0; ///< UE populations per group
    int m_1 = 1, m_2 = 1;          ///< channels per cell
    int k = 0;                     ///< cell-2 channels reachable by group 3
    int l_1 = 1, l_2 = 1, l_3 = 1; ///< random-access slots per group
    double p_1 = 0.0, p_2 = 0.0, p_3 = 0.0; ///< request probabilities
    double q = 1.0;                ///< per-frame transfer completion probability
    double h = 0.0;                ///< per-channel bit rate (bit/s); 0 = unknown

    radio::LinkQuality w_1_1; ///< group 1 <-> cell 1
    radio::LinkQuality w_3_1; ///< group 3 <-> cell 1
    radio::LinkQuality w_3_2; ///< group 3 <-> cell 2
    radio::LinkQuality w_2_2; ///< group 2 <-> cell 2

    bool operator==(const ScenarioConfig&) const = default;
};

/** Kinetics of the four (group, BS) pairs induced by a config. */
struct ScenarioKinetics {
    kinetics::GroupKinetics g11, g22, g31, g32;
};

ScenarioKinetics kinetics_for(const ScenarioConfig& cfg);

/**
 * Completion probability from transfer-size parameters: a transfer of r_p
 * bits at H bit/s spans r_p / (H * t_s) frames, so q = H * t_s / r_p.
 * Throws ValidationError unless all inputs are positive and r_p >= H * t_s.
 */
double derive_q(double r_p_bits, double h_bits_per_s, double t_s_seconds);

/** Throws ValidationError naming the first violated constraint, if any. */
void validate(const ScenarioConfig& cfg);

/**
 * Parse and normalize a scenario document. Radio-specified links are
 * resolved to link qualities and service parameters to q. When both a
 * direct q and transfer-size parameters are present the direct value wins
 * and a warning is written to stderr. Throws ParseError (with the JSON
 * field path) on malformed documents and ValidationError on constraint
 * violations.
 */
ScenarioConfig load_scenario(const json& doc);
ScenarioConfig load_scenario_text(const std::string& text);
ScenarioConfig load_scenario_file(const std::string& path);

/** Serialize the normalized form (explicit q and link qualities). */
json to_json(const ScenarioConfig& cfg);
void save_scenario_file(const ScenarioConfig& cfg, const std::string& path);

} // namespace drk::scenario

#endif
