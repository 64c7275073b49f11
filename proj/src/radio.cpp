#include "drk/radio.hpp"

#include <cmath>
#include <string>

#include "drk/errors.hpp"

namespace drk::radio {

double q_function(double z) {
    // Q(z) = 0.5 * erfc(z / sqrt(2)); erfc avoids cancellation in the tail.
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

double direction_quality(double gamma_q, double p_t, double w_db,
                         double sigma_psi, double delta, double d_0,
                         double distance) {
    if (sigma_psi <= 0.0)
        throw DomainError("radio: sigma_psi must be positive");
    if (delta <= 0.0)
        throw DomainError("radio: delta must be positive");
    if (d_0 <= 0.0)
        throw DomainError("radio: d_0 must be positive");
    if (distance < d_0)
        throw DomainError("radio: distance " + std::to_string(distance) +
                          " is below the reference distance " + std::to_string(d_0));
    double path_loss = 10.0 * delta * std::log10(distance / d_0);
    double z = (gamma_q - p_t - w_db + path_loss) / sigma_psi;
    return q_function(z);
}

LinkQuality link_quality(const RadioParams& rp) {
    LinkQuality lq;
    lq.w_up = direction_quality(rp.gamma_q_up, rp.p_t_up, rp.w_up_db,
                                rp.sigma_psi, rp.delta, rp.d_0_up, rp.distance);
    lq.w_down = direction_quality(rp.gamma_q_down, rp.p_t_down, rp.w_down_db,
                                  rp.sigma_psi, rp.delta, rp.d_0_down, rp.distance);
    return lq;
}

} // namespace drk::radio
