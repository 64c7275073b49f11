#ifndef DRK_RADIO_HPP
#define DRK_RADIO_HPP

namespace drk::radio {

/**
 * Propagation parameters for one UE-to-BS link. Shadowing is log-normal on
 * top of a log-distance path loss; uplink and downlink may use different
 * sensitivity, transmit power, bandwidth margin and reference distance.
 *
 * Units: gamma_q_* and p_t_* in dBm, w_*_db and sigma_psi in dB,
 * d_0_* and distance in metres. delta is the dimensionless path loss exponent.
 */
struct RadioParams {
    double gamma_q_up = 0.0;   ///< receiver sensitivity threshold, uplink
    double gamma_q_down = 0.0; ///< receiver sensitivity threshold, downlink
    double p_t_up = 0.0;       ///< transmit power, uplink
    double p_t_down = 0.0;     ///< transmit power, downlink
    double w_up_db = 0.0;      ///< bandwidth term 10*log10(W), uplink
    double w_down_db = 0.0;    ///< bandwidth term 10*log10(W), downlink
    double sigma_psi = 1.0;    ///< shadowing standard deviation
    double delta = 2.0;        ///< path loss exponent
    double d_0_up = 1.0;       ///< reference distance, uplink
    double d_0_down = 1.0;     ///< reference distance, downlink
    double distance = 1.0;     ///< UE-to-BS distance
};

/** Probability that a link direction clears its sensitivity threshold. */
struct LinkQuality {
    double w_up = 1.0;
    double w_down = 1.0;
    bool operator==(const LinkQuality&) const = default;
};

/**
 * Gaussian tail integral Q(z) = P(Z > z) for standard normal Z.
 * Computed through erfc; absolute error well below 1e-12 over all z.
 */
double q_function(double z);

/**
 * Success probability of one link direction: the probability that the
 * received power under log-normal shadowing exceeds the sensitivity
 * threshold at the given distance.
 *
 * Throws DomainError if distance < d_0 or sigma_psi <= 0 or delta <= 0.
 */
double direction_quality(double gamma_q, double p_t, double w_db,
                         double sigma_psi, double delta, double d_0,
                         double distance);

/** Both directions of a link; throws DomainError on invalid geometry. */
LinkQuality link_quality(const RadioParams& rp);

} // namespace drk::radio

#endif
