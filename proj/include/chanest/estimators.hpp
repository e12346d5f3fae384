#pragma once

#include <vector>

#include "chanest/channel.hpp"
#include "chanest/ofdm.hpp"
#include "chanest/types.hpp"

namespace chanest {

/** Per-pilot-cell least-squares estimates plus their grid coordinates. */
struct PilotLsEstimate {
    cmat_t values;                      // n_pilot_subcarriers x n_pilot_symbols
    std::vector<int> pilot_subcarriers; // 0-based row coordinates
    std::vector<int> pilot_symbols;     // 0-based column coordinates
};

/** Frequency-domain channel correlation matrices for one pilot pattern. */
struct CorrelationSet {
    cmat_t r_hh;    // N_f x N_f, Hermitian PSD
    cmat_t r_hc_hp; // N_f x n_pilot_subcarriers
    cmat_t r_hp_hp; // n_pilot_subcarriers x n_pilot_subcarriers, Hermitian PSD
    std::vector<int> pilot_subcarriers;
};

struct NoiseConfig {
    scalar_t sigma_n_sq = 0.0;
    scalar_t sigma_x_sq = 1.0;

    scalar_t rho() const { return sigma_n_sq / sigma_x_sq; }
    static NoiseConfig from_snr_db(scalar_t snr_db, scalar_t sigma_x_sq = 1.0) {
        return {sigma_x_sq * std::pow(10.0, -snr_db / 10.0), sigma_x_sq};
    }
};

/** Y/X at every pilot cell. Throws if a pilot symbol of tx_pilots is zero. */
PilotLsEstimate ls_estimate(const ResourceGrid& rx_grid, const ResourceGrid& tx_pilots,
                            const OfdmConfig& cfg);

/**
 * Separable linear interpolation of the pilot estimates onto the full grid,
 * frequency first then time, holding the edge values outside the pilot hull.
 */
ChannelMatrix bilinear_interpolate(const PilotLsEstimate& pilot_est, const OfdmConfig& cfg);

/**
 * R_HH(k1, k2) = (1/N_f) * sum_m A_m * exp(-2*pi*i*(k1-k2)*tau_m/N_f), with
 * the pilot-restricted blocks for the configuration's pattern.
 */
CorrelationSet correlation_from_pdp(const PowerDelayProfile& pdp, const OfdmConfig& cfg);

/** Same, for an explicit pilot subcarrier set. */
CorrelationSet correlation_for_pilots(const PowerDelayProfile& pdp, const OfdmConfig& cfg,
                                      std::vector<int> pilot_subcarriers);

/**
 * Linear MMSE from the pilot-cell LS input: per pilot symbol
 * R_HcHp * (R_HpHp + rho*I)^{-1} * h_ls, then linear time interpolation
 * across the pilot symbols. Throws if the correlation input is not PSD.
 */
ChannelMatrix mmse_estimate(const PilotLsEstimate& pilot_ls, const CorrelationSet& corr,
                            const NoiseConfig& noise, const OfdmConfig& cfg);

/** W = D * diag(p/(p + rho)) * D^H with D the unitary DFT matrix. */
cmat_t mmse_weight_dft(const SampledPdp& p_design, const NoiseConfig& noise);

}  // namespace chanest
