#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chanest/ofdm.hpp"
#include "chanest/types.hpp"

namespace chanest {

/** Multipath channel family: delays (seconds) and average path gains (dB). */
struct PowerDelayProfile {
    std::string name;
    vec_t delays_s;
    vec_t gains_db;

    int n_paths() const { return static_cast<int>(delays_s.size()); }
    scalar_t max_delay_s() const { return delays_s.size() ? delays_s(delays_s.size() - 1) : 0.0; }
    vec_t linear_gains() const;
    scalar_t total_power() const { return linear_gains().sum(); }

    void validate() const;  // throws on non-ascending delays / non-finite gains
};

struct FadingSpec {
    scalar_t max_doppler = 97.0;     // Hz; the per-realization Doppler is drawn from [0, this]
    scalar_t carrier_freq = 2.1e9;   // Hz
    int n_sinusoids = 32;
    bool quasi_static = false;       // freeze path gains over the slot
};

/**
 * One slot's fading draw: per-path complex gains at the symbol instants
 * t = T_o * l and the path delays normalized by the sample period.
 */
struct ChannelRealization {
    cmat_t path_gains;     // n_paths x n_symbols, a_m(T_o * l)
    vec_t delays_samples;  // tau_m
    scalar_t doppler_hz = 0.0;
    bool exceeds_cp = false;  // max delay beyond the cyclic extension (ISI regime)
};

/** Mean squared tap magnitudes in the transform domain (eigenvalue scale). */
struct SampledPdp {
    vec_t p;  // length n_subcarriers, nonnegative
};

/**
 * Sum-of-sinusoids Rayleigh fading: each path is an independent process with
 * E{|a_m|^2} equal to its linear gain and Doppler drawn from [0, max_doppler].
 * Deterministic in the seed.
 */
ChannelRealization realize_channel(const PowerDelayProfile& pdp, const FadingSpec& fading,
                                   const OfdmConfig& cfg, std::uint64_t seed);

/**
 * Time-domain taps at one symbol via the periodic interpolation kernel,
 * including fractional-delay leakage (value N_f * a_m at integer delays).
 */
cvec_t sampled_taps(const ChannelRealization& real, const OfdmConfig& cfg, int symbol_index);

/** H(k, l) = (1/sqrt(N_f)) * sum_m a_m(T_o l) * exp(-2*pi*i*k*tau_m/N_f). */
ChannelMatrix freq_response(const ChannelRealization& real, const OfdmConfig& cfg);

/**
 * Pass transmit samples through the realization and add AWGN with
 * sigma_n^2 = sigma_x^2 * 10^(-snr_db/10). Integer sample delays act as
 * linear delays (tails spill into the next symbol); the sub-sample fraction
 * of each delay acts as its exact in-band phase. snr_db = +inf disables the
 * noise. sigma_x_sq is the nominal per-cell constellation power.
 */
cvec_t apply_channel(const cvec_t& tx, const ChannelRealization& real, scalar_t snr_db,
                     const OfdmConfig& cfg, std::uint64_t noise_seed, scalar_t sigma_x_sq = 1.0);

/** Scale a unit-delay-spread profile to the desired RMS delay spread. */
PowerDelayProfile scale_tdl(const PowerDelayProfile& model_pdp, scalar_t ds_desired_s);

/**
 * Benchmark profile: paths every zeta seconds from 0 with 0 dB gains,
 * floor(T_CP / zeta) paths in total.
 */
PowerDelayProfile ce_channel(const OfdmConfig& cfg, scalar_t zeta_s);

/** Default spacing for ce_channel, 1 / (3 * f_space * (N_f - 1)). */
scalar_t ce_default_zeta(const OfdmConfig& cfg);

/**
 * Analytic E{|h(n)|^2} of the normalized interpolation kernel (kernel value 1
 * at integer delays), so integer-delay profiles place their linear gains
 * directly at the delay taps and sum(p) equals the total path power.
 */
SampledPdp sampled_pdp(const PowerDelayProfile& pdp, const OfdmConfig& cfg);

/** Taps up to the last one holding at least rel_tol of the total mass. */
int support_length(const SampledPdp& pdp, scalar_t rel_tol = 1e-12);

}  // namespace chanest
