#pragma once

#include <cstdint>
#include <optional>

#include "chanest/channel.hpp"
#include "chanest/estimators.hpp"
#include "chanest/types.hpp"

namespace chanest {

/** Closed-form mismatch MSE of a filter designed on one profile and applied to another. */
struct MismatchReport {
    scalar_t epsilon_m = 0.0;  // exact per-tap mismatch MSE
    scalar_t xi_m = 0.0;       // captured-gain term, summed over the common support
    vec_t z_diag;              // per-tap shrinkage of the designed filter
    int common_support = 0;    // taps included in xi_m
    std::optional<scalar_t> monte_carlo_mse;
    std::optional<scalar_t> monte_carlo_stderr;
    std::optional<scalar_t> relative_gap;  // |epsilon_m - mc| / mc
};

/** Piecewise-linear dB envelope through the (delay, gain) knots. */
struct PdpEnvelope {
    vec_t delays_s;
    vec_t gains_db;

    /** -inf outside [first, last] knot. */
    scalar_t evaluate(scalar_t tau_s) const;
};

struct Applicability {
    enum class Verdict { applicable, violates_c1, violates_c2 };
    Verdict verdict = Verdict::applicable;
    std::optional<scalar_t> violating_tau_s;  // first violating delay for C1

    bool ok() const { return verdict == Verdict::applicable; }
};

struct MonteCarloMse {
    scalar_t mse = 0.0;
    scalar_t stderr_ = 0.0;
    int n_trials = 0;
};

/** z(k) = p_D(k) / (p_D(k) + rho). */
vec_t shrinkage_z(const SampledPdp& p_design, const NoiseConfig& noise);

/**
 * Exact mismatch error
 *   epsilon_M = (1/N_f) * sum_k [ p_A(k)*(1-z(k))^2 + rho*z(k)^2 ]
 * plus the gain term xi_M = (1/N_f) * sum_{k<L} p_A(k)*(2z(k)-z(k)^2) over the
 * minimum of the two supports.
 */
MismatchReport mismatch_error(const SampledPdp& p_design, const SampledPdp& p_actual,
                              const NoiseConfig& noise);

/**
 * The literal trace form of the mismatch error, whose first term is the
 * identity instead of the actual spectrum; coincides with epsilon_M when
 * sum(p_A) = N_f.
 */
scalar_t mismatch_error_literal(const SampledPdp& p_design, const SampledPdp& p_actual,
                                const NoiseConfig& noise);

/** Flat-design gain term ((2z - z^2)/N_f) * sum_{k<L} p_A(k). */
scalar_t flat_design_error(scalar_t z, const SampledPdp& p_actual, int l_design);

/** Diagnostic spectrum delta(k) = p_A(k) / (p_D(k) + rho). */
vec_t mmse_shrinkage_spectrum(const SampledPdp& p_design, const SampledPdp& p_actual,
                              const NoiseConfig& noise);

PdpEnvelope envelope(const PowerDelayProfile& pdp);

/**
 * Checks whether a filter/network designed on `designed` covers `actual`:
 * C2 first (max delay and path count), then the dB envelope dominance C1
 * sampled on the union of both knot sets plus a 1000-point uniform grid over
 * the actual profile's delay span.
 */
Applicability is_applicable(const PowerDelayProfile& actual, const PowerDelayProfile& designed);

/**
 * Monte Carlo anchor: quasi-static realizations of actual_pdp, full-band LS
 * with noise variance rho, filtered by the designed weighting matrix;
 * returns the per-subcarrier MSE with its standard error.
 */
MonteCarloMse verify_mismatch(const SampledPdp& p_design, const PowerDelayProfile& actual_pdp,
                              const NoiseConfig& noise, const OfdmConfig& cfg, int n_trials,
                              std::uint64_t seed);

/** verify_mismatch with an explicit weighting matrix (for perturbation studies). */
MonteCarloMse verify_weights(const cmat_t& weights, const PowerDelayProfile& actual_pdp,
                             const NoiseConfig& noise, const OfdmConfig& cfg, int n_trials,
                             std::uint64_t seed);

}  // namespace chanest
