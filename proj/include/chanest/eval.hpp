#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "chanest/channel.hpp"
#include "chanest/estimators.hpp"
#include "chanest/simplenet.hpp"

namespace chanest {

enum class EstimatorKind { ls_interp, mmse_designed, simplenet, perfect_csi };

struct EvalSpec {
    EstimatorKind kind = EstimatorKind::ls_interp;
    std::optional<PowerDelayProfile> design_pdp;  // for mmse_designed
    std::optional<ModelParams> model;             // for simplenet
    std::vector<PowerDelayProfile> channels;
    std::vector<scalar_t> snr_grid_db;
    scalar_t doppler_max_hz = 97.0;
    bool quasi_static = false;
    int n_sinusoids = 32;
    int n_slots = 5000;
    std::uint64_t seed = 0;
    bool pilot_only = false;  // score the channel estimate at the pilot cells only
    OfdmConfig cfg;
};

struct CurvePoint {
    std::string channel;
    std::string x_kind;  // "snr_db" or "ds_ns"
    scalar_t x_value = 0.0;
    scalar_t mse = 0.0;
    scalar_t mse_stderr = 0.0;
    scalar_t ber = 0.0;
    scalar_t ber_stderr = 0.0;
    int n_slots = 0;
};

/**
 * End-to-end Monte Carlo sweep: per (channel, SNR) point, n_slots slots are
 * simulated, the channel estimated, the data cells equalized by Y/H and
 * demodulated. MSE covers every resource element (or only the pilot cells in
 * pilot_only mode); BER covers the data cells.
 */
std::vector<CurvePoint> run_sweep(const EvalSpec& spec);

/**
 * Delay-spread sweep at one SNR: the model profile is rescaled to each grid
 * value before evaluation; x_kind is "ds_ns".
 */
std::vector<CurvePoint> ds_sweep(const EvalSpec& spec, const PowerDelayProfile& tdl_model,
                                 const std::vector<scalar_t>& ds_grid_s, scalar_t snr_db);

/**
 * SNR gap between two BER curves at a target BER, interpolated linearly in
 * (snr_db, log10 ber). Empty when either curve does not reach the target.
 */
std::optional<scalar_t> delta_snr(const std::vector<CurvePoint>& curve_a,
                                  const std::vector<CurvePoint>& curve_b, scalar_t target_ber);

/** CSV rows: channel,x_kind,x_value,mse,mse_stderr,ber,ber_stderr,n_slots. */
void write_csv(const std::vector<CurvePoint>& points, std::ostream& out);

}  // namespace chanest
