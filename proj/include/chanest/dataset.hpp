#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chanest/channel.hpp"
#include "chanest/ofdm.hpp"
#include "chanest/registry.hpp"

namespace chanest {

/** One training pair: LS at the pilot cells against the exact channel matrix. */
struct DatasetSample {
    cmat_t feature;  // n_pilot_subcarriers x n_pilot_symbols
    cmat_t label;    // n_subcarriers x n_symbols
    float snr_db = 0.0f;
    float doppler_hz = 0.0f;
    std::uint32_t pdp_id = kCustomPdpId;
    std::uint64_t seed = 0;
};

struct DatasetSpec {
    PowerDelayProfile pdp;
    std::uint32_t pdp_id = kCustomPdpId;
    int n_samples = 0;
    scalar_t snr_min_db = 5.0;
    scalar_t snr_max_db = 25.0;
    scalar_t doppler_min_hz = 0.0;  // only 0 is supported; draws are U[0, max]
    scalar_t doppler_max_hz = 97.0;
    scalar_t split = 0.95;  // train fraction
    std::uint64_t master_seed = 0;
    OfdmConfig cfg;
    int n_sinusoids = 32;

    void validate() const;
};

struct Dataset {
    OfdmConfig cfg;
    float snr_min_db = 0.0f, snr_max_db = 0.0f;
    float doppler_min_hz = 0.0f, doppler_max_hz = 0.0f;
    std::uint64_t master_seed = 0;
    std::vector<DatasetSample> samples;

    int size() const { return static_cast<int>(samples.size()); }
};

/** floor(n * split) train samples, the rest validation. */
std::pair<int, int> split_counts(int n, scalar_t split);

/**
 * Per sample: draw SNR and Doppler, realize the channel, run a random slot
 * through it and pair the pilot LS estimate with the exact channel matrix.
 * Deterministic in master_seed via per-sample seeds mix_seed(master, index).
 */
Dataset generate_dataset(const DatasetSpec& spec);

/**
 * Weighted interleave of several specs. The total sample count is the sum of
 * the specs' counts, allocated across specs by largest-remainder rounding of
 * the weights and interleaved by a smallest-quota-first schedule.
 */
Dataset mix_datasets(const std::vector<std::pair<DatasetSpec, scalar_t>>& specs);

void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

/** Exact on-disk record size in bytes for one sample of this configuration. */
std::size_t dataset_record_size(const OfdmConfig& cfg);
std::size_t dataset_header_size();

}  // namespace chanest
