#pragma once

#include <cstdint>
#include <vector>

#include "chanest/types.hpp"

namespace chanest {

enum class CellRole : std::uint8_t { data = 0, pilot = 1, vacant_pilot = 2 };

using RoleGrid = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/** Demodulation reference-signal placement over one slot. */
struct PilotPattern {
    enum class Id : std::uint16_t { standard = 0, alternative = 1 };

    Id id = Id::standard;
    std::vector<int> pilot_symbols_1based;  // OFDM symbols carrying pilots
    int subcarrier_stride = 2;              // one pilot per group of this many subcarriers
    int subcarrier_offset = 1;              // index of the pilot subcarrier within a group

    // Single-symbol DM-RS with three additional positions.
    static PilotPattern make_default() { return {Id::standard, {3, 6, 9, 12}, 2, 1}; }
    // Double-symbol DM-RS.
    static PilotPattern make_alternative() { return {Id::alternative, {3, 4, 11, 12}, 3, 0}; }

    int n_pilot_symbols() const { return static_cast<int>(pilot_symbols_1based.size()); }
    int n_pilot_subcarriers(int n_subcarriers) const { return n_subcarriers / subcarrier_stride; }
    std::vector<int> pilot_subcarriers(int n_subcarriers) const;
    std::vector<int> pilot_symbols_0based() const;
};

struct OfdmConfig {
    int n_subcarriers = 72;
    int n_symbols = 14;
    int cp_len = 10;
    int impl_delay = 7;
    scalar_t subcarrier_spacing = 15e3;
    scalar_t sample_period = 9.3897e-7;
    PilotPattern dmrs = PilotPattern::make_default();

    int cyclic_ext() const { return cp_len + impl_delay; }
    int symbol_len() const { return n_subcarriers + cyclic_ext(); }
    scalar_t symbol_period_with_cp() const { return symbol_len() * sample_period; }
    scalar_t cp_duration() const { return cp_len * sample_period; }
    scalar_t slot_duration() const { return n_symbols * symbol_period_with_cp(); }
    /** Sample period implied by the subcarrier spacing, 1/(N_f * f_space). */
    scalar_t nominal_sample_period() const { return 1.0 / (n_subcarriers * subcarrier_spacing); }

    void validate() const;  // throws std::invalid_argument on violated invariants
    static OfdmConfig make_default() { return {}; }
    static OfdmConfig make_alternative();
};

struct ResourceGrid {
    cmat_t cells;
    RoleGrid roles;

    CellRole role(int k, int l) const { return static_cast<CellRole>(roles(k, l)); }
};

using BitBlock = std::vector<std::uint8_t>;

/** Cell roles implied by a configuration's pilot pattern. */
RoleGrid grid_roles(const OfdmConfig& cfg);

int data_cell_count(const OfdmConfig& cfg);

BitBlock random_bits(int n, std::uint64_t seed);

/** Gray-coded unit-energy QPSK: (b0, b1) -> ((1-2*b0) + j(1-2*b1)) / sqrt(2). */
cvec_t qpsk_modulate(const BitBlock& bits);

/** Minimum-distance hard decision inverting qpsk_modulate. */
BitBlock qpsk_demodulate(const cvec_t& symbols);

/** Pilot cells filled with seeded QPSK symbols, everything else zero. */
ResourceGrid pilot_grid(const OfdmConfig& cfg, std::uint64_t pilot_seed);

/**
 * One slot: pilots seeded from pilot_seed, vacant pilot cells zero, data
 * cells filled column-major from the bit block.
 */
ResourceGrid build_slot(const BitBlock& bits, const OfdmConfig& cfg, std::uint64_t pilot_seed);

/**
 * Per symbol: unitary inverse DFT of the grid column, then the last
 * cp_len + impl_delay samples prepended as the cyclic extension.
 */
cvec_t ofdm_transmit(const ResourceGrid& grid, const OfdmConfig& cfg);

/** Per symbol: drop the cyclic extension, unitary forward DFT. */
ResourceGrid ofdm_receive(const cvec_t& samples, const OfdmConfig& cfg);

/** Mean power over all grid cells, (N_f*N_s)^{-1} * ||X||_F^2. */
scalar_t grid_mean_power(const ResourceGrid& grid);

}  // namespace chanest
