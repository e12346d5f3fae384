#include "chanest/ofdm.hpp"

#include <cmath>
#include <stdexcept>

#include "chanest/dft.hpp"
#include "chanest/rng.hpp"

namespace chanest {

std::vector<int> PilotPattern::pilot_subcarriers(int n_subcarriers) const {
    std::vector<int> idx;
    idx.reserve(static_cast<std::size_t>(n_subcarriers / subcarrier_stride));
    for (int k = subcarrier_offset; k < n_subcarriers; k += subcarrier_stride) idx.push_back(k);
    return idx;
}

std::vector<int> PilotPattern::pilot_symbols_0based() const {
    std::vector<int> idx;
    idx.reserve(pilot_symbols_1based.size());
    for (int s : pilot_symbols_1based) idx.push_back(s - 1);
    return idx;
}

void OfdmConfig::validate() const {
    if (n_subcarriers < 4 || n_subcarriers % 2 != 0)
        throw std::invalid_argument("OfdmConfig: n_subcarriers must be even and >= 4");
    if (cp_len < 1) throw std::invalid_argument("OfdmConfig: cp_len must be >= 1");
    if (impl_delay < 0) throw std::invalid_argument("OfdmConfig: impl_delay must be >= 0");
    if (dmrs.pilot_symbols_1based.empty())
        throw std::invalid_argument("OfdmConfig: pilot pattern has no pilot symbols");
    int max_sym = 0;
    for (int s : dmrs.pilot_symbols_1based) max_sym = std::max(max_sym, s);
    if (n_symbols < max_sym)
        throw std::invalid_argument("OfdmConfig: n_symbols too small for the pilot pattern");
    if (n_subcarriers % dmrs.subcarrier_stride != 0)
        throw std::invalid_argument("OfdmConfig: n_subcarriers not divisible by the pilot stride");
    if (dmrs.subcarrier_offset < 0 || dmrs.subcarrier_offset >= dmrs.subcarrier_stride)
        throw std::invalid_argument("OfdmConfig: pilot subcarrier offset out of range");
    if (sample_period <= 0 || subcarrier_spacing <= 0)
        throw std::invalid_argument("OfdmConfig: periods must be positive");
}

OfdmConfig OfdmConfig::make_alternative() {
    OfdmConfig cfg;
    cfg.dmrs = PilotPattern::make_alternative();
    return cfg;
}

RoleGrid grid_roles(const OfdmConfig& cfg) {
    RoleGrid roles(cfg.n_subcarriers, cfg.n_symbols);
    roles.setConstant(static_cast<std::uint8_t>(CellRole::data));
    for (int l : cfg.dmrs.pilot_symbols_0based()) {
        for (int k = 0; k < cfg.n_subcarriers; ++k) {
            const bool is_pilot = (k % cfg.dmrs.subcarrier_stride) == cfg.dmrs.subcarrier_offset;
            roles(k, l) = static_cast<std::uint8_t>(is_pilot ? CellRole::pilot : CellRole::vacant_pilot);
        }
    }
    return roles;
}

int data_cell_count(const OfdmConfig& cfg) {
    return cfg.n_subcarriers * (cfg.n_symbols - cfg.dmrs.n_pilot_symbols());
}

BitBlock random_bits(int n, std::uint64_t seed) {
    Rng rng(seed);
    BitBlock bits(static_cast<std::size_t>(n));
    for (auto& b : bits) b = rng.bit() ? 1 : 0;
    return bits;
}

cvec_t qpsk_modulate(const BitBlock& bits) {
    if (bits.size() % 2 != 0) throw std::invalid_argument("qpsk_modulate: odd bit count");
    const scalar_t inv_sqrt2 = 1.0 / std::sqrt(2.0);
    cvec_t out(static_cast<Eigen::Index>(bits.size() / 2));
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const scalar_t re = bits[static_cast<std::size_t>(2 * i)] ? -1.0 : 1.0;
        const scalar_t im = bits[static_cast<std::size_t>(2 * i + 1)] ? -1.0 : 1.0;
        out(i) = cx_t(re * inv_sqrt2, im * inv_sqrt2);
    }
    return out;
}

BitBlock qpsk_demodulate(const cvec_t& symbols) {
    BitBlock bits(static_cast<std::size_t>(2 * symbols.size()));
    for (Eigen::Index i = 0; i < symbols.size(); ++i) {
        bits[static_cast<std::size_t>(2 * i)] = symbols(i).real() < 0.0 ? 1 : 0;
        bits[static_cast<std::size_t>(2 * i + 1)] = symbols(i).imag() < 0.0 ? 1 : 0;
    }
    return bits;
}

ResourceGrid pilot_grid(const OfdmConfig& cfg, std::uint64_t pilot_seed) {
    cfg.validate();
    ResourceGrid grid;
    grid.cells = cmat_t::Zero(cfg.n_subcarriers, cfg.n_symbols);
    grid.roles = grid_roles(cfg);
    Rng rng(pilot_seed);
    const scalar_t inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int l : cfg.dmrs.pilot_symbols_0based()) {
        for (int k : cfg.dmrs.pilot_subcarriers(cfg.n_subcarriers)) {
            const scalar_t re = rng.bit() ? -inv_sqrt2 : inv_sqrt2;
            const scalar_t im = rng.bit() ? -inv_sqrt2 : inv_sqrt2;
            grid.cells(k, l) = cx_t(re, im);
        }
    }
    return grid;
}

ResourceGrid build_slot(const BitBlock& bits, const OfdmConfig& cfg, std::uint64_t pilot_seed) {
    if (static_cast<int>(bits.size()) != 2 * data_cell_count(cfg))
        throw std::invalid_argument("build_slot: bit count does not match the data cell count");
    ResourceGrid grid = pilot_grid(cfg, pilot_seed);
    const cvec_t symbols = qpsk_modulate(bits);
    Eigen::Index next = 0;
    for (int l = 0; l < cfg.n_symbols; ++l) {
        for (int k = 0; k < cfg.n_subcarriers; ++k) {
            if (grid.role(k, l) == CellRole::data) grid.cells(k, l) = symbols(next++);
        }
    }
    return grid;
}

cvec_t ofdm_transmit(const ResourceGrid& grid, const OfdmConfig& cfg) {
    if (grid.cells.rows() != cfg.n_subcarriers || grid.cells.cols() != cfg.n_symbols)
        throw std::invalid_argument("ofdm_transmit: grid dimensions do not match the config");
    const cmat_t& idft = unitary_idft(cfg.n_subcarriers);
    const int ext = cfg.cyclic_ext();
    const int sym_len = cfg.symbol_len();
    cvec_t out(static_cast<Eigen::Index>(cfg.n_symbols) * sym_len);
    for (int l = 0; l < cfg.n_symbols; ++l) {
        const cvec_t core = idft * grid.cells.col(l);
        out.segment(static_cast<Eigen::Index>(l) * sym_len, ext) = core.tail(ext);
        out.segment(static_cast<Eigen::Index>(l) * sym_len + ext, cfg.n_subcarriers) = core;
    }
    return out;
}

ResourceGrid ofdm_receive(const cvec_t& samples, const OfdmConfig& cfg) {
    const int sym_len = cfg.symbol_len();
    if (samples.size() != static_cast<Eigen::Index>(cfg.n_symbols) * sym_len)
        throw std::invalid_argument("ofdm_receive: sample count does not match the config");
    const cmat_t& dft = unitary_dft(cfg.n_subcarriers);
    ResourceGrid grid;
    grid.cells.resize(cfg.n_subcarriers, cfg.n_symbols);
    grid.roles = grid_roles(cfg);
    const int ext = cfg.cyclic_ext();
    for (int l = 0; l < cfg.n_symbols; ++l) {
        grid.cells.col(l) =
            dft * samples.segment(static_cast<Eigen::Index>(l) * sym_len + ext, cfg.n_subcarriers);
    }
    return grid;
}

scalar_t grid_mean_power(const ResourceGrid& grid) {
    return grid.cells.squaredNorm() / static_cast<scalar_t>(grid.cells.size());
}

}  // namespace chanest
