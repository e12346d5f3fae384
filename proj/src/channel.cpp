#include "chanest/channel.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "chanest/dft.hpp"
#include "chanest/rng.hpp"

namespace chanest {

vec_t PowerDelayProfile::linear_gains() const {
    vec_t g(gains_db.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = std::pow(10.0, gains_db(i) / 10.0);
    return g;
}

void PowerDelayProfile::validate() const {
    if (delays_s.size() < 1) throw std::invalid_argument("PowerDelayProfile: needs at least one path");
    if (delays_s.size() != gains_db.size())
        throw std::invalid_argument("PowerDelayProfile: delay/gain length mismatch");
    if (delays_s(0) < 0.0) throw std::invalid_argument("PowerDelayProfile: negative first delay");
    for (Eigen::Index i = 1; i < delays_s.size(); ++i)
        if (delays_s(i) < delays_s(i - 1))
            throw std::invalid_argument("PowerDelayProfile: delays must be ascending");
    for (Eigen::Index i = 0; i < gains_db.size(); ++i)
        if (!std::isfinite(gains_db(i)))
            throw std::invalid_argument("PowerDelayProfile: non-finite gain");
}

ChannelRealization realize_channel(const PowerDelayProfile& pdp, const FadingSpec& fading,
                                   const OfdmConfig& cfg, std::uint64_t seed) {
    pdp.validate();
    if (fading.n_sinusoids < 8)
        throw std::invalid_argument("realize_channel: n_sinusoids must be >= 8");
    if (fading.max_doppler < 0.0)
        throw std::invalid_argument("realize_channel: negative max_doppler");
    if (pdp.max_delay_s() > cfg.slot_duration())
        throw std::invalid_argument("realize_channel: max path delay exceeds the slot duration");

    const int n_paths = pdp.n_paths();
    const int n_sym = cfg.n_symbols;
    const vec_t gains = pdp.linear_gains();

    Rng rng(seed);
    ChannelRealization real;
    real.doppler_hz = rng.uniform(0.0, fading.max_doppler);
    real.path_gains.resize(n_paths, n_sym);
    real.delays_samples = pdp.delays_s / cfg.sample_period;
    real.exceeds_cp =
        pdp.max_delay_s() > static_cast<scalar_t>(cfg.cyclic_ext()) * cfg.sample_period;

    const scalar_t t_o = cfg.symbol_period_with_cp();
    const int k_sin = fading.n_sinusoids;
    const scalar_t amp_scale = 1.0 / std::sqrt(static_cast<scalar_t>(k_sin));
    for (int m = 0; m < n_paths; ++m) {
        const scalar_t amp = std::sqrt(gains(m)) * amp_scale;
        cvec_t acc = cvec_t::Zero(n_sym);
        for (int s = 0; s < k_sin; ++s) {
            const scalar_t alpha = rng.uniform(0.0, 2.0 * kPi);
            const scalar_t phi = rng.uniform(0.0, 2.0 * kPi);
            const scalar_t omega = 2.0 * kPi * real.doppler_hz * std::cos(alpha);
            // rotate through the symbol instants instead of re-evaluating exp
            const cx_t step(std::cos(omega * t_o), std::sin(omega * t_o));
            cx_t phasor(std::cos(phi), std::sin(phi));
            for (int l = 0; l < n_sym; ++l) {
                acc(l) += phasor;
                phasor *= step;
            }
        }
        if (fading.quasi_static) acc.setConstant(acc(0));
        real.path_gains.row(m) = (amp * acc).transpose();
    }
    return real;
}

cvec_t sampled_taps(const ChannelRealization& real, const OfdmConfig& cfg, int symbol_index) {
    const int nf = cfg.n_subcarriers;
    cvec_t taps = cvec_t::Zero(nf);
    for (int m = 0; m < real.path_gains.rows(); ++m) {
        const cx_t a = real.path_gains(m, symbol_index);
        const scalar_t tau = real.delays_samples(m);
        for (int n = 0; n < nf; ++n) taps(n) += a * dirichlet_tap(nf, n, tau);
    }
    return taps;
}

ChannelMatrix freq_response(const ChannelRealization& real, const OfdmConfig& cfg) {
    const int nf = cfg.n_subcarriers;
    const int n_paths = static_cast<int>(real.path_gains.rows());
    cmat_t ramps(nf, n_paths);
    for (int m = 0; m < n_paths; ++m) ramps.col(m) = phase_ramp(nf, real.delays_samples(m));
    return (ramps * real.path_gains) / std::sqrt(static_cast<scalar_t>(nf));
}

cvec_t apply_channel(const cvec_t& tx, const ChannelRealization& real, scalar_t snr_db,
                     const OfdmConfig& cfg, std::uint64_t noise_seed, scalar_t sigma_x_sq) {
    const int nf = cfg.n_subcarriers;
    const int sym_len = cfg.symbol_len();
    const int ext = cfg.cyclic_ext();
    const int n_sym = static_cast<int>(tx.size() / sym_len);
    if (tx.size() != static_cast<Eigen::Index>(n_sym) * sym_len)
        throw std::invalid_argument("apply_channel: sample count is not a whole number of symbols");

    // group paths by the integer part of their delay
    std::map<int, std::vector<int>> groups;
    for (int m = 0; m < real.path_gains.rows(); ++m)
        groups[static_cast<int>(std::floor(real.delays_samples(m)))].push_back(m);

    const cmat_t& dft = unitary_dft(nf);
    const cmat_t& idft = unitary_idft(nf);
    const scalar_t inv_sqrt_nf = 1.0 / std::sqrt(static_cast<scalar_t>(nf));

    cvec_t out = cvec_t::Zero(tx.size());
    cvec_t grid_col(nf), shaped(nf), core(nf);
    for (int l = 0; l < n_sym; ++l) {
        const Eigen::Index base = static_cast<Eigen::Index>(l) * sym_len;
        grid_col = dft * tx.segment(base + ext, nf);
        for (const auto& [delay_int, members] : groups) {
            shaped.setZero();
            for (int m : members) {
                const scalar_t frac = real.delays_samples(m) - static_cast<scalar_t>(delay_int);
                shaped += real.path_gains(m, l) * phase_ramp(nf, frac).cwiseProduct(grid_col);
            }
            core = idft * (inv_sqrt_nf * shaped);
            // re-prefix and place at the group's integer delay
            const Eigen::Index start = base + delay_int;
            for (int i = 0; i < sym_len; ++i) {
                const Eigen::Index pos = start + i;
                if (pos < 0 || pos >= out.size()) continue;
                out(pos) += i < ext ? core(nf - ext + i) : core(i - ext);
            }
        }
    }

    if (std::isfinite(snr_db)) {
        const scalar_t sigma_n_sq = sigma_x_sq * std::pow(10.0, -snr_db / 10.0);
        Rng rng(noise_seed);
        for (Eigen::Index i = 0; i < out.size(); ++i) out(i) += rng.cnormal(sigma_n_sq);
    }
    return out;
}

PowerDelayProfile scale_tdl(const PowerDelayProfile& model_pdp, scalar_t ds_desired_s) {
    if (ds_desired_s < 0.0) throw std::invalid_argument("scale_tdl: negative delay spread");
    PowerDelayProfile scaled = model_pdp;
    scaled.delays_s = model_pdp.delays_s * ds_desired_s;
    return scaled;
}

scalar_t ce_default_zeta(const OfdmConfig& cfg) {
    return 1.0 / (3.0 * cfg.subcarrier_spacing * static_cast<scalar_t>(cfg.n_subcarriers - 1));
}

PowerDelayProfile ce_channel(const OfdmConfig& cfg, scalar_t zeta_s) {
    if (zeta_s <= 0.0) throw std::invalid_argument("ce_channel: zeta must be positive");
    const int n_paths = static_cast<int>(std::floor(cfg.cp_duration() / zeta_s));
    if (n_paths < 1) throw std::invalid_argument("ce_channel: zeta exceeds the CP duration");
    PowerDelayProfile pdp;
    pdp.name = "CE";
    pdp.delays_s.resize(n_paths);
    pdp.gains_db = vec_t::Zero(n_paths);
    for (int i = 0; i < n_paths; ++i) pdp.delays_s(i) = zeta_s * static_cast<scalar_t>(i);
    return pdp;
}

SampledPdp sampled_pdp(const PowerDelayProfile& pdp, const OfdmConfig& cfg) {
    pdp.validate();
    const int nf = cfg.n_subcarriers;
    const vec_t gains = pdp.linear_gains();
    const scalar_t norm = 1.0 / (static_cast<scalar_t>(nf) * static_cast<scalar_t>(nf));
    SampledPdp out;
    out.p = vec_t::Zero(nf);
    for (int m = 0; m < pdp.n_paths(); ++m) {
        const scalar_t tau = pdp.delays_s(m) / cfg.sample_period;
        for (int n = 0; n < nf; ++n)
            out.p(n) += gains(m) * std::norm(dirichlet_tap(nf, n, tau)) * norm;
    }
    return out;
}

int support_length(const SampledPdp& pdp, scalar_t rel_tol) {
    const scalar_t thresh = pdp.p.sum() * rel_tol;
    int len = 0;
    for (Eigen::Index n = 0; n < pdp.p.size(); ++n)
        if (pdp.p(n) > thresh) len = static_cast<int>(n) + 1;
    return len == 0 ? 1 : len;
}

}  // namespace chanest
