#include "chanest/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "chanest/parallel.hpp"
#include "chanest/rng.hpp"

namespace chanest {

vec_t shrinkage_z(const SampledPdp& p_design, const NoiseConfig& noise) {
    const scalar_t rho = noise.rho();
    vec_t z(p_design.p.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) {
        const scalar_t denom = p_design.p(k) + rho;
        z(k) = denom > 0.0 ? p_design.p(k) / denom : 0.0;
    }
    return z;
}

MismatchReport mismatch_error(const SampledPdp& p_design, const SampledPdp& p_actual,
                              const NoiseConfig& noise) {
    const int nf = static_cast<int>(p_design.p.size());
    MismatchReport rep;
    rep.z_diag = shrinkage_z(p_design, noise);
    rep.common_support = std::min(support_length(p_design), support_length(p_actual));

    const scalar_t rho = noise.rho();
    scalar_t eps = 0.0;
    scalar_t xi = 0.0;
    for (int k = 0; k < nf; ++k) {
        const scalar_t z = rep.z_diag(k);
        eps += p_actual.p(k) * (1.0 - z) * (1.0 - z) + rho * z * z;
        if (k < rep.common_support) xi += p_actual.p(k) * (2.0 * z - z * z);
    }
    rep.epsilon_m = eps / static_cast<scalar_t>(nf);
    rep.xi_m = xi / static_cast<scalar_t>(nf);
    return rep;
}

scalar_t mismatch_error_literal(const SampledPdp& p_design, const SampledPdp& p_actual,
                                const NoiseConfig& noise) {
    const int nf = static_cast<int>(p_design.p.size());
    const vec_t z = shrinkage_z(p_design, noise);
    const scalar_t rho = noise.rho();
    scalar_t acc = 0.0;
    for (int k = 0; k < nf; ++k)
        acc += 1.0 + rho * z(k) * z(k) - p_actual.p(k) * (2.0 * z(k) - z(k) * z(k));
    return acc / static_cast<scalar_t>(nf);
}

scalar_t flat_design_error(scalar_t z, const SampledPdp& p_actual, int l_design) {
    if (z < 0.0 || z > 1.0) throw std::invalid_argument("flat_design_error: z outside [0, 1]");
    const int nf = static_cast<int>(p_actual.p.size());
    const int l = std::min({l_design, support_length(p_actual), nf});
    scalar_t sum = 0.0;
    for (int k = 0; k < l; ++k) sum += p_actual.p(k);
    return (2.0 * z - z * z) * sum / static_cast<scalar_t>(nf);
}

vec_t mmse_shrinkage_spectrum(const SampledPdp& p_design, const SampledPdp& p_actual,
                              const NoiseConfig& noise) {
    const scalar_t rho = noise.rho();
    vec_t delta(p_design.p.size());
    for (Eigen::Index k = 0; k < delta.size(); ++k)
        delta(k) = p_actual.p(k) / (p_design.p(k) + rho);
    return delta;
}

scalar_t PdpEnvelope::evaluate(scalar_t tau_s) const {
    const Eigen::Index n = delays_s.size();
    if (n == 0) return -std::numeric_limits<scalar_t>::infinity();
    if (tau_s < delays_s(0) || tau_s > delays_s(n - 1))
        return -std::numeric_limits<scalar_t>::infinity();
    if (n == 1) return gains_db(0);
    Eigen::Index hi = 1;
    while (hi < n - 1 && delays_s(hi) < tau_s) ++hi;
    const Eigen::Index lo = hi - 1;
    const scalar_t span = delays_s(hi) - delays_s(lo);
    if (span <= 0.0) return std::max(gains_db(lo), gains_db(hi));
    const scalar_t w = (tau_s - delays_s(lo)) / span;
    return (1.0 - w) * gains_db(lo) + w * gains_db(hi);
}

PdpEnvelope envelope(const PowerDelayProfile& pdp) {
    pdp.validate();
    return {pdp.delays_s, pdp.gains_db};
}

Applicability is_applicable(const PowerDelayProfile& actual, const PowerDelayProfile& designed) {
    Applicability out;
    if (actual.max_delay_s() > designed.max_delay_s() || actual.n_paths() > designed.n_paths()) {
        out.verdict = Applicability::Verdict::violates_c2;
        return out;
    }
    const PdpEnvelope theta_a = envelope(actual);
    const PdpEnvelope theta_d = envelope(designed);

    std::set<scalar_t> taus;
    const scalar_t lo = actual.delays_s(0);
    const scalar_t hi = actual.max_delay_s();
    for (Eigen::Index i = 0; i < actual.delays_s.size(); ++i) taus.insert(actual.delays_s(i));
    for (Eigen::Index i = 0; i < designed.delays_s.size(); ++i) {
        const scalar_t t = designed.delays_s(i);
        if (t >= lo && t <= hi) taus.insert(t);
    }
    const int grid_points = 1000;
    for (int i = 0; i < grid_points; ++i) {
        const scalar_t w = grid_points == 1 ? 0.0
                                            : static_cast<scalar_t>(i) /
                                                  static_cast<scalar_t>(grid_points - 1);
        taus.insert(lo + w * (hi - lo));
    }

    for (scalar_t tau : taus) {
        const scalar_t a = theta_a.evaluate(tau);
        const scalar_t d = theta_d.evaluate(tau);
        if (a > d + 1e-9) {
            out.verdict = Applicability::Verdict::violates_c1;
            out.violating_tau_s = tau;
            return out;
        }
    }
    return out;
}

MonteCarloMse verify_weights(const cmat_t& weights, const PowerDelayProfile& actual_pdp,
                             const NoiseConfig& noise, const OfdmConfig& cfg, int n_trials,
                             std::uint64_t seed) {
    if (n_trials < 1) throw std::invalid_argument("verify_weights: n_trials must be >= 1");
    const int nf = cfg.n_subcarriers;
    const scalar_t rho = noise.rho();

    FadingSpec fading;
    fading.quasi_static = true;
    fading.max_doppler = 0.0;

    const std::int64_t block = 64;
    const std::int64_t n_blocks = block_count(n_trials, block);
    std::vector<scalar_t> sum1(static_cast<std::size_t>(n_blocks), 0.0);
    std::vector<scalar_t> sum2(static_cast<std::size_t>(n_blocks), 0.0);

    parallel_blocks(n_trials, block, [&](std::int64_t b, std::int64_t lo, std::int64_t hi) {
        scalar_t s1 = 0.0, s2 = 0.0;
        for (std::int64_t t = lo; t < hi; ++t) {
            const std::uint64_t trial_seed = mix_seed(seed, static_cast<std::uint64_t>(t));
            const ChannelRealization real =
                realize_channel(actual_pdp, fading, cfg, trial_seed);
            const cvec_t h = freq_response(real, cfg).col(0);
            Rng rng(mix_seed(trial_seed, 0x6e6f6973ULL));
            cvec_t ls = h;
            for (int k = 0; k < nf; ++k) ls(k) += rng.cnormal(rho);
            const cvec_t err = weights * ls - h;
            const scalar_t e = err.squaredNorm() / static_cast<scalar_t>(nf);
            s1 += e;
            s2 += e * e;
        }
        sum1[static_cast<std::size_t>(b)] = s1;
        sum2[static_cast<std::size_t>(b)] = s2;
    });

    scalar_t s1 = 0.0, s2 = 0.0;
    for (std::int64_t b = 0; b < n_blocks; ++b) {
        s1 += sum1[static_cast<std::size_t>(b)];
        s2 += sum2[static_cast<std::size_t>(b)];
    }
    const scalar_t n = static_cast<scalar_t>(n_trials);
    MonteCarloMse out;
    out.n_trials = n_trials;
    out.mse = s1 / n;
    const scalar_t var = std::max(0.0, s2 / n - out.mse * out.mse);
    out.stderr_ = std::sqrt(var / n);
    return out;
}

MonteCarloMse verify_mismatch(const SampledPdp& p_design, const PowerDelayProfile& actual_pdp,
                              const NoiseConfig& noise, const OfdmConfig& cfg, int n_trials,
                              std::uint64_t seed) {
    return verify_weights(mmse_weight_dft(p_design, noise), actual_pdp, noise, cfg, n_trials, seed);
}

}  // namespace chanest
