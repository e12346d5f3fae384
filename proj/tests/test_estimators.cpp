#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "chanest/estimators.hpp"
#include "chanest/dft.hpp"
#include "chanest/registry.hpp"
#include "chanest/rng.hpp"
#include "chanest/robustness.hpp"

using namespace chanest;

namespace {

const OfdmConfig kCfg = OfdmConfig::make_default();

struct SlotRun {
    ResourceGrid slot;
    ResourceGrid rx;
    ChannelMatrix h;
    std::uint64_t pilot_seed;
};

SlotRun run_slot(const PowerDelayProfile& pdp, scalar_t snr_db, std::uint64_t seed,
                 bool quasi_static = true) {
    FadingSpec fading;
    fading.quasi_static = quasi_static;
    fading.max_doppler = quasi_static ? 0.0 : 97.0;
    const ChannelRealization real = realize_channel(pdp, fading, kCfg, mix_seed(seed, 1));
    SlotRun run;
    run.pilot_seed = mix_seed(seed, 2);
    const BitBlock bits = random_bits(2 * data_cell_count(kCfg), mix_seed(seed, 3));
    run.slot = build_slot(bits, kCfg, run.pilot_seed);
    const cvec_t tx = ofdm_transmit(run.slot, kCfg);
    const cvec_t rx_samples = apply_channel(tx, real, snr_db, kCfg, mix_seed(seed, 4));
    run.rx = ofdm_receive(rx_samples, kCfg);
    run.h = freq_response(real, kCfg);
    return run;
}

}  // namespace

TEST_CASE("ls is exact without noise and unbiased with it") {
    const PowerDelayProfile etu = resolve_pdp("ETU", kCfg, {});
    const SlotRun clean = run_slot(etu, INFINITY, 5);
    const PilotLsEstimate ls = ls_estimate(clean.rx, pilot_grid(kCfg, clean.pilot_seed), kCfg);
    for (std::size_t j = 0; j < ls.pilot_symbols.size(); ++j)
        for (std::size_t i = 0; i < ls.pilot_subcarriers.size(); ++i)
            CHECK(std::abs(ls.values(i, j) -
                           clean.h(ls.pilot_subcarriers[i], ls.pilot_symbols[j])) < 1e-10);

    // flat channel: the mean of the estimates converges on the true gain
    const PowerDelayProfile flat = resolve_pdp("flat", kCfg, {});
    cx_t mean_est(0.0, 0.0), mean_true(0.0, 0.0);
    for (int i = 0; i < 300; ++i) {
        const SlotRun run = run_slot(flat, 10.0, 100 + i);
        const PilotLsEstimate e = ls_estimate(run.rx, pilot_grid(kCfg, run.pilot_seed), kCfg);
        mean_est += e.values.mean() - run.h(1, 2);
        mean_true += run.h(1, 2);
    }
    CHECK(std::abs(mean_est) / 300.0 < 0.01);
}

TEST_CASE("ls error variance equals the noise-to-signal ratio across snr") {
    const PowerDelayProfile etu = resolve_pdp("ETU", kCfg, {});
    for (scalar_t snr_db : {5.0, 10.0, 15.0, 20.0, 25.0}) {
        const scalar_t rho = std::pow(10.0, -snr_db / 10.0);
        scalar_t err = 0.0;
        int count = 0;
        for (int i = 0; i < 600; ++i) {
            const SlotRun run = run_slot(etu, snr_db, 1000 + i, false);
            const PilotLsEstimate ls = ls_estimate(run.rx, pilot_grid(kCfg, run.pilot_seed), kCfg);
            for (std::size_t j = 0; j < ls.pilot_symbols.size(); ++j)
                for (std::size_t i2 = 0; i2 < ls.pilot_subcarriers.size(); ++i2) {
                    err += std::norm(ls.values(i2, j) -
                                     run.h(ls.pilot_subcarriers[i2], ls.pilot_symbols[j]));
                    ++count;
                }
        }
        CHECK(err / count == doctest::Approx(rho).epsilon(0.03));
    }
}

TEST_CASE("ls rejects zero pilots") {
    const SlotRun run = run_slot(resolve_pdp("flat", kCfg, {}), 10.0, 9);
    ResourceGrid bad = pilot_grid(kCfg, run.pilot_seed);
    bad.cells.setZero();
    CHECK_THROWS(ls_estimate(run.rx, bad, kCfg));
}

TEST_CASE("bilinear interpolation: constants, linear fields, checkerboard") {
    PilotLsEstimate est;
    est.pilot_subcarriers = kCfg.dmrs.pilot_subcarriers(kCfg.n_subcarriers);
    est.pilot_symbols = kCfg.dmrs.pilot_symbols_0based();
    const int rows = static_cast<int>(est.pilot_subcarriers.size());
    const int cols = static_cast<int>(est.pilot_symbols.size());

    est.values = cmat_t::Constant(rows, cols, cx_t(0.7, -0.2));
    ChannelMatrix h = bilinear_interpolate(est, kCfg);
    CHECK((h.array() - cx_t(0.7, -0.2)).matrix().norm() < 1e-12);

    // linear in the subcarrier index: exact at interior cells
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i)
            est.values(i, j) = cx_t(0.05 * est.pilot_subcarriers[static_cast<std::size_t>(i)], 0.0);
    h = bilinear_interpolate(est, kCfg);
    for (int k = est.pilot_subcarriers.front(); k <= est.pilot_subcarriers.back(); ++k)
        CHECK(h(k, 5).real() == doctest::Approx(0.05 * k).epsilon(1e-12));

    // exact on fields bilinear in both indices (interior)
    const auto field = [](scalar_t k, scalar_t l) { return 0.3 + 0.02 * k - 0.05 * l + 0.004 * k * l; };
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i)
            est.values(i, j) = cx_t(field(est.pilot_subcarriers[static_cast<std::size_t>(i)],
                                          est.pilot_symbols[static_cast<std::size_t>(j)]), 0.0);
    h = bilinear_interpolate(est, kCfg);
    for (int k = est.pilot_subcarriers.front(); k <= est.pilot_subcarriers.back(); ++k)
        for (int l = est.pilot_symbols.front(); l <= est.pilot_symbols.back(); ++l)
            CHECK(h(k, l).real() == doctest::Approx(field(k, l)).epsilon(1e-10));

    // checkerboard +-1 along frequency: interior non-pilot rows average to zero,
    // pilot rows keep their value; outside the hull the edge value holds
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) est.values(i, j) = cx_t(i % 2 == 0 ? 1.0 : -1.0, 0.0);
    h = bilinear_interpolate(est, kCfg);
    CHECK(h(2, 2).real() == doctest::Approx(0.0).epsilon(1e-12));  // midpoint of +1, -1
    CHECK(h(1, 2).real() == doctest::Approx(1.0).epsilon(1e-12));  // pilot row
    CHECK(h(3, 2).real() == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(h(0, 2).real() == doctest::Approx(1.0).epsilon(1e-12));  // held edge
    CHECK(h(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));  // held in time too
}

TEST_CASE("correlation matrices: structure and eigenvalues") {
    const PowerDelayProfile flat = resolve_pdp("flat", kCfg, {});
    const CorrelationSet corr_flat = correlation_from_pdp(flat, kCfg);
    const int nf = kCfg.n_subcarriers;
    CHECK((corr_flat.r_hh - cmat_t::Constant(nf, nf, cx_t(1.0 / nf, 0.0))).norm() < 1e-12);

    // Hermitian PSD with a constant diagonal equal to total power / N_f
    for (const char* name : {"ETU", "DC2", "designed"}) {
        const PowerDelayProfile pdp = resolve_pdp(name, kCfg, {});
        const CorrelationSet corr = correlation_from_pdp(pdp, kCfg);
        CHECK((corr.r_hh - corr.r_hh.adjoint()).norm() < 1e-10);
        CHECK((corr.r_hp_hp - corr.r_hp_hp.adjoint()).norm() < 1e-10);
        Eigen::SelfAdjointEigenSolver<cmat_t> es(corr.r_hh);
        CHECK(es.eigenvalues().minCoeff() > -1e-10);
        const scalar_t diag = pdp.total_power() / nf;
        for (int k = 0; k < nf; ++k)
            CHECK(corr.r_hh(k, k).real() == doctest::Approx(diag).epsilon(1e-10));
    }

    // integer-delay profile: eigenvalues equal the sampled-profile values
    PowerDelayProfile integer;
    integer.name = "int";
    integer.delays_s = vec_t(3);
    integer.delays_s << 0.0, 3.0 * kCfg.sample_period, 9.0 * kCfg.sample_period;
    integer.gains_db = vec_t(3);
    integer.gains_db << 0.0, -2.0, -5.0;
    const CorrelationSet corr = correlation_from_pdp(integer, kCfg);
    const SampledPdp p = sampled_pdp(integer, kCfg);
    Eigen::SelfAdjointEigenSolver<cmat_t> es(corr.r_hh);
    vec_t eigs = es.eigenvalues();
    vec_t expected = p.p;
    std::sort(eigs.data(), eigs.data() + eigs.size());
    std::sort(expected.data(), expected.data() + expected.size());
    CHECK((eigs - expected).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("dft-form weighting matrix") {
    const int nf = kCfg.n_subcarriers;
    const NoiseConfig noise = NoiseConfig::from_snr_db(10.0);

    SampledPdp flat_p;
    flat_p.p = vec_t::Constant(nf, 0.5);
    const cmat_t w = mmse_weight_dft(flat_p, noise);
    const scalar_t shrink = 0.5 / (0.5 + noise.rho());
    CHECK((w - shrink * cmat_t::Identity(nf, nf)).norm() < 1e-10);

    // zero noise: projector onto the support
    SampledPdp two_tap;
    two_tap.p = vec_t::Zero(nf);
    two_tap.p(0) = 1.0;
    two_tap.p(4) = 0.5;
    const cmat_t proj = mmse_weight_dft(two_tap, NoiseConfig{0.0, 1.0});
    CHECK((proj * proj - proj).norm() < 1e-9);
    CHECK(proj.trace().real() == doctest::Approx(2.0).epsilon(1e-9));

    // agreement with the correlation-built filter for integer delays
    PowerDelayProfile integer;
    integer.name = "int";
    integer.delays_s = vec_t(2);
    integer.delays_s << 0.0, 4.0 * kCfg.sample_period;
    integer.gains_db = vec_t(2);
    integer.gains_db << 0.0, -3.0;
    const CorrelationSet corr = correlation_from_pdp(integer, kCfg);
    cmat_t gram = corr.r_hh;
    gram.diagonal().array() += noise.rho();
    const cmat_t w_corr = gram.ldlt().solve(corr.r_hh);
    const cmat_t w_dft = mmse_weight_dft(sampled_pdp(integer, kCfg), noise);
    CHECK((w_corr - w_dft).norm() / w_corr.norm() < 1e-8);
}

TEST_CASE("mmse estimator limits") {
    const int nf = kCfg.n_subcarriers;
    const PowerDelayProfile etu = resolve_pdp("ETU", kCfg, {});

    // all subcarriers observed, vanishing noise, full-rank correlation
    // (one unit path at every integer delay): the filter returns the input
    PowerDelayProfile full_support;
    full_support.name = "full";
    full_support.delays_s.resize(nf);
    full_support.gains_db = vec_t::Zero(nf);
    for (int k = 0; k < nf; ++k) full_support.delays_s(k) = k * kCfg.sample_period;
    std::vector<int> all(static_cast<std::size_t>(nf));
    for (int k = 0; k < nf; ++k) all[static_cast<std::size_t>(k)] = k;
    const CorrelationSet corr_all = correlation_for_pilots(full_support, kCfg, all);
    PilotLsEstimate full;
    full.pilot_subcarriers = all;
    full.pilot_symbols = kCfg.dmrs.pilot_symbols_0based();
    Rng rng(3);
    full.values.resize(nf, 4);
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < nf; ++k) full.values(k, j) = rng.cnormal(1.0);
    const ChannelMatrix near_ls = mmse_estimate(full, corr_all, NoiseConfig{1e-12, 1.0}, kCfg);
    for (int j = 0; j < 4; ++j)
        CHECK((near_ls.col(full.pilot_symbols[static_cast<std::size_t>(j)]) - full.values.col(j)).norm() /
                  full.values.col(j).norm() < 1e-4);

    // infinite noise: full shrinkage toward zero
    const CorrelationSet corr = correlation_from_pdp(etu, kCfg);
    PilotLsEstimate pilots;
    pilots.pilot_subcarriers = kCfg.dmrs.pilot_subcarriers(nf);
    pilots.pilot_symbols = kCfg.dmrs.pilot_symbols_0based();
    pilots.values = cmat_t::Constant(nf / 2, 4, cx_t(1.0, 0.0));
    const ChannelMatrix shrunk = mmse_estimate(pilots, corr, NoiseConfig{1e9, 1.0}, kCfg);
    CHECK(shrunk.norm() < 1e-6);

    // non-PSD correlation input is rejected
    CorrelationSet bad = corr;
    bad.r_hp_hp(0, 0) = cx_t(-1.0, 0.0);
    CHECK_THROWS(mmse_estimate(pilots, bad, NoiseConfig::from_snr_db(10.0), kCfg));
}

TEST_CASE("matched mmse beats interpolated ls") {
    const PowerDelayProfile etu = resolve_pdp("ETU", kCfg, {});
    const CorrelationSet corr = correlation_from_pdp(etu, kCfg);
    const NoiseConfig noise = NoiseConfig::from_snr_db(10.0);
    scalar_t mse_mmse = 0.0, mse_ls = 0.0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        const SlotRun run = run_slot(etu, 10.0, 5000 + i, false);
        const PilotLsEstimate ls = ls_estimate(run.rx, pilot_grid(kCfg, run.pilot_seed), kCfg);
        mse_mmse += (mmse_estimate(ls, corr, noise, kCfg) - run.h).squaredNorm();
        mse_ls += (bilinear_interpolate(ls, kCfg) - run.h).squaredNorm();
    }
    CHECK(mse_mmse < mse_ls);
}

TEST_CASE("no perturbed diagonal filter beats the matched shrinkage") {
    const OfdmConfig cfg = kCfg;
    PowerDelayProfile integer;
    integer.name = "int";
    integer.delays_s = vec_t(4);
    integer.delays_s << 0.0, 2.0 * cfg.sample_period, 5.0 * cfg.sample_period, 9.0 * cfg.sample_period;
    integer.gains_db = vec_t(4);
    integer.gains_db << 0.0, -1.0, -2.0, -4.0;
    const SampledPdp p = sampled_pdp(integer, cfg);
    const NoiseConfig noise = NoiseConfig::from_snr_db(10.0);

    const int trials = 4000;
    const auto mc = [&](const cmat_t& w) {
        return verify_weights(w, integer, noise, cfg, trials, 314).mse;
    };
    const scalar_t matched = mc(mmse_weight_dft(p, noise));
    Rng rng(9);
    const cmat_t& d = unitary_dft(cfg.n_subcarriers);
    for (int t = 0; t < 10; ++t) {
        vec_t z(p.p.size());
        for (Eigen::Index k = 0; k < z.size(); ++k) {
            const scalar_t base = p.p(k) / (p.p(k) + noise.rho());
            z(k) = std::clamp(base + rng.uniform(-0.15, 0.15), 0.0, 1.0);
        }
        const cmat_t w = d * z.asDiagonal() * d.adjoint();
        CHECK(matched <= mc(w) + 1e-12);
    }
}
