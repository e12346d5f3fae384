#include "chanest/estimators.hpp"

#include <cmath>
#include <stdexcept>

#include "chanest/dft.hpp"
#include "chanest/interp.hpp"

namespace chanest {

PilotLsEstimate ls_estimate(const ResourceGrid& rx_grid, const ResourceGrid& tx_pilots,
                            const OfdmConfig& cfg) {
    PilotLsEstimate est;
    est.pilot_subcarriers = cfg.dmrs.pilot_subcarriers(cfg.n_subcarriers);
    est.pilot_symbols = cfg.dmrs.pilot_symbols_0based();
    est.values.resize(static_cast<Eigen::Index>(est.pilot_subcarriers.size()),
                      static_cast<Eigen::Index>(est.pilot_symbols.size()));
    for (std::size_t j = 0; j < est.pilot_symbols.size(); ++j) {
        for (std::size_t i = 0; i < est.pilot_subcarriers.size(); ++i) {
            const cx_t x = tx_pilots.cells(est.pilot_subcarriers[i], est.pilot_symbols[j]);
            if (x == cx_t(0.0, 0.0))
                throw std::invalid_argument("ls_estimate: zero pilot symbol");
            est.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rx_grid.cells(est.pilot_subcarriers[i], est.pilot_symbols[j]) / x;
        }
    }
    return est;
}

namespace {

std::vector<scalar_t> to_real(const std::vector<int>& v) {
    std::vector<scalar_t> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<scalar_t>(v[i]);
    return out;
}

std::vector<scalar_t> index_range(int n) {
    std::vector<scalar_t> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = static_cast<scalar_t>(i);
    return out;
}

}  // namespace

ChannelMatrix bilinear_interpolate(const PilotLsEstimate& pilot_est, const OfdmConfig& cfg) {
    if (pilot_est.pilot_subcarriers.size() < 2 || pilot_est.pilot_symbols.size() < 2)
        throw std::invalid_argument("bilinear_interpolate: needs >= 2 pilot rows and columns");
    const mat_t freq = interp_matrix(to_real(pilot_est.pilot_subcarriers), index_range(cfg.n_subcarriers));
    const mat_t time = interp_matrix(to_real(pilot_est.pilot_symbols), index_range(cfg.n_symbols));
    return apply_separable(freq, pilot_est.values, time);
}

CorrelationSet correlation_for_pilots(const PowerDelayProfile& pdp, const OfdmConfig& cfg,
                                      std::vector<int> pilot_subcarriers) {
    pdp.validate();
    const int nf = cfg.n_subcarriers;
    const vec_t gains = pdp.linear_gains();

    // R_HH depends only on the subcarrier difference
    cvec_t row = cvec_t::Zero(2 * nf - 1);  // index d + (nf-1) holds the value at lag d
    for (int d = -(nf - 1); d <= nf - 1; ++d) {
        cx_t acc(0.0, 0.0);
        for (int m = 0; m < pdp.n_paths(); ++m) {
            const scalar_t tau = pdp.delays_s(m) / cfg.sample_period;
            const scalar_t ang = -2.0 * kPi * tau * static_cast<scalar_t>(d) / static_cast<scalar_t>(nf);
            acc += gains(m) * cx_t(std::cos(ang), std::sin(ang));
        }
        row(d + nf - 1) = acc / static_cast<scalar_t>(nf);
    }

    CorrelationSet corr;
    corr.pilot_subcarriers = std::move(pilot_subcarriers);
    corr.r_hh.resize(nf, nf);
    for (int k1 = 0; k1 < nf; ++k1)
        for (int k2 = 0; k2 < nf; ++k2) corr.r_hh(k1, k2) = row(k1 - k2 + nf - 1);

    const int np = static_cast<int>(corr.pilot_subcarriers.size());
    corr.r_hc_hp.resize(nf, np);
    corr.r_hp_hp.resize(np, np);
    for (int j = 0; j < np; ++j) {
        corr.r_hc_hp.col(j) = corr.r_hh.col(corr.pilot_subcarriers[static_cast<std::size_t>(j)]);
        for (int i = 0; i < np; ++i)
            corr.r_hp_hp(i, j) = corr.r_hh(corr.pilot_subcarriers[static_cast<std::size_t>(i)],
                                           corr.pilot_subcarriers[static_cast<std::size_t>(j)]);
    }
    return corr;
}

CorrelationSet correlation_from_pdp(const PowerDelayProfile& pdp, const OfdmConfig& cfg) {
    return correlation_for_pilots(pdp, cfg, cfg.dmrs.pilot_subcarriers(cfg.n_subcarriers));
}

ChannelMatrix mmse_estimate(const PilotLsEstimate& pilot_ls, const CorrelationSet& corr,
                            const NoiseConfig& noise, const OfdmConfig& cfg) {
    const int np = static_cast<int>(corr.pilot_subcarriers.size());
    if (pilot_ls.values.rows() != np)
        throw std::invalid_argument("mmse_estimate: pilot row count does not match the correlation set");

    Eigen::SelfAdjointEigenSolver<cmat_t> es(corr.r_hp_hp);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < -1e-10 * std::abs(es.eigenvalues().maxCoeff()))
        throw std::invalid_argument("mmse_estimate: correlation input is not positive semidefinite");

    cmat_t gram = corr.r_hp_hp;
    gram.diagonal().array() += noise.rho();
    Eigen::LDLT<cmat_t> solver(gram);
    if (solver.info() != Eigen::Success || solver.rcond() < 1e-12) {
        gram.diagonal().array() += 1e-12;
        solver.compute(gram);
    }

    // full-band estimate per pilot symbol, then interpolate over time
    cmat_t per_symbol(cfg.n_subcarriers, pilot_ls.values.cols());
    for (Eigen::Index j = 0; j < pilot_ls.values.cols(); ++j)
        per_symbol.col(j) = corr.r_hc_hp * solver.solve(pilot_ls.values.col(j));

    const mat_t time = interp_matrix(to_real(pilot_ls.pilot_symbols), index_range(cfg.n_symbols));
    const mat_t freq = mat_t::Identity(cfg.n_subcarriers, cfg.n_subcarriers);
    return apply_separable(freq, per_symbol, time);
}

cmat_t mmse_weight_dft(const SampledPdp& p_design, const NoiseConfig& noise) {
    const int nf = static_cast<int>(p_design.p.size());
    // column n of the unitary DFT matrix is the ramp of an integer delay n
    const cmat_t& d = unitary_dft(nf);
    vec_t shrink(nf);
    for (int k = 0; k < nf; ++k) {
        const scalar_t denom = p_design.p(k) + noise.rho();
        shrink(k) = denom > 0.0 ? p_design.p(k) / denom : 0.0;
    }
    return d * shrink.asDiagonal() * d.adjoint();
}

}  // namespace chanest
