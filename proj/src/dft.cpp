#include "chanest/dft.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace chanest {

namespace {

const cmat_t& cached_dft(int n, bool adjoint) {
    static std::mutex mu;
    static std::map<std::pair<int, bool>, std::unique_ptr<cmat_t>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{n, adjoint}];
    if (!slot) {
        auto m = std::make_unique<cmat_t>(n, n);
        const scalar_t scale = 1.0 / std::sqrt(static_cast<scalar_t>(n));
        const scalar_t sign = adjoint ? 1.0 : -1.0;
        for (int k = 0; k < n; ++k) {
            for (int j = 0; j < n; ++j) {
                const scalar_t ang = sign * 2.0 * kPi * static_cast<scalar_t>(k) *
                                     static_cast<scalar_t>(j) / static_cast<scalar_t>(n);
                (*m)(k, j) = cx_t(std::cos(ang), std::sin(ang)) * scale;
            }
        }
        slot = std::move(m);
    }
    return *slot;
}

}  // namespace

const cmat_t& unitary_dft(int n) { return cached_dft(n, false); }

const cmat_t& unitary_idft(int n) { return cached_dft(n, true); }

cvec_t phase_ramp(int n, scalar_t tau) {
    cvec_t r(n);
    for (int k = 0; k < n; ++k) {
        const scalar_t ang = -2.0 * kPi * static_cast<scalar_t>(k) * tau / static_cast<scalar_t>(n);
        r(k) = cx_t(std::cos(ang), std::sin(ang));
    }
    return r;
}

cx_t dirichlet_tap(int n_fft, int tap, scalar_t tau) {
    const scalar_t nf = static_cast<scalar_t>(n_fft);
    const scalar_t d = tau - static_cast<scalar_t>(tap);
    if (std::abs(d) < 1e-9) return cx_t(nf, 0.0);
    const scalar_t ang = -kPi * (static_cast<scalar_t>(tap) + (nf - 1.0) * tau) / nf;
    const scalar_t mag = std::sin(kPi * tau) / std::sin(kPi * d / nf);
    return cx_t(std::cos(ang), std::sin(ang)) * mag;
}

cvec_t dirichlet_kernel(int n_fft, scalar_t tau) {
    cvec_t g(n_fft);
    for (int n = 0; n < n_fft; ++n) g(n) = dirichlet_tap(n_fft, n, tau);
    return g;
}

}  // namespace chanest
