#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "chanest/types.hpp"

namespace testutil {

using chanest::scalar_t;

/** Kolmogorov-Smirnov statistic against U[0,1] after rescaling by (lo, hi). */
inline scalar_t ks_uniform(std::vector<scalar_t> xs, scalar_t lo, scalar_t hi) {
    std::sort(xs.begin(), xs.end());
    const scalar_t n = static_cast<scalar_t>(xs.size());
    scalar_t d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const scalar_t u = (xs[i] - lo) / (hi - lo);
        const scalar_t above = (static_cast<scalar_t>(i) + 1.0) / n - u;
        const scalar_t below = u - static_cast<scalar_t>(i) / n;
        d = std::max({d, above, below});
    }
    return d;
}

/** KS critical value at alpha = 0.01. */
inline scalar_t ks_crit_01(std::size_t n) { return 1.628 / std::sqrt(static_cast<scalar_t>(n)); }

/** Jarque-Bera statistic; compare against chi2(2) quantile 9.21 for p > 0.01. */
inline scalar_t jarque_bera(const std::vector<scalar_t>& xs) {
    const scalar_t n = static_cast<scalar_t>(xs.size());
    scalar_t mean = 0.0;
    for (scalar_t x : xs) mean += x;
    mean /= n;
    scalar_t m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (scalar_t x : xs) {
        const scalar_t d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    const scalar_t skew = m3 / std::pow(m2, 1.5);
    const scalar_t kurt = m4 / (m2 * m2);
    return n * (skew * skew / 6.0 + (kurt - 3.0) * (kurt - 3.0) / 24.0);
}

inline scalar_t correlation(const std::vector<scalar_t>& a, const std::vector<scalar_t>& b) {
    const scalar_t n = static_cast<scalar_t>(a.size());
    scalar_t ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    scalar_t cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    return cov / std::sqrt(va * vb);
}

}  // namespace testutil
