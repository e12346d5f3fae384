#include "chanest/interp.hpp"

#include <stdexcept>

namespace chanest {

mat_t interp_matrix(const std::vector<scalar_t>& src, const std::vector<scalar_t>& dst) {
    if (src.empty()) throw std::invalid_argument("interp_matrix: empty source grid");
    for (std::size_t i = 1; i < src.size(); ++i)
        if (!(src[i] > src[i - 1])) throw std::invalid_argument("interp_matrix: source not ascending");

    mat_t m = mat_t::Zero(static_cast<Eigen::Index>(dst.size()), static_cast<Eigen::Index>(src.size()));
    for (std::size_t d = 0; d < dst.size(); ++d) {
        const scalar_t x = dst[d];
        if (src.size() == 1 || x <= src.front()) {
            m(static_cast<Eigen::Index>(d), 0) = 1.0;
            continue;
        }
        if (x >= src.back()) {
            m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(src.size() - 1)) = 1.0;
            continue;
        }
        std::size_t hi = 1;
        while (src[hi] < x) ++hi;
        const std::size_t lo = hi - 1;
        const scalar_t w = (x - src[lo]) / (src[hi] - src[lo]);
        m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(lo)) = 1.0 - w;
        m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(hi)) = w;
    }
    return m;
}

mat_t resize_matrix(int n_in, int n_out) {
    std::vector<scalar_t> src(static_cast<std::size_t>(n_in));
    for (int i = 0; i < n_in; ++i) src[static_cast<std::size_t>(i)] = static_cast<scalar_t>(i);
    std::vector<scalar_t> dst(static_cast<std::size_t>(n_out));
    if (n_out == 1) {
        dst[0] = 0.0;
    } else {
        const scalar_t step = static_cast<scalar_t>(n_in - 1) / static_cast<scalar_t>(n_out - 1);
        for (int i = 0; i < n_out; ++i) dst[static_cast<std::size_t>(i)] = step * static_cast<scalar_t>(i);
    }
    return interp_matrix(src, dst);
}

cmat_t apply_separable(const mat_t& rows, const cmat_t& x, const mat_t& cols) {
    const mat_t re = rows * x.real() * cols.transpose();
    const mat_t im = rows * x.imag() * cols.transpose();
    cmat_t out(re.rows(), re.cols());
    out.real() = re;
    out.imag() = im;
    return out;
}

}  // namespace chanest
