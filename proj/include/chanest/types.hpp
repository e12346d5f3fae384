#pragma once

#include <complex>
#include <Eigen/Dense>

namespace chanest {

/** Scalar type */
using scalar_t = double;

/** Complex scalar */
using cx_t = std::complex<scalar_t>;

/** Dense real vector */
using vec_t = Eigen::Matrix<scalar_t, Eigen::Dynamic, 1>;

/** Dense complex vector */
using cvec_t = Eigen::Matrix<cx_t, Eigen::Dynamic, 1>;

/** Dense real matrix */
using mat_t = Eigen::Matrix<scalar_t, Eigen::Dynamic, Eigen::Dynamic>;

/** Dense complex matrix */
using cmat_t = Eigen::Matrix<cx_t, Eigen::Dynamic, Eigen::Dynamic>;

/** Frequency-domain channel over one slot: n_subcarriers x n_symbols */
using ChannelMatrix = cmat_t;

inline constexpr scalar_t kPi = 3.14159265358979323846;

}  // namespace chanest
