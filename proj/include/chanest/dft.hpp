#pragma once

#include "chanest/types.hpp"

namespace chanest {

/**
 * Unitary DFT matrix F with F(k, n) = exp(-2*pi*i*k*n/N) / sqrt(N).
 * Cached per size; the returned reference stays valid for the process lifetime.
 */
const cmat_t& unitary_dft(int n);

/** Adjoint of unitary_dft(n) (the unitary inverse transform). */
const cmat_t& unitary_idft(int n);

/** Phase ramp r(k) = exp(-2*pi*i*k*tau/n), k = 0..n-1, for a delay of tau samples. */
cvec_t phase_ramp(int n, scalar_t tau);

/**
 * Periodic interpolation kernel of an n-point transform for a delay of tau
 * samples: the inverse transform (no scaling) of the phase ramp. At integer
 * tau the 0/0 limit resolves to n at tap tau and 0 elsewhere.
 */
cx_t dirichlet_tap(int n_fft, int tap, scalar_t tau);

/** All n_fft taps of dirichlet_tap for one delay. */
cvec_t dirichlet_kernel(int n_fft, scalar_t tau);

}  // namespace chanest
