#pragma once

#include <complex>
#include <vector>

#include "aniso/grid.hpp"

namespace aniso {

// In-place radix-2 FFT, size must be a power of two. No normalization.
void fft_pow2(std::complex<double>* a, std::int64_t n, bool inverse);
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse);
// Row-major n0 x n1 transform (both powers of two), unnormalized.
void fft2_pow2(std::vector<std::complex<double>>& a, std::int64_t n0, std::int64_t n1,
               bool inverse);

bool is_pow2(std::int64_t n);
std::int64_t next_pow2(std::int64_t n);

// Dual grid of a space grid: per axis, count N, spacing 1/(N h),
// frequencies (j - N/2)/(N h) for j in [0, N).
GridSpec frequency_spec(const GridSpec& space);
GridSpec space_spec_of(const GridSpec& freq);

// Continuous-normalization transform on the grid:
//   F(xi_j) = h^n * sum_i g(x_i) exp(-2 pi i <x_i, xi_j>).
// Grid counts must be powers of two.
ComplexGrid fourier(const GridFunction& g);
ComplexGrid fourier(const ComplexGrid& g);

// Inverse Riemann sum over the frequency grid, evaluated on `space` (which
// must have the dual spacing/count of F; only its origin is free). The
// overload without `space` uses the zero-centered box.
ComplexGrid inverse_fourier(const ComplexGrid& F, const GridSpec& space);
ComplexGrid inverse_fourier(const ComplexGrid& F);
// Real part of the inverse (callers check the imaginary residue when needed).
GridFunction inverse_fourier_real(const ComplexGrid& F, const GridSpec& space,
                                  double* max_imag = nullptr);

}  // namespace aniso
