#pragma once

#include <complex>
#include <vector>

#include "aniso/cover.hpp"
#include "aniso/fft.hpp"
#include "aniso/grid.hpp"
#include "aniso/kernels.hpp"

namespace aniso {

// Smooth radial cutoff: 1 on the unit ball, supported in 2B, built from the
// standard exp(-1/x) step.
double smooth_step(double u);           // 0 for u<=0, 1 for u>=1
double zeta_cutoff(double r);           // zeta(|xi|) = S(2 - r)

// phi^ at an arbitrary frequency: closed form when available, else direct
// quadrature of the defining integral on a kernel-adapted lattice.
std::complex<double> kernel_fourier(const TestFunction& phi, const Vec& xi);

// Rescale phi <- c phi(c' .) so that its integral is 1 and |phi^| >= 1/2 on
// 2 a5 B^n (verified on a lattice); c' sweeps the dyadic range [2^-6, 2^6].
// Throws when the kernel has zero mean or no sweep value satisfies the bound.
TestFunction normalize_for_reconstruction(const TestFunction& phi, double a5);

struct DecompositionPlan {
  Vec base_x;
  double base_t = 0.0;
  int k_max = 16;
  TestFunction phi;  // normalized analysis kernel
  TestFunction psi;  // kernel being decomposed
  AnisotropicCover cover;
  GridSpec space_grid;  // power-of-two counts
  int dilation_j = 0;   // J from the cover
  double a5 = 1.0;

  // A_k = M_k^T (M_{x,t}^T)^{-1} with M_k = M_{x, t + k J}
  Mat arg_transform(int k) const;
};

DecompositionPlan make_plan(const AnisotropicCover& cover, const TestFunction& phi_raw,
                            const TestFunction& psi, const Vec& base_x, double base_t,
                            int k_max, const GridSpec& space_grid);

// zeta_k on the frequency grid: zeta_0 = zeta(A_0 .),
// zeta_k = zeta(A_k .) - zeta(A_{k-1} .); partial sums telescope exactly.
std::vector<std::vector<double>> build_zeta_partition(const DecompositionPlan& plan);

struct EtaSequence {
  GridSpec freq_grid;
  std::vector<std::vector<std::complex<double>>> eta_hat;    // per k, on freq grid
  std::vector<std::vector<std::complex<double>>> phi_hat_k;  // phi^(A_k xi) per k
  std::vector<GridFunction> eta;                           // space-side inverses
  std::vector<double> seminorms;                           // grid S_{2,4} values
};

// eta^k per the frequency-side construction; the divisor magnitude is
// checked >= 1/4 wherever zeta_k is nonzero.
EtaSequence build_eta(const DecompositionPlan& plan);

struct ReconstructionReport {
  GridFunction partial;       // sum_{k<=K} eta^k * phi~^k on the space grid
  double sup_error = 0.0;     // vs psi samples
  double weighted_error = 0.0;  // grid S_{2,4} seminorm of the difference
};

ReconstructionReport reconstruct(const DecompositionPlan& plan, const EtaSequence& eta,
                                 int K);

struct DecayRow {
  int k = 0;
  double seminorm = 0.0;
  double log2_ratio = 0.0;  // log2(s_k / s_{k-1}); 0 for k = 0 or zero entries
};

struct DecayTable {
  std::vector<DecayRow> rows;
  double lsq_slope = 0.0;  // least-squares slope of log2 s_k over the window
  int fitted_points = 0;   // entries with s_k > 0 used by the fit
};

// Seminorms of the space-side eta^k under `spec` (spectral derivatives) and
// the fitted slope over k in [k_lo, k_hi]. Entries that underflow to zero are
// excluded from the fit; with fewer than two positive entries the slope is
// -infinity (the decay outran double precision).
DecayTable seminorm_decay_table(const EtaSequence& eta, const SeminormSpec& spec,
                                int k_lo, int k_hi);

}  // namespace aniso
