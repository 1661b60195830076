#pragma once

#include <complex>
#include <vector>

#include "aniso/cover.hpp"
#include "aniso/grid.hpp"
#include "aniso/kernels.hpp"

namespace aniso {

// Quadrature model used by every convolution in the project:
//   conv(x,t,y) = h^n * sum over grid nodes z of f(z) * Kbar_{x,t}(y - z),
// where Kbar is the cell average of the dilated kernel,
//   Kbar(u) = (1/h^n) int_{cell(0)} |det M^-1| phi(M^-1 (u - v)) dv,
// evaluated by an m-per-axis midpoint sub-quadrature with
//   m = max(1, max_axis ceil(h_axis / (du_ref * sigma_min(M)))),
// and the kernel truncated where |M^-1 arg| > r_cut. Equivalently: the
// midpoint rule at spacing h/m applied to the integral of the kernel against
// the piecewise-constant interpolant of f. The rule resolves kernels of any
// scale (deep scales reduce to the mollifier limit f(nearest node)) while
// staying a plain node sum, so convolution fields are FFT-computable at every
// scale.
int refine_factor(const GridSpec& g, const Mat& m, double du_ref);

// Cell-averaged dilated kernel at offset u (argument of the model above).
double kernel_cell_average(const TestFunction& phi, const GridSpec& g, const Mat& m,
                           const Vec& u);

// Direct evaluation of the model for one (matrix, y) pair.
double conv_direct(const GridFunction& f, const TestFunction& phi, const Mat& m,
                   const Vec& y);

struct ConvFlags {
  bool truncation_dominance = false;
};

// The spec-facing operation: f * phi_{x,t}(y) for a cover-dilated kernel.
double convolve_at(const GridFunction& f, const TestFunction& phi,
                   const AnisotropicCover& cover, const Vec& x, double t, const Vec& y,
                   ConvFlags* flags = nullptr);

// Batched provider of convolution fields for a family of inputs sharing one
// (kernel, cover) pair. "key" enumerates the distinct matrix columns: a
// single key for x-independent covers, one per first-axis node for axis0
// covers, one per node in the general case.
class ConvolutionEngine {
 public:
  ConvolutionEngine(std::vector<const GridFunction*> fs, const TestFunction& phi,
                    const AnisotropicCover& cover);

  int batch() const { return static_cast<int>(fs_.size()); }
  const GridFunction& f(int i) const { return *fs_[static_cast<size_t>(i)]; }
  const TestFunction& phi() const { return phi_; }
  const AnisotropicCover& cover() const { return cover_; }
  const GridSpec& grid() const { return grid_; }

  std::int64_t key_count() const { return keys_; }
  std::int64_t key_of(std::int64_t i0) const;
  Vec key_point(std::int64_t key) const;  // representative x for the key
  Mat matrix(std::int64_t key, double t) const;

  // Signed convolution fields over all grid nodes for (t, key), one per
  // batched f, via padded FFT. Single-threaded; safe to call from worker
  // threads on distinct keys.
  std::vector<GridFunction> build_fields(double t, std::int64_t key) const;

  double direct_value(int f_idx, const Mat& m, const Vec& y) const {
    return conv_direct(*fs_[static_cast<size_t>(f_idx)], phi_, m, y);
  }

  // ||f||_inf * int|phi|: upper bound for |conv| at any scale.
  double abs_bound(int f_idx) const { return abs_bounds_[static_cast<size_t>(f_idx)]; }
  bool truncation_flagged() const { return trunc_flag_; }

 private:
  std::vector<const GridFunction*> fs_;
  TestFunction phi_;
  AnisotropicCover cover_;
  GridSpec grid_;
  std::int64_t keys_ = 1;
  std::int64_t pad0_ = 1, pad1_ = 1;
  std::vector<std::vector<std::complex<double>>> fhat_;  // raw padded DFT per f
  std::vector<double> abs_bounds_;
  bool trunc_flag_ = false;
};

}  // namespace aniso
