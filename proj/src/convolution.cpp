#include "aniso/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aniso/fft.hpp"

namespace aniso {

int refine_factor(const GridSpec& g, const Mat& m, double du_ref) {
  const double smin = m.sigma_min();
  if (smin <= 0.0) throw std::domain_error("refine_factor: singular matrix");
  int factor = 1;
  for (int a = 0; a < g.dim(); ++a) {
    const double need = g.h[static_cast<size_t>(a)] / (du_ref * smin);
    if (need > 1.0) factor = std::max(factor, static_cast<int>(std::ceil(need)));
  }
  return factor;
}

namespace {

// midpoint sub-offsets for one axis: (-1/2 + (s+1/2)/m) * h
inline double sub_offset(double h, int m, int s) {
  return h * (-0.5 + (static_cast<double>(s) + 0.5) / static_cast<double>(m));
}

double cell_average_impl(const TestFunction& phi, const Mat& minv, double det_inv,
                         const Vec& u, double h0, double h1, int n, int m, double r_cut) {
  double sum = 0.0;
  if (n == 1) {
    for (int s = 0; s < m; ++s) {
      const Vec v = minv.apply(Vec(u[0] - sub_offset(h0, m, s)));
      if (v.norm() <= r_cut) sum += phi(v);
    }
    return sum * det_inv / m;
  }
  for (int s0 = 0; s0 < m; ++s0) {
    const double a0 = u[0] - sub_offset(h0, m, s0);
    for (int s1 = 0; s1 < m; ++s1) {
      const Vec v = minv.apply(Vec(a0, u[1] - sub_offset(h1, m, s1)));
      if (v.norm() <= r_cut) sum += phi(v);
    }
  }
  return sum * det_inv / (m * m);
}

}  // namespace

double kernel_cell_average(const TestFunction& phi, const GridSpec& g, const Mat& m,
                           const Vec& u) {
  const Mat minv = m.inverse();
  const double det_inv = 1.0 / std::abs(m.det());
  const int mf = refine_factor(g, m, phi.quad_refine());
  return cell_average_impl(phi, minv, det_inv, u, g.h[0], g.h[1], g.dim(), mf,
                           phi.default_r_cut());
}

double conv_direct(const GridFunction& f, const TestFunction& phi, const Mat& m,
                   const Vec& y) {
  const GridSpec& g = f.g;
  const int n = g.dim();
  const Mat minv = m.inverse();
  const double det_inv = 1.0 / std::abs(m.det());
  const double r_cut = phi.default_r_cut();
  const int mf = refine_factor(g, m, phi.quad_refine());

  // nodes whose cells can meet the kernel support bbox
  std::int64_t klo[2] = {0, 0}, khi[2] = {0, 0};
  for (int a = 0; a < n; ++a) {
    const size_t ai = static_cast<size_t>(a);
    const double ext = r_cut * m.bbox_half_extent(a) + 0.5 * g.h[ai];
    const double lo = g.box.lo[ai];
    klo[a] = std::max<std::int64_t>(
        0, static_cast<std::int64_t>(std::ceil((y[a] - ext - lo) / g.h[ai] - 1e-12)));
    khi[a] = std::min<std::int64_t>(
        g.count[ai] - 1,
        static_cast<std::int64_t>(std::floor((y[a] + ext - lo) / g.h[ai] + 1e-12)));
  }
  if (n == 1) khi[1] = klo[1] = 0;

  double sum = 0.0;
  for (std::int64_t k0 = klo[0]; k0 <= khi[0]; ++k0) {
    for (std::int64_t k1 = klo[1]; k1 <= khi[1]; ++k1) {
      const double fz = f.at(k0, k1);
      if (fz == 0.0) continue;
      Vec u;
      u.n = n;
      u.c[0] = y[0] - (g.box.lo[0] + static_cast<double>(k0) * g.h[0]);
      if (n == 2) u.c[1] = y[1] - (g.box.lo[1] + static_cast<double>(k1) * g.h[1]);
      sum += fz * cell_average_impl(phi, minv, det_inv, u, g.h[0], g.h[1], n, mf, r_cut);
    }
  }
  return sum * g.cell_volume();
}

double convolve_at(const GridFunction& f, const TestFunction& phi,
                   const AnisotropicCover& cover, const Vec& x, double t, const Vec& y,
                   ConvFlags* flags) {
  const Mat m = cover.matrix(x, t);
  if (flags && phi.tail_mass_bound(phi.default_r_cut()) > 1e-8 && f.sup_norm() > 0.0)
    flags->truncation_dominance = true;
  return conv_direct(f, phi, m, y);
}

// ---------------------------------------------------------------------------
// ConvolutionEngine

ConvolutionEngine::ConvolutionEngine(std::vector<const GridFunction*> fs,
                                     const TestFunction& phi,
                                     const AnisotropicCover& cover)
    : fs_(std::move(fs)), phi_(phi), cover_(cover) {
  if (fs_.empty()) throw std::invalid_argument("ConvolutionEngine: empty batch");
  grid_ = fs_[0]->g;
  for (const auto* f : fs_)
    if (!f->g.same_layout(grid_))
      throw std::invalid_argument("ConvolutionEngine: batched inputs must share one grid");
  if (grid_.dim() != cover_.dim())
    throw std::invalid_argument("ConvolutionEngine: grid/cover dimension mismatch");

  switch (cover_.x_dependence()) {
    case XDependence::none:
      keys_ = 1;
      break;
    case XDependence::axis0:
      keys_ = grid_.count[0];
      break;
    case XDependence::general:
      keys_ = grid_.size();
      break;
  }

  pad0_ = next_pow2(2 * grid_.count[0]);
  pad1_ = grid_.dim() == 2 ? next_pow2(2 * grid_.count[1]) : 1;

  // padded raw DFT of each batched f
  fhat_.resize(fs_.size());
  for (size_t i = 0; i < fs_.size(); ++i) {
    auto& buf = fhat_[i];
    buf.assign(static_cast<size_t>(pad0_ * pad1_), 0.0);
    const GridFunction& f = *fs_[i];
    for (std::int64_t i0 = 0; i0 < grid_.count[0]; ++i0)
      for (std::int64_t i1 = 0; i1 < grid_.count[1]; ++i1)
        buf[static_cast<size_t>(i0 * pad1_ + i1)] = f.at(i0, i1);
    fft2_pow2(buf, pad0_, pad1_, false);
  }

  abs_bounds_.resize(fs_.size());
  const double am = phi_.abs_mass();
  for (size_t i = 0; i < fs_.size(); ++i) abs_bounds_[i] = fs_[i]->sup_norm() * am;

  trunc_flag_ = phi_.tail_mass_bound(phi_.default_r_cut()) > 1e-8;
}

std::int64_t ConvolutionEngine::key_of(std::int64_t i0) const {
  switch (cover_.x_dependence()) {
    case XDependence::none:
      return 0;
    case XDependence::axis0:
      return i0;
    default:
      throw std::logic_error("key_of: general covers key by flat index");
  }
}

Vec ConvolutionEngine::key_point(std::int64_t key) const {
  switch (cover_.x_dependence()) {
    case XDependence::none:
      return grid_.point(0, 0);
    case XDependence::axis0:
      return grid_.point(key, 0);
    default:
      return grid_.point_at(key);
  }
}

Mat ConvolutionEngine::matrix(std::int64_t key, double t) const {
  return cover_.matrix(key_point(key), t);
}

std::vector<GridFunction> ConvolutionEngine::build_fields(double t,
                                                          std::int64_t key) const {
  const Mat m = matrix(key, t);
  const int n = grid_.dim();
  const Mat minv = m.inverse();
  const double det_inv = 1.0 / std::abs(m.det());
  const double r_cut = phi_.default_r_cut();
  const int mf = refine_factor(grid_, m, phi_.quad_refine());

  // cell-averaged kernel samples on wrapped offsets:
  // index d -> offset (d < P/2 ? d : d - P) * h
  std::vector<std::complex<double>> khat(static_cast<size_t>(pad0_ * pad1_), 0.0);
  const bool diag = n == 1 || (m(0, 1) == 0.0 && m(1, 0) == 0.0);
  if (n == 2 && diag && phi_.axis_separable()) {
    // phi(v) = q(v0) e^{-B v0^2} * e^{-B v1^2}: the cell average factorizes
    // into per-axis averaged factors; square truncation |v_a| <= r_cut (the
    // corner samples it admits are below 1e-50 for the default r_cut)
    const double b = phi_.gauss_exponent();
    std::vector<double> f0(static_cast<size_t>(pad0_), 0.0),
        f1(static_cast<size_t>(pad1_), 0.0);
    for (std::int64_t d = 0; d < pad0_; ++d) {
      const double off = static_cast<double>(d < pad0_ / 2 ? d : d - pad0_) * grid_.h[0];
      double acc = 0.0;
      for (int s = 0; s < mf; ++s) {
        const double v = (off - sub_offset(grid_.h[0], mf, s)) / m(0, 0);
        if (std::abs(v) <= r_cut) acc += phi_(Vec(v, 0.0));
      }
      f0[static_cast<size_t>(d)] = acc / mf;
    }
    for (std::int64_t d = 0; d < pad1_; ++d) {
      const double off = static_cast<double>(d < pad1_ / 2 ? d : d - pad1_) * grid_.h[1];
      double acc = 0.0;
      for (int s = 0; s < mf; ++s) {
        const double v = (off - sub_offset(grid_.h[1], mf, s)) / m(1, 1);
        if (std::abs(v) <= r_cut) acc += std::exp(-b * v * v);
      }
      f1[static_cast<size_t>(d)] = acc / mf;
    }
    for (std::int64_t d0 = 0; d0 < pad0_; ++d0) {
      const double a = f0[static_cast<size_t>(d0)];
      if (a == 0.0) continue;
      for (std::int64_t d1 = 0; d1 < pad1_; ++d1)
        khat[static_cast<size_t>(d0 * pad1_ + d1)] = a * f1[static_cast<size_t>(d1)];
    }
  } else {
    // general sampling restricted to the support bbox (plus one cell)
    std::int64_t lim0 = pad0_ / 2, lim1 = n == 2 ? pad1_ / 2 : 0;
    const double ext0 = r_cut * m.bbox_half_extent(0) + 0.5 * grid_.h[0];
    lim0 = std::min<std::int64_t>(
        lim0, static_cast<std::int64_t>(std::ceil(ext0 / grid_.h[0])) + 1);
    if (n == 2) {
      const double ext1 = r_cut * m.bbox_half_extent(1) + 0.5 * grid_.h[1];
      lim1 = std::min<std::int64_t>(
          lim1, static_cast<std::int64_t>(std::ceil(ext1 / grid_.h[1])) + 1);
    }
    for (std::int64_t o0 = -lim0; o0 <= lim0; ++o0) {
      if (o0 == pad0_ / 2) continue;  // avoid double-writing the wrap index
      for (std::int64_t o1 = -lim1; o1 <= lim1; ++o1) {
        if (n == 2 && o1 == pad1_ / 2) continue;
        Vec u;
        u.n = n;
        u.c[0] = static_cast<double>(o0) * grid_.h[0];
        if (n == 2) u.c[1] = static_cast<double>(o1) * grid_.h[1];
        const double v =
            cell_average_impl(phi_, minv, 1.0, u, grid_.h[0], grid_.h[1], n, mf, r_cut);
        if (v != 0.0) {
          const std::int64_t d0 = (o0 + pad0_) % pad0_;
          const std::int64_t d1 = n == 2 ? (o1 + pad1_) % pad1_ : 0;
          khat[static_cast<size_t>(d0 * pad1_ + d1)] = v;
        }
      }
    }
  }
  fft2_pow2(khat, pad0_, pad1_, false);

  const double cellw = grid_.cell_volume() * det_inv / static_cast<double>(pad0_ * pad1_);
  std::vector<GridFunction> out;
  out.reserve(fs_.size());
  std::vector<std::complex<double>> work(khat.size());
  for (size_t fi = 0; fi < fs_.size(); ++fi) {
    for (size_t i = 0; i < khat.size(); ++i) work[i] = fhat_[fi][i] * khat[i];
    fft2_pow2(work, pad0_, pad1_, true);
    GridFunction g(grid_);
    for (std::int64_t i0 = 0; i0 < grid_.count[0]; ++i0)
      for (std::int64_t i1 = 0; i1 < grid_.count[1]; ++i1)
        g.at(i0, i1) = work[static_cast<size_t>(i0 * pad1_ + i1)].real() * cellw;
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace aniso
