#include "aniso/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aniso/fft.hpp"

namespace aniso {

// ---------------------------------------------------------------------------
// MultiPoly

MultiPoly::MultiPoly(int dim, int deg0, int deg1)
    : dim_(dim), d0_(deg0), d1_(dim == 2 ? deg1 : 0),
      c_(static_cast<size_t>((deg0 + 1) * ((dim == 2 ? deg1 : 0) + 1)), 0.0) {}

MultiPoly MultiPoly::constant(int dim, double value) {
  MultiPoly p(dim, 0, 0);
  p.c_[0] = value;
  return p;
}

MultiPoly MultiPoly::monomial(int dim, int p0, int p1, double coeff) {
  MultiPoly p(dim, p0, dim == 2 ? p1 : 0);
  p.add_coeff(p0, p1, coeff);
  return p;
}

double MultiPoly::coeff(int p0, int p1) const {
  if (p0 < 0 || p0 > d0_ || p1 < 0 || p1 > d1_) return 0.0;
  return c_[static_cast<size_t>(p0 * (d1_ + 1) + p1)];
}

void MultiPoly::add_coeff(int p0, int p1, double c) {
  c_[static_cast<size_t>(p0 * (d1_ + 1) + p1)] += c;
}

double MultiPoly::eval(const Vec& y) const {
  // Horner along axis 0; inner Horner along axis 1.
  double r = 0.0;
  for (int p0 = d0_; p0 >= 0; --p0) {
    double inner = 0.0;
    for (int p1 = d1_; p1 >= 0; --p1) inner = inner * y[1] + coeff(p0, p1);
    r = r * y[0] + inner;
  }
  return r;
}

MultiPoly MultiPoly::deriv(int axis) const {
  const int n0 = axis == 0 ? std::max(0, d0_ - 1) : d0_;
  const int n1 = axis == 1 ? std::max(0, d1_ - 1) : d1_;
  MultiPoly r(dim_, n0, n1);
  for (int p0 = 0; p0 <= d0_; ++p0)
    for (int p1 = 0; p1 <= d1_; ++p1) {
      const double c = coeff(p0, p1);
      if (c == 0.0) continue;
      if (axis == 0 && p0 > 0) r.add_coeff(p0 - 1, p1, c * p0);
      if (axis == 1 && p1 > 0) r.add_coeff(p0, p1 - 1, c * p1);
    }
  return r;
}

MultiPoly MultiPoly::mul(const MultiPoly& o) const {
  MultiPoly r(dim_, d0_ + o.d0_, d1_ + o.d1_);
  for (int p0 = 0; p0 <= d0_; ++p0)
    for (int p1 = 0; p1 <= d1_; ++p1) {
      const double c = coeff(p0, p1);
      if (c == 0.0) continue;
      for (int q0 = 0; q0 <= o.d0_; ++q0)
        for (int q1 = 0; q1 <= o.d1_; ++q1) {
          const double d = o.coeff(q0, q1);
          if (d != 0.0) r.add_coeff(p0 + q0, p1 + q1, c * d);
        }
    }
  return r;
}

MultiPoly MultiPoly::add(const MultiPoly& o, double scale) const {
  MultiPoly r(dim_, std::max(d0_, o.d0_), std::max(d1_, o.d1_));
  for (int p0 = 0; p0 <= r.d0_; ++p0)
    for (int p1 = 0; p1 <= r.d1_; ++p1)
      r.add_coeff(p0, p1, coeff(p0, p1) + scale * o.coeff(p0, p1));
  return r;
}

MultiPoly MultiPoly::times_monomial(int p0, int p1, double c) const {
  MultiPoly r(dim_, d0_ + p0, d1_ + p1);
  for (int q0 = 0; q0 <= d0_; ++q0)
    for (int q1 = 0; q1 <= d1_; ++q1) {
      const double d = coeff(q0, q1);
      if (d != 0.0) r.add_coeff(q0 + p0, q1 + p1, c * d);
    }
  return r;
}

MultiPoly MultiPoly::scaled_arg(double s) const {
  MultiPoly r = *this;
  for (int p0 = 0; p0 <= d0_; ++p0)
    for (int p1 = 0; p1 <= d1_; ++p1) {
      double& c = r.c_[static_cast<size_t>(p0 * (d1_ + 1) + p1)];
      c *= std::pow(s, p0 + p1);
    }
  return r;
}

MultiPoly MultiPoly::scaled(double c) const {
  MultiPoly r = *this;
  for (auto& x : r.c_) x *= c;
  return r;
}

double MultiPoly::abs_coeff_sum() const {
  double s = 0.0;
  for (double x : c_) s += std::abs(x);
  return s;
}

int MultiPoly::total_degree() const {
  int d = 0;
  for (int p0 = 0; p0 <= d0_; ++p0)
    for (int p1 = 0; p1 <= d1_; ++p1)
      if (coeff(p0, p1) != 0.0) d = std::max(d, p0 + p1);
  return d;
}

// ---------------------------------------------------------------------------
// TestFunction

SeminormSpec::SeminormSpec(int n, int ntilde) : N(n), Ntilde(ntilde) {
  if (n < 0 || ntilde < n)
    throw std::invalid_argument("SeminormSpec requires 0 <= N <= Ntilde");
}

TestFunction::TestFunction() {
  q_ = MultiPoly::constant(1, 1.0);
  precompute(8);
}

TestFunction TestFunction::gaussian(int dim, double amplitude, double exponent) {
  if (dim < 1 || dim > 2) throw std::invalid_argument("kernel dimension must be 1 or 2");
  if (exponent <= 0.0) throw std::invalid_argument("gaussian exponent must be positive");
  TestFunction f;
  f.family_ = Family::poly_gauss;
  f.dim_ = dim;
  f.q_ = MultiPoly::constant(dim, amplitude);
  f.gauss_b_ = exponent;
  f.label_ = "gaussian";
  f.precompute(8);
  return f;
}

TestFunction TestFunction::hermite_gaussian(int dim, const std::vector<double>& coeffs,
                                            double exponent) {
  if (dim < 1 || dim > 2) throw std::invalid_argument("kernel dimension must be 1 or 2");
  if (coeffs.empty()) throw std::invalid_argument("hermite_gaussian needs coefficients");
  TestFunction f;
  f.family_ = Family::poly_gauss;
  f.dim_ = dim;
  f.q_ = MultiPoly(dim, static_cast<int>(coeffs.size()) - 1, 0);
  for (size_t k = 0; k < coeffs.size(); ++k) f.q_.add_coeff(static_cast<int>(k), 0, coeffs[k]);
  f.gauss_b_ = exponent;
  f.label_ = "hermite_gaussian";
  f.precompute(8);
  return f;
}

TestFunction TestFunction::bump(int dim, double amplitude, double width) {
  if (dim < 1 || dim > 2) throw std::invalid_argument("kernel dimension must be 1 or 2");
  if (width <= 0.0) throw std::invalid_argument("bump width must be positive");
  TestFunction f;
  f.family_ = Family::bump;
  f.dim_ = dim;
  f.bump_a_ = amplitude;
  f.bump_w_ = width;
  f.label_ = "bump";
  f.precompute(6);  // closed-form recursion kept to order 6
  return f;
}

void TestFunction::precompute(int max_order) {
  max_order_ = max_order;
  deriv_polys_.clear();
  if (family_ == Family::poly_gauss) {
    // d_i (q e^{-B u}) = (d_i q - 2 B y_i q) e^{-B u}
    deriv_polys_[{0, 0}] = q_;
    for (int total = 1; total <= max_order_; ++total) {
      for (int a0 = total; a0 >= 0; --a0) {
        const int a1 = total - a0;
        if (dim_ == 1 && a1 > 0) continue;
        const int axis = a0 > 0 ? 0 : 1;
        MultiIndex prev{a0, a1};
        prev[static_cast<size_t>(axis)] -= 1;
        const MultiPoly& p = deriv_polys_.at(prev);
        MultiPoly next = p.deriv(axis).add(
            p.times_monomial(axis == 0 ? 1 : 0, axis == 1 ? 1 : 0, -2.0 * gauss_b_));
        deriv_polys_[{a0, a1}] = next;
      }
    }
  } else {
    // d^alpha phi = P_alpha(v) (1-u)^{-2|alpha|} phi(v), u = |v|^2, v = y/w
    MultiPoly one_minus_u = MultiPoly::constant(dim_, 1.0);
    one_minus_u = one_minus_u.add(MultiPoly::monomial(dim_, 2, 0, 1.0), -1.0);
    if (dim_ == 2) one_minus_u = one_minus_u.add(MultiPoly::monomial(dim_, 0, 2, 1.0), -1.0);
    const MultiPoly omu_sq = one_minus_u.mul(one_minus_u);
    deriv_polys_[{0, 0}] = MultiPoly::constant(dim_, 1.0);
    for (int total = 1; total <= max_order_; ++total) {
      for (int a0 = total; a0 >= 0; --a0) {
        const int a1 = total - a0;
        if (dim_ == 1 && a1 > 0) continue;
        const int axis = a0 > 0 ? 0 : 1;
        MultiIndex prev{a0, a1};
        prev[static_cast<size_t>(axis)] -= 1;
        const int k = total - 1;
        const MultiPoly& p = deriv_polys_.at(prev);
        const int m0 = axis == 0 ? 1 : 0;
        const int m1 = axis == 1 ? 1 : 0;
        MultiPoly next = p.deriv(axis).mul(omu_sq);
        next = next.add(p.times_monomial(m0, m1, 4.0 * k).mul(one_minus_u));
        next = next.add(p.times_monomial(m0, m1, -2.0));
        deriv_polys_[{a0, a1}] = next;
      }
    }
  }
  mass_ = family_ == Family::poly_gauss ? poly_gauss_mass() : bump_mass();
  if (family_ == Family::bump) {
    abs_mass_ = std::abs(mass_);
  } else {
    // q is univariate in the first axis for all factory kernels, so the
    // |.|-integral factorizes into 1-D quadratures.
    const double reach = (12.0 + q_.total_degree()) / std::sqrt(gauss_b_);
    const int m = 200000;
    const double dv = 2.0 * reach / m;
    double i0 = 0.0;
    for (int i = 0; i < m; ++i) {
      const double v = -reach + (i + 0.5) * dv;
      Vec y;
      y.n = 1;
      y.c[0] = v;
      i0 += std::abs(q_.eval(y)) * std::exp(-gauss_b_ * v * v);
    }
    i0 *= dv;
    abs_mass_ = dim_ == 1 ? i0 : i0 * std::sqrt(kPi / gauss_b_);
  }
}

double TestFunction::derivative(const Vec& y, const MultiIndex& alpha) const {
  if (alpha[0] < 0 || alpha[1] < 0 || order_of(alpha) > max_order_ ||
      (dim_ == 1 && alpha[1] > 0))
    throw std::invalid_argument("derivative order exceeds the supported maximum");
  if (family_ == Family::poly_gauss) {
    const double u = y.norm_sq();
    return deriv_polys_.at(alpha).eval(y) * std::exp(-gauss_b_ * u);
  }
  Vec v = y * (1.0 / bump_w_);
  const double u = v.norm_sq();
  if (u >= 1.0) return 0.0;
  const double omu = 1.0 - u;
  const int k = order_of(alpha);
  const double chain = std::pow(bump_w_, -k);
  return bump_a_ * chain * deriv_polys_.at(alpha).eval(v) * std::pow(omu, -2 * k) *
         std::exp(-1.0 / omu);
}

double TestFunction::poly_gauss_mass() const {
  // int y^k e^{-B y^2} dy: zero for odd k; I(0)=sqrt(pi/B), I(2m)=I(2m-2)(2m-1)/(2B)
  auto moment = [&](int k) -> double {
    if (k % 2 == 1) return 0.0;
    double v = std::sqrt(kPi / gauss_b_);
    for (int m = 1; 2 * m <= k; ++m) v *= (2.0 * m - 1.0) / (2.0 * gauss_b_);
    return v;
  };
  double s = 0.0;
  const int dmax = q_.total_degree();
  for (int p0 = 0; p0 <= dmax; ++p0)
    for (int p1 = 0; p1 <= (dim_ == 2 ? dmax : 0); ++p1) {
      const double c = q_.coeff(p0, p1);
      if (c == 0.0) continue;
      s += c * moment(p0) * (dim_ == 2 ? moment(p1) : 1.0);
    }
  return s;
}

double TestFunction::bump_mass() const {
  // 1-D: w int_{-1}^{1} e^{-1/(1-v^2)} dv; 2-D: 2 pi w^2 int_0^1 s e^{-1/(1-s^2)} ds
  const int m = 200000;
  double s = 0.0;
  if (dim_ == 1) {
    const double dv = 2.0 / m;
    for (int i = 0; i < m; ++i) {
      const double v = -1.0 + (i + 0.5) * dv;
      s += std::exp(-1.0 / (1.0 - v * v));
    }
    return bump_a_ * bump_w_ * s * dv;
  }
  const double dv = 1.0 / m;
  for (int i = 0; i < m; ++i) {
    const double r = (i + 0.5) * dv;
    s += r * std::exp(-1.0 / (1.0 - r * r));
  }
  return bump_a_ * 2.0 * kPi * bump_w_ * bump_w_ * s * dv;
}

std::optional<double> TestFunction::fourier_closed(const Vec& xi) const {
  if (family_ != Family::poly_gauss || q_.total_degree() != 0) return std::nullopt;
  const double a = q_.coeff(0, 0);
  const double scale = std::pow(kPi / gauss_b_, 0.5 * dim_);
  return a * scale * std::exp(-kPi * kPi * xi.norm_sq() / gauss_b_);
}

TestFunction TestFunction::scaled(double c) const {
  TestFunction f = *this;
  if (family_ == Family::poly_gauss) {
    f.q_ = q_.scaled(c);
  } else {
    f.bump_a_ *= c;
  }
  f.precompute(f.max_order_);
  return f;
}

TestFunction TestFunction::scaled_arg(double cp) const {
  if (cp <= 0.0) throw std::invalid_argument("scaled_arg: factor must be positive");
  TestFunction f = *this;
  if (family_ == Family::poly_gauss) {
    f.q_ = q_.scaled_arg(cp);
    f.gauss_b_ = gauss_b_ * cp * cp;
  } else {
    f.bump_w_ = bump_w_ / cp;
  }
  f.precompute(f.max_order_);
  return f;
}

double TestFunction::default_r_cut() const {
  return family_ == Family::bump ? bump_w_ : 12.0;
}

double TestFunction::quad_refine() const {
  // equispaced-rule spacings holding the relative error near 1e-9: the bump
  // is Gevrey-regular at its support edge and needs a much finer rule
  if (family_ == Family::bump) return 0.02 * bump_w_;
  const double base = q_.total_degree() == 0 ? 0.75 : 0.6;
  return base / std::sqrt(gauss_b_);
}

double TestFunction::tail_mass_bound(double r) const {
  if (family_ == Family::bump) return r >= bump_w_ ? 0.0 : mass_;
  // |q(y)| <= S (1+|y|)^d with S the abs coefficient sum; beyond R the
  // polynomial is absorbed into half the exponent once B R^2/2 dominates.
  const double s = q_.abs_coeff_sum();
  const int d = q_.total_degree();
  const double surface = dim_ == 1 ? 2.0 : 2.0 * kPi * std::max(r, 1.0);
  const double growth = std::pow(1.0 + r, d);
  const double tail = std::exp(-0.5 * gauss_b_ * r * r) / std::max(gauss_b_ * r, 1e-6);
  return s * surface * growth * tail;
}

double dilate_value(const TestFunction& phi, const Mat& m, const Vec& y) {
  const double d = m.det();
  if (d == 0.0) throw std::domain_error("dilate: singular matrix");
  return phi(m.inverse().apply(y)) / std::abs(d);
}

// ---------------------------------------------------------------------------
// Seminorms

namespace {

double weighted_value(const TestFunction& phi, const MultiIndex& alpha, int ntilde,
                      const Vec& y) {
  const double w = std::pow(1.0 + y.norm(), ntilde);
  return w * std::abs(phi.derivative(y, alpha));
}

// One golden-section pass along `axis` around y0 with bracket half-width hw.
Vec golden_refine(const TestFunction& phi, const MultiIndex& alpha, int ntilde, Vec y0,
                  int axis, double hw) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = y0[axis] - hw, b = y0[axis] + hw;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  auto val = [&](double t) {
    Vec y = y0;
    y[axis] = t;
    return weighted_value(phi, alpha, ntilde, y);
  };
  double fc = val(c), fd = val(d);
  for (int it = 0; it < 60; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = val(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = val(d);
    }
  }
  const double best = fc > fd ? c : d;
  Vec y = y0;
  y[axis] = val(best) > weighted_value(phi, alpha, ntilde, y0) ? best : y0[axis];
  return y;
}

}  // namespace

SeminormResult seminorm_detailed(const TestFunction& phi, const SeminormSpec& spec,
                                 const Box& search_box, int resolution) {
  if (spec.N > phi.max_order())
    throw std::invalid_argument("seminorm: derivative order exceeds kernel maximum");
  SeminormResult res;
  double boundary_max = 0.0;
  const int n = phi.dim();
  const int r = std::max(resolution, 8);

  std::vector<MultiIndex> alphas;
  for (int a0 = 0; a0 <= spec.N; ++a0)
    for (int a1 = 0; a1 <= (n == 2 ? spec.N - a0 : 0); ++a1) alphas.push_back({a0, a1});

  for (const auto& alpha : alphas) {
    Vec best;
    best.n = n;
    double best_v = -1.0;
    const std::int64_t r1 = n == 2 ? r : 0;
    for (std::int64_t i0 = 0; i0 <= r; ++i0) {
      for (std::int64_t i1 = 0; i1 <= r1; ++i1) {
        Vec y;
        y.n = n;
        y.c[0] = search_box.lo[0] + search_box.width(0) * static_cast<double>(i0) / r;
        if (n == 2) y.c[1] = search_box.lo[1] + search_box.width(1) * static_cast<double>(i1) / r;
        const double v = weighted_value(phi, alpha, spec.Ntilde, y);
        const bool on_boundary = i0 == 0 || i0 == r || (n == 2 && (i1 == 0 || i1 == r1));
        if (on_boundary) boundary_max = std::max(boundary_max, v);
        if (v > best_v) {
          best_v = v;
          best = y;
        }
      }
    }
    // local refinement, one pass per axis
    for (int axis = 0; axis < n; ++axis) {
      const double hw = search_box.width(axis) / r;
      best = golden_refine(phi, alpha, spec.Ntilde, best, axis, hw);
    }
    best_v = weighted_value(phi, alpha, spec.Ntilde, best);
    if (best_v > res.value) {
      res.value = best_v;
      res.argmax = best;
      res.alpha = alpha;
    }
  }
  res.boundary_dominance = boundary_max > 1e-6 * res.value;
  return res;
}

double seminorm(const TestFunction& phi, const SeminormSpec& spec, const Box& search_box,
                int resolution) {
  return seminorm_detailed(phi, spec, search_box, resolution).value;
}

double seminorm(const TestFunction& phi, const SeminormSpec& spec) {
  const Box box = phi.dim() == 1 ? Box::interval(-16.0, 16.0) : Box::square(-16.0, 16.0);
  return seminorm(phi, spec, box, phi.dim() == 1 ? 2048 : 256);
}

double grid_seminorm(const GridFunction& f, const SeminormSpec& spec) {
  const int n = f.g.dim();
  const ComplexGrid fhat = fourier(f);
  const GridSpec freq = fhat.g;
  double best = 0.0;
  for (int a0 = 0; a0 <= spec.N; ++a0) {
    for (int a1 = 0; a1 <= (n == 2 ? spec.N - a0 : 0); ++a1) {
      ComplexGrid d = fhat;
      for (std::int64_t i = 0; i < freq.size(); ++i) {
        const Vec xi = freq.point_at(i);
        std::complex<double> factor = 1.0;
        for (int k = 0; k < a0; ++k) factor *= std::complex<double>(0.0, 2.0 * kPi * xi[0]);
        for (int k = 0; k < a1; ++k) factor *= std::complex<double>(0.0, 2.0 * kPi * xi[1]);
        d.v[static_cast<size_t>(i)] *= factor;
      }
      const GridFunction da = inverse_fourier_real(d, f.g);
      for (std::int64_t i = 0; i < f.g.size(); ++i) {
        const Vec y = f.g.point_at(i);
        const double v =
            std::pow(1.0 + y.norm(), spec.Ntilde) * std::abs(da.v[static_cast<size_t>(i)]);
        best = std::max(best, v);
      }
    }
  }
  return best;
}

}  // namespace aniso
