#pragma once

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aniso/geometry.hpp"
#include "aniso/grid.hpp"

namespace aniso {

using MultiIndex = std::array<int, 2>;  // derivative orders per axis; [k, 0] in 1-D

inline int order_of(const MultiIndex& a) { return a[0] + a[1]; }

// Dense polynomial in one or two variables.
class MultiPoly {
 public:
  MultiPoly() = default;
  MultiPoly(int dim, int deg0, int deg1);
  static MultiPoly constant(int dim, double value);
  static MultiPoly monomial(int dim, int p0, int p1, double coeff);

  int dim() const { return dim_; }
  double coeff(int p0, int p1) const;
  void add_coeff(int p0, int p1, double c);
  double eval(const Vec& y) const;

  MultiPoly deriv(int axis) const;
  MultiPoly mul(const MultiPoly& o) const;
  MultiPoly add(const MultiPoly& o, double scale = 1.0) const;
  MultiPoly times_monomial(int p0, int p1, double c) const;
  MultiPoly scaled_arg(double s) const;  // y -> s*y
  MultiPoly scaled(double c) const;
  double abs_coeff_sum() const;
  int total_degree() const;

 private:
  int dim_ = 1;
  int d0_ = 0, d1_ = 0;
  std::vector<double> c_;  // c[p0*(d1+1)+p1]
};

struct SeminormSpec {
  int N = 0;
  int Ntilde = 0;
  SeminormSpec() = default;
  SeminormSpec(int n, int ntilde);
};

// Analytic Schwartz-class kernel with closed-form derivatives.
// Families: polynomial * exp(-B|y|^2) (covers the plain Gaussian), and the
// compactly supported bump A*exp(-1/(1-|y/w|^2)).
class TestFunction {
 public:
  enum class Family { poly_gauss, bump };

  TestFunction();  // the standard Gaussian e^{-|y|^2} in 1-D

  static TestFunction gaussian(int dim, double amplitude = 1.0, double exponent = 1.0);
  // (sum_k coeffs[k] * y_0^k) * exp(-B |y|^2), polynomial in the first axis
  static TestFunction hermite_gaussian(int dim, const std::vector<double>& coeffs,
                                       double exponent = 1.0);
  static TestFunction bump(int dim, double amplitude = 1.0, double width = 1.0);

  Family family() const { return family_; }
  int dim() const { return dim_; }
  int max_order() const { return max_order_; }
  const std::string& label() const { return label_; }
  // exponent B of the Gaussian factor (poly_gauss family only)
  double gauss_exponent() const { return gauss_b_; }
  // true when phi(y) = q(y0) * exp(-B|y|^2): separable across axes
  bool axis_separable() const {
    return family_ == Family::poly_gauss;
  }

  double operator()(const Vec& y) const { return derivative(y, {0, 0}); }
  // Closed-form partial derivative; throws if order exceeds max_order().
  double derivative(const Vec& y, const MultiIndex& alpha) const;

  double mass() const { return mass_; }          // integral over R^n
  double abs_mass() const { return abs_mass_; }  // integral of |phi|

  // Closed-form Fourier transform with convention
  // phi^(xi) = int phi(y) e^{-2 pi i <y,xi>} dy. Only pure Gaussians have one.
  std::optional<double> fourier_closed(const Vec& xi) const;

  TestFunction scaled(double c) const;       // c * phi
  TestFunction scaled_arg(double cp) const;  // phi(cp * y)

  // Truncation radius in kernel-argument units beyond which values are
  // treated as zero by quadratures.
  double default_r_cut() const;
  // Quadrature sub-spacing, in kernel-argument units, that keeps the
  // equispaced-trapezoid error of smooth integrals below ~1e-8 relative.
  double quad_refine() const;
  // Bound on the integral of |phi| outside radius R (argument units).
  double tail_mass_bound(double r) const;

 private:
  void precompute(int max_order);
  double poly_gauss_mass() const;
  double bump_mass() const;

  Family family_ = Family::poly_gauss;
  int dim_ = 1;
  int max_order_ = 8;
  std::string label_ = "gaussian";

  // poly_gauss: q(y) exp(-B|y|^2)
  MultiPoly q_;
  double gauss_b_ = 1.0;
  // bump: A exp(-1/(1-|y/w|^2)) on |y| < w
  double bump_a_ = 1.0;
  double bump_w_ = 1.0;

  double mass_ = 0.0;
  double abs_mass_ = 0.0;
  // derivative tables indexed by alpha
  std::map<MultiIndex, MultiPoly> deriv_polys_;
};

// |det(M^-1)| * phi(M^-1 y): the anisotropic dilation evaluated at y.
double dilate_value(const TestFunction& phi, const Mat& m, const Vec& y);

struct SeminormResult {
  double value = 0.0;
  Vec argmax;
  MultiIndex alpha{0, 0};
  bool boundary_dominance = false;  // boundary weighted value > 1e-6 * max
};

// max_{|alpha| <= N} sup_y (1+|y|)^Ntilde |d^alpha phi(y)|, approximated by a
// lattice scan over search_box (resolution nodes per axis, endpoints included)
// plus one golden-section refinement pass per axis at the maximizer.
SeminormResult seminorm_detailed(const TestFunction& phi, const SeminormSpec& spec,
                                 const Box& search_box, int resolution);
double seminorm(const TestFunction& phi, const SeminormSpec& spec,
                const Box& search_box, int resolution);
// Convenience: default search box [-16,16]^n at 2048 (1-D) / 256 (2-D) nodes.
double seminorm(const TestFunction& phi, const SeminormSpec& spec);

// Grid-function variant used by the decomposition: spectral derivatives of a
// sampled function, sup of the weighted values over the grid nodes.
double grid_seminorm(const GridFunction& f, const SeminormSpec& spec);

}  // namespace aniso
