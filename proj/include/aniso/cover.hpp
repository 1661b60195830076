#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aniso/geometry.hpp"
#include "aniso/grid.hpp"

namespace aniso {

// The cover constants a1..a6 and the dilation step J.
struct CoverParams {
  double a1 = 0.0, a2 = 0.0;  // volume factors
  double a3 = 0.0, a4 = 0.0;  // lower shape factor / exponent
  double a5 = 0.0, a6 = 0.0;  // upper shape factor / exponent
  int J = 0;

  void validate() const;  // a1<=a2, a3 in (0,1], a5>=1, 0<a6<=a4, J>=1
};

struct Ellipsoid {
  Vec center;
  Mat matrix;

  // strict membership: |M^-1 (y - c)| < 1 (the ellipsoid is open)
  bool contains(const Vec& y) const {
    return matrix.inverse().apply(y - center).norm() < 1.0;
  }
  double volume() const {
    return std::abs(matrix.det()) * unit_ball_volume(matrix.n);
  }
};

// How the matrix field depends on x; lets engines share convolution fields.
enum class XDependence { none, axis0, general };

// Descriptor of the exponent field b(x) for the variable-diagonal family.
struct BField {
  enum class Kind { sine, jump } kind = Kind::sine;
  double offset = 0.5, amplitude = 0.25, frequency = 1.0;  // sine: offset + amplitude*sin(frequency*x1)
  double base = 0.5, jump = 0.1;                           // jump: base + jump*[x1 >= 0]
  double operator()(double x1) const {
    if (kind == Kind::sine) return offset + amplitude * std::sin(frequency * x1);
    return x1 >= 0.0 ? base + jump : base;
  }
};

// A matrix-valued field (x, t) -> M_{x,t} plus its constants. Built-in
// families are closed forms valid for all (x, t) unless a validity interval
// is declared.
class AnisotropicCover {
 public:
  static AnisotropicCover isotropic(int dim, double scale = 1.0);
  static AnisotropicCover constant_matrix(const std::vector<double>& exponents,
                                          double scale = 1.0);
  static AnisotropicCover variable_diagonal(const BField& b, double scale = 1.0);
  static AnisotropicCover custom(int dim, std::function<Mat(const Vec&, double)> field,
                                 const std::string& name, XDependence dep);

  int dim() const { return dim_; }
  const std::string& family() const { return family_; }
  XDependence x_dependence() const { return dep_; }

  bool has_declared_params() const { return declared_.has_value(); }
  const CoverParams& params() const;  // declared if present, else fitted; throws if neither
  const std::optional<CoverParams>& declared_params() const { return declared_; }
  void set_declared_params(const CoverParams& p) { declared_ = p; }
  void set_fitted_params(const CoverParams& p) { fitted_ = p; }
  void set_validity(double t_lo, double t_hi) { t_valid_ = {t_lo, t_hi}; }

  // M_{x,t}; throws on singular matrices and outside the validity interval.
  Mat matrix(const Vec& x, double t) const;
  Ellipsoid ellipsoid_at(const Vec& x, double t) const;

  // Dilation step: smallest J >= 1 with 2 M_{x,t}(B) + x inside
  // theta(x, t-J) on every sample, probed on a boundary net of >= 64
  // directions; strict membership so the closed dilate is covered.
  int compute_J(const Box& box, double t_lo, double t_hi, int samples) const;

 private:
  int dim_ = 1;
  std::string family_ = "isotropic";
  std::function<Mat(const Vec&, double)> field_;
  XDependence dep_ = XDependence::none;
  std::optional<CoverParams> declared_;
  std::optional<CoverParams> fitted_;
  std::optional<std::pair<double, double>> t_valid_;
};

struct CoverViolation {
  std::string what;
  Vec x, y;
  double t = 0.0, s = 0.0, lhs = 0.0, rhs = 0.0;
};

struct CoverValidationReport {
  int samples = 0;
  int intersecting_pairs = 0;
  // empirical range of 2^t |theta(x,t)|
  double vol_min = 0.0, vol_max = 0.0;
  // with declared exponents: min 2^{a4 s}/||(M_{y,t+s})^-1 M_{x,t}|| and
  // max 2^{a6 s} ||(M_{x,t})^-1 M_{y,t+s}|| over intersecting pairs
  double lower_margin_min = 0.0, upper_margin_max = 0.0;
  CoverParams fitted;
  bool has_declared = false;
  CoverParams declared;
  std::vector<CoverViolation> violations;
  bool pass = false;
};

CoverValidationReport validate_cover(const AnisotropicCover& cover, const Box& box,
                                     double t_lo, double t_hi, int samples,
                                     std::uint64_t seed);

struct ModulusEntry {
  double radius = 0.0;
  double modulus = 0.0;  // sup over directions of ||M_{x',t} - M_{x,t}||
};
struct ModulusTable {
  std::vector<ModulusEntry> entries;
  bool monotone = false;
  bool converged = false;  // final entry < 1e-3 ||M_{x,t}||
  bool stalled = false;
};

ModulusTable check_pointwise_continuity(const AnisotropicCover& cover, const Vec& x,
                                        double t, const std::vector<double>& radii);

// Smallest sampled C with (1/C) xi(x,t) within theta(x,t) within C xi(x,t),
// via the two operator norms; nullopt when C would exceed 1e6.
std::optional<double> equivalence_constant(const AnisotropicCover& a,
                                           const AnisotropicCover& b, const Box& box,
                                           double t_lo, double t_hi, int samples,
                                           std::uint64_t seed = 1234);

// Minimal integer strictly greater than (max(1,a4) n + 1)/(a6 p).
int minimal_grand_order(const CoverParams& p, int dim, double lebesgue_p);
// Minimal integer strictly greater than (a4 Np + 1)/a6.
int minimal_grand_weight(const CoverParams& p, int Np);

}  // namespace aniso
