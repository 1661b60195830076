#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace aniso {

inline constexpr double kPi = 3.14159265358979323846;

// Volume of the unit ball in dimension n (only n = 1, 2 supported).
inline double unit_ball_volume(int n) {
  if (n == 1) return 2.0;
  if (n == 2) return kPi;
  throw std::invalid_argument("unit_ball_volume: dimension must be 1 or 2");
}

// Point/vector in R^n, n in {1,2}. Unused slots stay zero.
struct Vec {
  int n = 1;
  std::array<double, 2> c{0.0, 0.0};

  Vec() = default;
  explicit Vec(double x) : n(1), c{x, 0.0} {}
  Vec(double x, double y) : n(2), c{x, y} {}

  double& operator[](int i) { return c[static_cast<size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<size_t>(i)]; }

  double norm() const {
    return n == 1 ? std::abs(c[0]) : std::hypot(c[0], c[1]);
  }
  double norm_sq() const { return c[0] * c[0] + c[1] * c[1]; }

  Vec operator+(const Vec& o) const {
    Vec r = *this;
    r.c[0] += o.c[0];
    r.c[1] += o.c[1];
    return r;
  }
  Vec operator-(const Vec& o) const {
    Vec r = *this;
    r.c[0] -= o.c[0];
    r.c[1] -= o.c[1];
    return r;
  }
  Vec operator*(double s) const {
    Vec r = *this;
    r.c[0] *= s;
    r.c[1] *= s;
    return r;
  }
};

// Dense n x n matrix, row major, n in {1,2}.
struct Mat {
  int n = 1;
  std::array<double, 4> a{1.0, 0.0, 0.0, 1.0};  // [a00 a01; a10 a11]

  static Mat identity(int n) {
    Mat m;
    m.n = n;
    m.a = {1.0, 0.0, 0.0, 1.0};
    return m;
  }
  static Mat scalar(int n, double s) {
    Mat m = identity(n);
    m.a[0] = s;
    m.a[3] = s;
    return m;
  }
  static Mat diag(double d0, double d1) {
    Mat m;
    m.n = 2;
    m.a = {d0, 0.0, 0.0, d1};
    return m;
  }

  double operator()(int i, int j) const { return a[static_cast<size_t>(2 * i + j)]; }
  double& operator()(int i, int j) { return a[static_cast<size_t>(2 * i + j)]; }

  double det() const { return n == 1 ? a[0] : a[0] * a[3] - a[1] * a[2]; }

  Mat inverse() const {
    Mat r;
    r.n = n;
    const double d = det();
    if (d == 0.0) throw std::domain_error("Mat::inverse: singular matrix");
    if (n == 1) {
      r.a[0] = 1.0 / a[0];
    } else {
      r.a = {a[3] / d, -a[1] / d, -a[2] / d, a[0] / d};
    }
    return r;
  }

  Mat transpose() const {
    Mat r = *this;
    std::swap(r.a[1], r.a[2]);
    return r;
  }

  Vec apply(const Vec& v) const {
    Vec r;
    r.n = n;
    if (n == 1) {
      r.c[0] = a[0] * v.c[0];
    } else {
      r.c[0] = a[0] * v.c[0] + a[1] * v.c[1];
      r.c[1] = a[2] * v.c[0] + a[3] * v.c[1];
    }
    return r;
  }

  Mat mul(const Mat& o) const {
    Mat r;
    r.n = n;
    if (n == 1) {
      r.a[0] = a[0] * o.a[0];
    } else {
      r.a = {a[0] * o.a[0] + a[1] * o.a[2], a[0] * o.a[1] + a[1] * o.a[3],
             a[2] * o.a[0] + a[3] * o.a[2], a[2] * o.a[1] + a[3] * o.a[3]};
    }
    return r;
  }

  Mat operator*(double s) const {
    Mat r = *this;
    for (auto& x : r.a) x *= s;
    return r;
  }

  // Spectral norm (largest singular value), closed form for n <= 2.
  double op_norm() const {
    if (n == 1) return std::abs(a[0]);
    const double t = a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3];
    const double d = det();
    const double disc = std::sqrt(std::max(0.0, t * t - 4.0 * d * d));
    return std::sqrt(0.5 * (t + disc));
  }

  // Smallest singular value.
  double sigma_min() const {
    if (n == 1) return std::abs(a[0]);
    const double t = a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3];
    const double d = det();
    const double disc = std::sqrt(std::max(0.0, t * t - 4.0 * d * d));
    return std::sqrt(std::max(0.0, 0.5 * (t - disc)));
  }

  // Half-extent of the bounding box of M(B^n) along axis i (= norm of row i).
  double bbox_half_extent(int i) const {
    if (n == 1) return std::abs(a[0]);
    return std::hypot((*this)(i, 0), (*this)(i, 1));
  }
};

inline Mat operator-(const Mat& x, const Mat& y) {
  Mat r = x;
  for (size_t i = 0; i < 4; ++i) r.a[i] -= y.a[i];
  return r;
}

}  // namespace aniso
