#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "aniso/geometry.hpp"

namespace aniso {

// Axis-aligned box [lo, hi) per axis.
struct Box {
  int n = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{0.0, 0.0};

  static Box interval(double a, double b) {
    Box box;
    box.n = 1;
    box.lo[0] = a;
    box.hi[0] = b;
    return box;
  }
  static Box square(double a, double b) {
    Box box;
    box.n = 2;
    box.lo = {a, a};
    box.hi = {b, b};
    return box;
  }
  double width(int axis) const { return hi[static_cast<size_t>(axis)] - lo[static_cast<size_t>(axis)]; }
  bool contains(const Vec& p) const {
    for (int i = 0; i < n; ++i)
      if (p[i] < lo[static_cast<size_t>(i)] || p[i] >= hi[static_cast<size_t>(i)]) return false;
    return true;
  }
};

// Uniform grid over a box, endpoint-exclusive: node i is lo + i*h,
// i in [0, count), with count * h = hi - lo per axis.
struct GridSpec {
  Box box;
  std::array<std::int64_t, 2> count{1, 1};
  std::array<double, 2> h{1.0, 1.0};

  static GridSpec regular(const Box& box, std::int64_t n0, std::int64_t n1 = 1) {
    GridSpec g;
    g.box = box;
    g.count = {n0, box.n == 2 ? n1 : 1};
    for (int a = 0; a < box.n; ++a)
      g.h[static_cast<size_t>(a)] = box.width(a) / static_cast<double>(g.count[static_cast<size_t>(a)]);
    return g;
  }

  int dim() const { return box.n; }
  std::int64_t size() const { return count[0] * count[1]; }
  double cell_volume() const { return dim() == 1 ? h[0] : h[0] * h[1]; }

  Vec point(std::int64_t i0, std::int64_t i1 = 0) const {
    Vec p;
    p.n = dim();
    p.c[0] = box.lo[0] + static_cast<double>(i0) * h[0];
    if (dim() == 2) p.c[1] = box.lo[1] + static_cast<double>(i1) * h[1];
    return p;
  }
  std::int64_t index(std::int64_t i0, std::int64_t i1 = 0) const { return i0 * count[1] + i1; }
  Vec point_at(std::int64_t flat) const { return point(flat / count[1], flat % count[1]); }

  // Refined copy: same box, factor x nodes per axis (old nodes are kept).
  GridSpec refined(int factor) const {
    GridSpec g = *this;
    for (int a = 0; a < dim(); ++a) {
      g.count[static_cast<size_t>(a)] *= factor;
      g.h[static_cast<size_t>(a)] /= factor;
    }
    return g;
  }

  bool same_layout(const GridSpec& o) const {
    return box.n == o.box.n && count == o.count && box.lo == o.box.lo && box.hi == o.box.hi;
  }
};

// Function sampled on a uniform grid. The quadrature convention throughout is
// the node sum times the cell volume; samples are treated as zero outside the
// node hull when interpolating.
struct GridFunction {
  GridSpec g;
  std::vector<double> v;

  GridFunction() = default;
  explicit GridFunction(const GridSpec& spec) : g(spec), v(static_cast<size_t>(spec.size()), 0.0) {}

  static GridFunction sample(const GridSpec& spec, const std::function<double(const Vec&)>& fn);

  double& at(std::int64_t i0, std::int64_t i1 = 0) { return v[static_cast<size_t>(g.index(i0, i1))]; }
  double at(std::int64_t i0, std::int64_t i1 = 0) const { return v[static_cast<size_t>(g.index(i0, i1))]; }

  // Multilinear interpolation of the samples; zero outside the node hull.
  double interp(const Vec& p) const;

  double sup_norm() const;
  // (sum |v|^p h^n)^(1/p); valid quasi-norm for 0 < p < 1 as well.
  double lp_quasi_norm(double p) const;
  double integral() const;

  void write_binary(const std::string& path) const;
  static GridFunction read_binary(const std::string& path);
  void write_csv(const std::string& path) const;  // 1-D only
  static GridFunction read_csv(const std::string& path);
};

struct ComplexGrid {
  GridSpec g;
  std::vector<std::complex<double>> v;

  ComplexGrid() = default;
  explicit ComplexGrid(const GridSpec& spec) : g(spec), v(static_cast<size_t>(spec.size()), 0.0) {}
  std::complex<double>& at(std::int64_t i0, std::int64_t i1 = 0) {
    return v[static_cast<size_t>(g.index(i0, i1))];
  }
  std::complex<double> at(std::int64_t i0, std::int64_t i1 = 0) const {
    return v[static_cast<size_t>(g.index(i0, i1))];
  }
};

}  // namespace aniso
