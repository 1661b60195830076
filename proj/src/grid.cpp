#include "aniso/grid.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "aniso/parallel.hpp"

namespace aniso {

GridFunction GridFunction::sample(const GridSpec& spec,
                                  const std::function<double(const Vec&)>& fn) {
  GridFunction f(spec);
  const std::int64_t n = spec.size();
  parallel_for_ranges(static_cast<size_t>(n), [&](size_t lo, size_t hi) {
    for (size_t i = lo; i < hi; ++i)
      f.v[i] = fn(spec.point_at(static_cast<std::int64_t>(i)));
  });
  return f;
}

double GridFunction::interp(const Vec& p) const {
  const int n = g.dim();
  double w[2][2] = {{1.0, 0.0}, {1.0, 0.0}};
  std::int64_t base[2] = {0, 0};
  for (int a = 0; a < n; ++a) {
    const double u = (p[a] - g.box.lo[static_cast<size_t>(a)]) / g.h[static_cast<size_t>(a)];
    const double fl = std::floor(u);
    const std::int64_t i = static_cast<std::int64_t>(fl);
    // outside the node hull [0, count-1] -> zero
    if (i < -1 || i >= g.count[static_cast<size_t>(a)]) return 0.0;
    const double frac = u - fl;
    base[a] = i;
    w[a][0] = 1.0 - frac;
    w[a][1] = frac;
  }
  auto node = [&](std::int64_t i0, std::int64_t i1) -> double {
    if (i0 < 0 || i0 >= g.count[0]) return 0.0;
    if (n == 2 && (i1 < 0 || i1 >= g.count[1])) return 0.0;
    return v[static_cast<size_t>(g.index(i0, n == 2 ? i1 : 0))];
  };
  if (n == 1) return w[0][0] * node(base[0], 0) + w[0][1] * node(base[0] + 1, 0);
  return w[0][0] * (w[1][0] * node(base[0], base[1]) + w[1][1] * node(base[0], base[1] + 1)) +
         w[0][1] * (w[1][0] * node(base[0] + 1, base[1]) + w[1][1] * node(base[0] + 1, base[1] + 1));
}

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double GridFunction::lp_quasi_norm(double p) const {
  if (p <= 0.0) throw std::invalid_argument("lp_quasi_norm: p must be positive");
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x), p);
  return std::pow(s * g.cell_volume(), 1.0 / p);
}

double GridFunction::integral() const {
  double s = 0.0;
  for (double x : v) s += x;
  return s * g.cell_volume();
}

namespace {

constexpr char kMagic[8] = {'A', 'N', 'I', 'S', 'O', 'G', 'R', 'D'};

template <typename T>
void put(std::ofstream& os, const T& x) {
  os.write(reinterpret_cast<const char*>(&x), sizeof(T));
}
template <typename T>
T get(std::ifstream& is) {
  T x{};
  is.read(reinterpret_cast<char*>(&x), sizeof(T));
  return x;
}

}  // namespace

void GridFunction::write_binary(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.write(kMagic, 8);
  put<std::uint32_t>(os, 1u);  // version
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim()));
  for (int a = 0; a < g.dim(); ++a) {
    put<double>(os, g.box.lo[static_cast<size_t>(a)]);
    put<double>(os, g.box.hi[static_cast<size_t>(a)]);
    put<double>(os, g.h[static_cast<size_t>(a)]);
    put<std::uint64_t>(os, static_cast<std::uint64_t>(g.count[static_cast<size_t>(a)]));
  }
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!os) throw std::runtime_error("short write: " + path);
}

GridFunction GridFunction::read_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("not a grid file: " + path);
  const auto version = get<std::uint32_t>(is);
  if (version != 1u) throw std::runtime_error("unsupported grid file version");
  const int n = static_cast<int>(get<std::uint32_t>(is));
  if (n < 1 || n > 2) throw std::runtime_error("grid file dimension must be 1 or 2");
  GridSpec spec;
  spec.box.n = n;
  for (int a = 0; a < n; ++a) {
    spec.box.lo[static_cast<size_t>(a)] = get<double>(is);
    spec.box.hi[static_cast<size_t>(a)] = get<double>(is);
    spec.h[static_cast<size_t>(a)] = get<double>(is);
    spec.count[static_cast<size_t>(a)] = static_cast<std::int64_t>(get<std::uint64_t>(is));
  }
  GridFunction f(spec);
  is.read(reinterpret_cast<char*>(f.v.data()),
          static_cast<std::streamsize>(f.v.size() * sizeof(double)));
  if (!is) throw std::runtime_error("truncated grid file: " + path);
  return f;
}

void GridFunction::write_csv(const std::string& path) const {
  if (g.dim() != 1) throw std::invalid_argument("CSV grid output is 1-D only");
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "x,value\n";
  char buf[64];
  for (std::int64_t i = 0; i < g.count[0]; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", g.point(i)[0], at(i));
    os << buf;
  }
}

GridFunction GridFunction::read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::string line;
  std::getline(is, line);  // header
  std::vector<double> xs, ys;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    double x = 0, y = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf", &x, &y) != 2)
      throw std::runtime_error("bad CSV line: " + line);
    xs.push_back(x);
    ys.push_back(y);
  }
  if (xs.size() < 2) throw std::runtime_error("CSV grid needs at least 2 rows");
  const double h = xs[1] - xs[0];
  for (size_t i = 1; i < xs.size(); ++i)
    if (std::abs(xs[i] - xs[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw std::runtime_error("CSV grid is not uniform");
  GridSpec spec = GridSpec::regular(
      Box::interval(xs.front(), xs.front() + h * static_cast<double>(xs.size())),
      static_cast<std::int64_t>(xs.size()));
  GridFunction f(spec);
  f.v = ys;
  return f;
}

}  // namespace aniso
