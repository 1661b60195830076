#include "aniso/fft.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace aniso {

bool is_pow2(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

std::int64_t next_pow2(std::int64_t n) {
  std::int64_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

namespace {

using cd = std::complex<double>;

// Twiddle tables per log2(size), built once, read concurrently afterwards.
constexpr int kMaxLog2 = 26;
std::array<std::once_flag, kMaxLog2 + 1> g_tw_once;
std::array<std::vector<cd>, kMaxLog2 + 1> g_tw;

const std::vector<cd>& twiddles(int log2n) {
  std::call_once(g_tw_once[static_cast<size_t>(log2n)], [log2n] {
    const std::int64_t n = std::int64_t{1} << log2n;
    auto& tw = g_tw[static_cast<size_t>(log2n)];
    tw.resize(static_cast<size_t>(n / 2));
    for (std::int64_t k = 0; k < n / 2; ++k) {
      const double ang = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
      tw[static_cast<size_t>(k)] = cd(std::cos(ang), std::sin(ang));
    }
  });
  return g_tw[static_cast<size_t>(log2n)];
}

}  // namespace

void fft_pow2(cd* a, std::int64_t n, bool inverse) {
  if (n <= 1) return;
  if (!is_pow2(n)) throw std::invalid_argument("fft_pow2: size must be a power of two");
  int log2n = 0;
  while ((std::int64_t{1} << log2n) < n) ++log2n;
  const auto& tw = twiddles(log2n);

  // bit-reversal permutation
  for (std::int64_t i = 1, j = 0; i < n; ++i) {
    std::int64_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (std::int64_t len = 2; len <= n; len <<= 1) {
    const std::int64_t half = len >> 1;
    const std::int64_t step = n / len;
    for (std::int64_t i = 0; i < n; i += len) {
      for (std::int64_t j = 0; j < half; ++j) {
        cd w = tw[static_cast<size_t>(j * step)];
        if (inverse) w = std::conj(w);
        cd& u = a[i + j];
        cd& v = a[i + j + half];
        const cd t = w * v;
        v = u - t;
        u = u + t;
      }
    }
  }
}

void fft_pow2(std::vector<cd>& a, bool inverse) {
  fft_pow2(a.data(), static_cast<std::int64_t>(a.size()), inverse);
}

void fft2_pow2(std::vector<cd>& a, std::int64_t n0, std::int64_t n1, bool inverse) {
  if (static_cast<std::int64_t>(a.size()) != n0 * n1)
    throw std::invalid_argument("fft2_pow2: size mismatch");
  for (std::int64_t r = 0; r < n0; ++r) fft_pow2(a.data() + r * n1, n1, inverse);
  if (n0 == 1) return;
  std::vector<cd> col(static_cast<size_t>(n0));
  for (std::int64_t c = 0; c < n1; ++c) {
    for (std::int64_t r = 0; r < n0; ++r) col[static_cast<size_t>(r)] = a[static_cast<size_t>(r * n1 + c)];
    fft_pow2(col.data(), n0, inverse);
    for (std::int64_t r = 0; r < n0; ++r) a[static_cast<size_t>(r * n1 + c)] = col[static_cast<size_t>(r)];
  }
}

GridSpec frequency_spec(const GridSpec& space) {
  GridSpec f;
  f.box.n = space.dim();
  f.count = space.count;
  for (int a = 0; a < space.dim(); ++a) {
    const size_t ai = static_cast<size_t>(a);
    const double dxi = 1.0 / (static_cast<double>(space.count[ai]) * space.h[ai]);
    f.h[ai] = dxi;
    f.box.lo[ai] = -dxi * static_cast<double>(space.count[ai] / 2);
    f.box.hi[ai] = f.box.lo[ai] + dxi * static_cast<double>(space.count[ai]);
  }
  return f;
}

GridSpec space_spec_of(const GridSpec& freq) {
  // frequency_spec is an involution on centered grids up to box shift; the
  // inverse transform keeps the original space spec, which callers carry.
  return frequency_spec(freq);
}

namespace {

// Transform along one axis of a (possibly 2-D) complex grid.
// sign = -1: forward phase convention; sign = +1: inverse.
void axis_transform(ComplexGrid& grid, int axis, int sign, double pre_scale,
                    double lo, double h) {
  const std::int64_t n_axis = grid.g.count[static_cast<size_t>(axis)];
  const std::int64_t n_other = grid.g.size() / n_axis;
  if (!is_pow2(n_axis)) throw std::invalid_argument("fourier: grid count must be a power of two");
  const double dxi = 1.0 / (static_cast<double>(n_axis) * h);
  const std::int64_t half = n_axis / 2;

  std::vector<cd> line(static_cast<size_t>(n_axis));
  for (std::int64_t o = 0; o < n_other; ++o) {
    // gather
    for (std::int64_t k = 0; k < n_axis; ++k) {
      const std::int64_t i0 = axis == 0 ? k : o;
      const std::int64_t i1 = axis == 0 ? o : k;
      line[static_cast<size_t>(k)] = grid.at(i0, i1);
    }
    if (sign < 0) {
      // F_j = h * e^{-2 pi i lo xi_j} * DFT[(-1)^i g_i]_j, xi_j = (j - N/2) dxi
      for (std::int64_t k = 1; k < n_axis; k += 2) line[static_cast<size_t>(k)] = -line[static_cast<size_t>(k)];
      fft_pow2(line, false);
      for (std::int64_t j = 0; j < n_axis; ++j) {
        const double xi = dxi * static_cast<double>(j - half);
        const double ang = -2.0 * kPi * lo * xi;
        line[static_cast<size_t>(j)] *= pre_scale * cd(std::cos(ang), std::sin(ang));
      }
    } else {
      // g_i = dxi * (-1)^i * IDFT[F_j e^{+2 pi i lo xi_j}]_i
      for (std::int64_t j = 0; j < n_axis; ++j) {
        const double xi = dxi * static_cast<double>(j - half);
        const double ang = 2.0 * kPi * lo * xi;
        line[static_cast<size_t>(j)] *= cd(std::cos(ang), std::sin(ang));
      }
      fft_pow2(line, true);
      for (std::int64_t i = 0; i < n_axis; ++i) {
        double s = pre_scale;
        if (i & 1) s = -s;
        line[static_cast<size_t>(i)] *= s;
      }
    }
    // scatter
    for (std::int64_t k = 0; k < n_axis; ++k) {
      const std::int64_t i0 = axis == 0 ? k : o;
      const std::int64_t i1 = axis == 0 ? o : k;
      grid.at(i0, i1) = line[static_cast<size_t>(k)];
    }
  }
}

ComplexGrid forward_impl(ComplexGrid work, const GridSpec& space) {
  for (int axis = 0; axis < space.dim(); ++axis) {
    const size_t ai = static_cast<size_t>(axis);
    axis_transform(work, axis, -1, space.h[ai], space.box.lo[ai], space.h[ai]);
  }
  work.g = frequency_spec(space);
  return work;
}

}  // namespace

ComplexGrid fourier(const GridFunction& g) {
  ComplexGrid work(g.g);
  for (size_t i = 0; i < g.v.size(); ++i) work.v[i] = g.v[i];
  return forward_impl(std::move(work), g.g);
}

ComplexGrid fourier(const ComplexGrid& g) { return forward_impl(g, g.g); }

ComplexGrid inverse_fourier(const ComplexGrid& F, const GridSpec& space) {
  if (space.count != F.g.count)
    throw std::invalid_argument("inverse_fourier: space/frequency grid counts differ");
  ComplexGrid work = F;
  work.g = space;
  for (int axis = 0; axis < space.dim(); ++axis) {
    const size_t ai = static_cast<size_t>(axis);
    const double dxi = F.g.h[ai];
    // inverse sum weight is dxi; the space lo appears in the phase
    axis_transform(work, axis, +1, dxi, space.box.lo[ai], space.h[ai]);
  }
  return work;
}

ComplexGrid inverse_fourier(const ComplexGrid& F) {
  return inverse_fourier(F, space_spec_of(F.g));
}

GridFunction inverse_fourier_real(const ComplexGrid& F, const GridSpec& space,
                                  double* max_imag) {
  ComplexGrid c = inverse_fourier(F, space);
  GridFunction g(c.g);
  double mi = 0.0;
  for (size_t i = 0; i < c.v.size(); ++i) {
    g.v[i] = c.v[i].real();
    mi = std::max(mi, std::abs(c.v[i].imag()));
  }
  if (max_imag) *max_imag = mi;
  return g;
}

}  // namespace aniso
