#include "aniso/calderon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace aniso {

double smooth_step(double u) {
  auto f1 = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
  const double a = f1(u);
  const double b = f1(1.0 - u);
  if (a == 0.0) return 0.0;
  if (b == 0.0) return 1.0;
  return a / (a + b);
}

double zeta_cutoff(double r) { return smooth_step(2.0 - r); }

std::complex<double> kernel_fourier(const TestFunction& phi, const Vec& xi) {
  if (auto closed = phi.fourier_closed(xi)) return {*closed, 0.0};
  // direct quadrature on a kernel-adapted lattice
  const int n = phi.dim();
  const double reach = phi.family() == TestFunction::Family::bump
                           ? phi.default_r_cut()
                           : (12.0 + 2.0) / std::sqrt(phi.gauss_exponent());
  const double du = 0.5 * phi.quad_refine();
  const auto steps = static_cast<std::int64_t>(std::ceil(2.0 * reach / du));
  std::complex<double> acc = 0.0;
  if (n == 1) {
    for (std::int64_t i = 0; i < steps; ++i) {
      const double y = -reach + (static_cast<double>(i) + 0.5) * du;
      const double ang = -2.0 * kPi * y * xi[0];
      acc += phi(Vec(y)) * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    return acc * du;
  }
  for (std::int64_t i = 0; i < steps; ++i) {
    const double y0 = -reach + (static_cast<double>(i) + 0.5) * du;
    for (std::int64_t j = 0; j < steps; ++j) {
      const double y1 = -reach + (static_cast<double>(j) + 0.5) * du;
      const double v = phi(Vec(y0, y1));
      if (v == 0.0) continue;
      const double ang = -2.0 * kPi * (y0 * xi[0] + y1 * xi[1]);
      acc += v * std::complex<double>(std::cos(ang), std::sin(ang));
    }
  }
  return acc * (du * du);
}

TestFunction normalize_for_reconstruction(const TestFunction& phi, double a5) {
  if (std::abs(phi.mass()) < 1e-12)
    throw std::invalid_argument("normalization requires a kernel with nonzero mean");
  const int n = phi.dim();
  const double r = 2.0 * a5;
  // lattice over the closed ball 2 a5 B^n
  auto passes = [&](const TestFunction& cand) {
    const int m = 32;
    if (n == 1) {
      for (int i = 0; i <= 2 * m; ++i) {
        const double x = -r + r * static_cast<double>(i) / m;
        if (std::abs(kernel_fourier(cand, Vec(x))) < 0.5) return false;
      }
      return true;
    }
    for (int i = 0; i <= 2 * m; ++i)
      for (int j = 0; j <= 2 * m; ++j) {
        Vec xi(-r + r * static_cast<double>(i) / m, -r + r * static_cast<double>(j) / m);
        if (xi.norm() > r) continue;
        if (std::abs(kernel_fourier(cand, xi)) < 0.5) return false;
      }
    return true;
  };
  for (int quarter = -24; quarter <= 24; ++quarter) {
    const double cp = std::exp2(0.25 * quarter);
    TestFunction cand = phi.scaled_arg(cp);
    cand = cand.scaled(1.0 / cand.mass());
    if (passes(cand)) return cand;
  }
  throw std::runtime_error(
      "no argument scaling in [2^-6, 2^6] achieves |phi^| >= 1/2 on 2 a5 B");
}

Mat DecompositionPlan::arg_transform(int k) const {
  const Mat mk = cover.matrix(base_x, base_t + static_cast<double>(k) * dilation_j);
  const Mat mxt = cover.matrix(base_x, base_t);
  return mk.transpose().mul(mxt.transpose().inverse());
}

DecompositionPlan make_plan(const AnisotropicCover& cover, const TestFunction& phi_raw,
                            const TestFunction& psi, const Vec& base_x, double base_t,
                            int k_max, const GridSpec& space_grid) {
  if (!is_pow2(space_grid.count[0]) ||
      (space_grid.dim() == 2 && !is_pow2(space_grid.count[1])))
    throw std::invalid_argument("decomposition grid counts must be powers of two");
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  DecompositionPlan plan;
  plan.base_x = base_x;
  plan.base_t = base_t;
  plan.k_max = k_max;
  plan.cover = cover;
  plan.space_grid = space_grid;
  plan.a5 = cover.params().a5;
  plan.dilation_j = cover.params().J;
  plan.phi = normalize_for_reconstruction(phi_raw, plan.a5);
  plan.psi = psi;
  return plan;
}

std::vector<std::vector<double>> build_zeta_partition(const DecompositionPlan& plan) {
  const GridSpec freq = frequency_spec(plan.space_grid);
  const std::int64_t nf = freq.size();
  std::vector<std::vector<double>> zk(static_cast<size_t>(plan.k_max) + 1);
  std::vector<double> prev(static_cast<size_t>(nf), 0.0);
  for (int k = 0; k <= plan.k_max; ++k) {
    const Mat ak = plan.arg_transform(k);
    auto& row = zk[static_cast<size_t>(k)];
    row.resize(static_cast<size_t>(nf));
    for (std::int64_t i = 0; i < nf; ++i) {
      const Vec xi = freq.point_at(i);
      const double cur = zeta_cutoff(ak.apply(xi).norm());
      row[static_cast<size_t>(i)] = k == 0 ? cur : cur - prev[static_cast<size_t>(i)];
      prev[static_cast<size_t>(i)] = cur;
    }
  }
  return zk;
}

EtaSequence build_eta(const DecompositionPlan& plan) {
  const GridSpec freq = frequency_spec(plan.space_grid);
  const std::int64_t nf = freq.size();
  const auto zk = build_zeta_partition(plan);

  const GridFunction psi_samples = GridFunction::sample(
      plan.space_grid, [&](const Vec& y) { return plan.psi(y); });
  const ComplexGrid psi_hat = fourier(psi_samples);

  EtaSequence seq;
  seq.freq_grid = freq;
  seq.eta_hat.resize(static_cast<size_t>(plan.k_max) + 1);
  seq.phi_hat_k.resize(static_cast<size_t>(plan.k_max) + 1);
  seq.eta.reserve(static_cast<size_t>(plan.k_max) + 1);
  seq.seminorms.reserve(static_cast<size_t>(plan.k_max) + 1);

  for (int k = 0; k <= plan.k_max; ++k) {
    const Mat ak = plan.arg_transform(k);
    auto& ehat = seq.eta_hat[static_cast<size_t>(k)];
    auto& phk = seq.phi_hat_k[static_cast<size_t>(k)];
    ehat.assign(static_cast<size_t>(nf), 0.0);
    phk.assign(static_cast<size_t>(nf), 0.0);
    for (std::int64_t i = 0; i < nf; ++i) {
      const Vec xi = freq.point_at(i);
      const std::complex<double> d = kernel_fourier(plan.phi, ak.apply(xi));
      phk[static_cast<size_t>(i)] = d;
      const double z = zk[static_cast<size_t>(k)][static_cast<size_t>(i)];
      if (z == 0.0) continue;
      if (std::abs(d) < 0.25) {
        std::ostringstream msg;
        msg << "small divisor |phi^| = " << std::abs(d) << " at xi = (" << xi[0];
        if (freq.dim() == 2) msg << ", " << xi[1];
        msg << "), k = " << k << ": kernel normalization is inadequate";
        throw std::runtime_error(msg.str());
      }
      ehat[static_cast<size_t>(i)] = z * psi_hat.v[static_cast<size_t>(i)] / d;
    }
    ComplexGrid eh(freq);
    eh.v = ehat;
    seq.eta.push_back(inverse_fourier_real(eh, plan.space_grid));
    seq.seminorms.push_back(grid_seminorm(seq.eta.back(), SeminormSpec(2, 4)));
  }
  return seq;
}

ReconstructionReport reconstruct(const DecompositionPlan& plan, const EtaSequence& eta,
                                 int K) {
  if (K < 0 || K > plan.k_max) throw std::invalid_argument("reconstruct: K out of range");
  const GridSpec freq = eta.freq_grid;
  ComplexGrid sum(freq);
  for (int k = 0; k <= K; ++k)
    for (std::int64_t i = 0; i < freq.size(); ++i)
      sum.v[static_cast<size_t>(i)] += eta.eta_hat[static_cast<size_t>(k)][static_cast<size_t>(i)] *
                                       eta.phi_hat_k[static_cast<size_t>(k)][static_cast<size_t>(i)];

  ReconstructionReport rep;
  rep.partial = inverse_fourier_real(sum, plan.space_grid);
  GridFunction diff(plan.space_grid);
  double sup = 0.0;
  for (std::int64_t i = 0; i < plan.space_grid.size(); ++i) {
    const double d = rep.partial.v[static_cast<size_t>(i)] - plan.psi(plan.space_grid.point_at(i));
    diff.v[static_cast<size_t>(i)] = d;
    sup = std::max(sup, std::abs(d));
  }
  rep.sup_error = sup;
  rep.weighted_error = grid_seminorm(diff, SeminormSpec(2, 4));
  return rep;
}

DecayTable seminorm_decay_table(const EtaSequence& eta, const SeminormSpec& spec,
                                int k_lo, int k_hi) {
  DecayTable table;
  const int kmax = static_cast<int>(eta.eta.size()) - 1;
  std::vector<double> s(static_cast<size_t>(kmax) + 1, 0.0);
  for (int k = 0; k <= kmax; ++k) {
    s[static_cast<size_t>(k)] =
        spec.N == 2 && spec.Ntilde == 4 ? eta.seminorms[static_cast<size_t>(k)]
                                        : grid_seminorm(eta.eta[static_cast<size_t>(k)], spec);
    DecayRow row;
    row.k = k;
    row.seminorm = s[static_cast<size_t>(k)];
    if (k > 0 && s[static_cast<size_t>(k)] > 0.0 && s[static_cast<size_t>(k - 1)] > 0.0)
      row.log2_ratio = std::log2(s[static_cast<size_t>(k)] / s[static_cast<size_t>(k - 1)]);
    table.rows.push_back(row);
  }
  // least-squares slope of log2(s_k) vs k over [k_lo, k_hi], positive entries
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int k = std::max(0, k_lo); k <= std::min(kmax, k_hi); ++k) {
    if (s[static_cast<size_t>(k)] <= 0.0) continue;
    const double x = k;
    const double y = std::log2(s[static_cast<size_t>(k)]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  table.fitted_points = m;
  if (m >= 2 && sxx * m - sx * sx > 0.0) {
    table.lsq_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  } else {
    // everything in the window underflowed: the decay outran doubles
    table.lsq_slope = -std::numeric_limits<double>::infinity();
  }
  return table;
}

}  // namespace aniso
