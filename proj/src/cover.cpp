#include "aniso/cover.hpp"

#include <algorithm>
#include <stdexcept>

#include "aniso/parallel.hpp"

namespace aniso {

void CoverParams::validate() const {
  if (!(a1 > 0.0) || !(a2 >= a1)) throw std::invalid_argument("cover params: need 0 < a1 <= a2");
  if (!(a3 > 0.0) || a3 > 1.0) throw std::invalid_argument("cover params: need a3 in (0, 1]");
  if (a5 < 1.0) throw std::invalid_argument("cover params: need a5 >= 1");
  if (!(a6 > 0.0) || a6 > a4) throw std::invalid_argument("cover params: need 0 < a6 <= a4");
  if (J < 1) throw std::invalid_argument("cover params: need J >= 1");
}

AnisotropicCover AnisotropicCover::isotropic(int dim, double scale) {
  if (dim < 1 || dim > 2) throw std::invalid_argument("cover dimension must be 1 or 2");
  if (scale <= 0.0) throw std::invalid_argument("cover scale must be positive");
  AnisotropicCover c;
  c.dim_ = dim;
  c.family_ = "isotropic";
  c.dep_ = XDependence::none;
  const double inv_n = 1.0 / dim;
  c.field_ = [dim, scale, inv_n](const Vec&, double t) {
    return Mat::scalar(dim, scale * std::exp2(-t * inv_n));
  };
  CoverParams p;
  p.a1 = p.a2 = unit_ball_volume(dim) * std::pow(scale, dim);
  p.a3 = p.a5 = 1.0;
  p.a4 = p.a6 = inv_n;
  p.J = dim == 1 ? 2 : 3;  // strict containment of the closed dilate
  c.declared_ = p;
  return c;
}

AnisotropicCover AnisotropicCover::constant_matrix(const std::vector<double>& exponents,
                                                   double scale) {
  const int dim = static_cast<int>(exponents.size());
  if (dim < 1 || dim > 2) throw std::invalid_argument("cover dimension must be 1 or 2");
  if (scale <= 0.0) throw std::invalid_argument("cover scale must be positive");
  double sum = 0.0;
  for (double e : exponents) {
    if (e < 0.0) throw std::invalid_argument("constant_matrix exponents must be >= 0");
    sum += e;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("constant_matrix exponents must sum to 1");
  AnisotropicCover c;
  c.dim_ = dim;
  c.family_ = "constant_matrix";
  c.dep_ = XDependence::none;
  const std::vector<double> e = exponents;
  c.field_ = [dim, scale, e](const Vec&, double t) {
    if (dim == 1) return Mat::scalar(1, scale * std::exp2(-t * e[0]));
    return Mat::diag(scale * std::exp2(-t * e[0]), scale * std::exp2(-t * e[1]));
  };
  const double cmin = *std::min_element(e.begin(), e.end());
  const double cmax = *std::max_element(e.begin(), e.end());
  if (cmin > 0.0) {
    CoverParams p;
    p.a1 = p.a2 = unit_ball_volume(dim) * std::pow(scale, dim);
    p.a3 = p.a5 = 1.0;
    p.a4 = cmax;
    p.a6 = cmin;
    p.J = static_cast<int>(std::floor(1.0 / cmin)) + 1;
    c.declared_ = p;
  }
  return c;
}

AnisotropicCover AnisotropicCover::variable_diagonal(const BField& b, double scale) {
  if (scale <= 0.0) throw std::invalid_argument("cover scale must be positive");
  AnisotropicCover c;
  c.dim_ = 2;
  c.family_ = "variable_diagonal";
  c.dep_ = XDependence::axis0;
  c.field_ = [b, scale](const Vec& x, double t) {
    const double bx = b(x[0]);
    return Mat::diag(scale * std::exp2(-t * bx), scale * std::exp2(-t * (1.0 - bx)));
  };
  if (b.kind == BField::Kind::sine) {
    // working-range constants for the default sine field on |t| <= 8-ish;
    // the exponent range [offset - |amp|, offset + |amp|] drives all of them
    const double blo = b.offset - std::abs(b.amplitude);
    const double bhi = b.offset + std::abs(b.amplitude);
    if (blo > 0.0 && bhi < 1.0) {
      CoverParams p;
      p.a1 = p.a2 = kPi * scale * scale;
      const double bmin = std::min(blo, 1.0 - bhi);
      const double bmax = std::max(bhi, 1.0 - blo);
      p.a4 = bmax;
      p.a6 = bmin;
      const double swing = std::exp2(8.0 * (bhi - blo));  // |t| <= 8 working range
      p.a5 = swing;
      p.a3 = 1.0 / swing;
      p.J = static_cast<int>(std::floor(1.0 / bmin)) + 1;
      c.declared_ = p;
    }
  }
  return c;
}

AnisotropicCover AnisotropicCover::custom(int dim,
                                          std::function<Mat(const Vec&, double)> field,
                                          const std::string& name, XDependence dep) {
  if (dim < 1 || dim > 2) throw std::invalid_argument("cover dimension must be 1 or 2");
  AnisotropicCover c;
  c.dim_ = dim;
  c.family_ = name;
  c.dep_ = dep;
  c.field_ = std::move(field);
  return c;
}

const CoverParams& AnisotropicCover::params() const {
  if (declared_) return *declared_;
  if (fitted_) return *fitted_;
  throw std::logic_error("cover has neither declared nor fitted params; validate first");
}

Mat AnisotropicCover::matrix(const Vec& x, double t) const {
  if (t_valid_ && (t < t_valid_->first || t > t_valid_->second))
    throw std::out_of_range("cover evaluated outside its declared t-validity range");
  Mat m = field_(x, t);
  if (std::abs(m.det()) < 1e-12 * std::exp2(-t))
    throw std::domain_error("cover family produced a (near-)singular matrix");
  return m;
}

Ellipsoid AnisotropicCover::ellipsoid_at(const Vec& x, double t) const {
  return Ellipsoid{x, matrix(x, t)};
}

namespace {

std::vector<Vec> direction_net(int dim, int count) {
  std::vector<Vec> dirs;
  if (dim == 1) {
    dirs.push_back(Vec(1.0));
    dirs.push_back(Vec(-1.0));
    return dirs;
  }
  for (int k = 0; k < count; ++k) {
    const double ang = 2.0 * kPi * static_cast<double>(k) / count;
    dirs.emplace_back(std::cos(ang), std::sin(ang));
  }
  return dirs;
}

Vec sample_point(Rng& rng, const Box& box) {
  Vec p;
  p.n = box.n;
  for (int a = 0; a < box.n; ++a)
    p[a] = rng.uniform(box.lo[static_cast<size_t>(a)], box.hi[static_cast<size_t>(a)]);
  return p;
}

// Projected-gradient intersection probe: minimize |A^-1(p-x)| + |B^-1(p-y)|,
// accept when both terms drop below 1. False negatives only drop samples.
bool ellipsoids_intersect(const Ellipsoid& ea, const Ellipsoid& eb) {
  const Mat ia = ea.matrix.inverse();
  const Mat ib = eb.matrix.inverse();
  auto terms = [&](const Vec& p, double& ta, double& tb) {
    ta = ia.apply(p - ea.center).norm();
    tb = ib.apply(p - eb.center).norm();
  };
  Vec p = (ea.center + eb.center) * 0.5;
  double ta, tb;
  terms(p, ta, tb);
  if (ta < 1.0 && tb < 1.0) return true;
  // gradient of |A^-1(p-c)| is (A^-T A^-1 (p-c)) / |A^-1(p-c)|
  const Mat iat = ia.transpose();
  const Mat ibt = ib.transpose();
  const double scale = std::min(ea.matrix.sigma_min(), eb.matrix.sigma_min());
  double step = 0.5 * scale;
  for (int it = 0; it < 48; ++it) {
    Vec g;
    g.n = p.n;
    if (ta > 1e-14) g = g + iat.apply(ia.apply(p - ea.center)) * (1.0 / ta);
    if (tb > 1e-14) g = g + ibt.apply(ib.apply(p - eb.center)) * (1.0 / tb);
    const double gn = g.norm();
    if (gn < 1e-14) break;
    Vec cand = p - g * (step / gn);
    double ca, cb;
    terms(cand, ca, cb);
    if (ca + cb < ta + tb) {
      p = cand;
      ta = ca;
      tb = cb;
      if (ta < 1.0 && tb < 1.0) return true;
    } else {
      step *= 0.5;
    }
  }
  return ta < 1.0 && tb < 1.0;
}

struct ShapeSample {
  Vec x, y;
  double t, s;
  double a_norm;  // ||(M_{y,t+s})^-1 M_{x,t}||
  double b_norm;  // ||(M_{x,t})^-1 M_{y,t+s}||
};

}  // namespace

int AnisotropicCover::compute_J(const Box& box, double t_lo, double t_hi,
                                int samples) const {
  const auto dirs = direction_net(dim_, 64);
  std::vector<std::pair<Vec, double>> pts;
  Rng rng(0x4A1C0DE5ull);
  pts.reserve(static_cast<size_t>(samples));
  for (int i = 0; i < samples; ++i)
    pts.emplace_back(sample_point(rng, box), rng.uniform(t_lo, t_hi));

  for (int j = 1; j <= 64; ++j) {
    bool ok = true;
    for (const auto& [x, t] : pts) {
      const Mat m = matrix(x, t);
      const Ellipsoid outer = ellipsoid_at(x, t - j);
      for (const Vec& u : dirs) {
        const Vec probe = x + m.apply(u) * 2.0;
        if (!outer.contains(probe)) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) return j;
  }
  throw std::runtime_error("compute_J: no J <= 64 satisfies the dilation containment");
}

CoverValidationReport validate_cover(const AnisotropicCover& cover, const Box& box,
                                     double t_lo, double t_hi, int samples,
                                     std::uint64_t seed) {
  if (samples < 100) throw std::invalid_argument("validate_cover: need samples >= 100");
  if (box.n != cover.dim()) throw std::invalid_argument("validate_cover: box dimension mismatch");

  CoverValidationReport rep;
  rep.samples = samples;
  rep.has_declared = cover.has_declared_params();
  if (rep.has_declared) rep.declared = *cover.declared_params();

  const int workers = std::min(worker_count(), 8);
  std::vector<std::vector<ShapeSample>> pair_acc(static_cast<size_t>(workers));
  std::vector<double> vmin_acc(static_cast<size_t>(workers), 1e300);
  std::vector<double> vmax_acc(static_cast<size_t>(workers), -1e300);

  const int per_worker = (samples + workers - 1) / workers;
  parallel_for(static_cast<size_t>(workers), [&](size_t w) {
    Rng rng = Rng::sub_stream(seed, w);
    auto& pairs = pair_acc[w];
    for (int i = 0; i < per_worker; ++i) {
      const Vec x = sample_point(rng, box);
      const double t = rng.uniform(t_lo, t_hi);
      const bool diagonal = (i % 16) == 0;  // pin the s=0, y=x corner
      const Vec y = diagonal ? x : sample_point(rng, box);
      const double s = diagonal ? 0.0 : rng.uniform(0.0, std::min(4.0, t_hi - t));

      const Mat mx = cover.matrix(x, t);
      const Mat my = cover.matrix(y, t + s);
      const double volx = std::exp2(t) * std::abs(mx.det()) * unit_ball_volume(box.n);
      vmin_acc[w] = std::min(vmin_acc[w], volx);
      vmax_acc[w] = std::max(vmax_acc[w], volx);

      if (!ellipsoids_intersect({x, mx}, {y, my})) continue;
      ShapeSample smp;
      smp.x = x;
      smp.y = y;
      smp.t = t;
      smp.s = s;
      smp.a_norm = my.inverse().mul(mx).op_norm();
      smp.b_norm = mx.inverse().mul(my).op_norm();
      pairs.push_back(smp);
    }
  });

  rep.vol_min = *std::min_element(vmin_acc.begin(), vmin_acc.end());
  rep.vol_max = *std::max_element(vmax_acc.begin(), vmax_acc.end());

  std::vector<ShapeSample> pairs;
  for (auto& chunk : pair_acc) pairs.insert(pairs.end(), chunk.begin(), chunk.end());
  rep.intersecting_pairs = static_cast<int>(pairs.size());

  // Fitted constants: least-squares slope of log2(norm) against s, then the
  // factor raised/lowered until every sample is covered. Exact families (the
  // isotropic ones) come out with a3 = a5 = 1 and the exact exponents.
  auto envelope_slope = [&](auto&& value_of) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : pairs) {
      const double y = value_of(p);
      sx += p.s;
      sy += y;
      sxx += p.s * p.s;
      sxy += p.s * y;
    }
    const double n = static_cast<double>(pairs.size());
    const double den = n * sxx - sx * sx;
    return den > 0.0 ? (n * sxy - sx * sy) / den : 0.0;
  };
  double a4 = 0.0, a6 = 0.0, a3 = 1.0, a5 = 1.0;
  if (!pairs.empty()) {
    // upper: log2 B <= log2 a5 - a6 s
    a6 = -envelope_slope([](const ShapeSample& p) { return std::log2(p.b_norm); });
    for (const auto& p : pairs)
      a5 = std::max(a5, std::exp2(std::log2(p.b_norm) + a6 * p.s));
    // lower: -log2 A >= log2 a3 - a4 s
    a4 = -envelope_slope([](const ShapeSample& p) { return -std::log2(p.a_norm); });
    for (const auto& p : pairs)
      a3 = std::min(a3, std::exp2(a4 * p.s - std::log2(p.a_norm)));
  }
  rep.fitted.a1 = rep.vol_min;
  rep.fitted.a2 = rep.vol_max;
  rep.fitted.a3 = a3;
  rep.fitted.a4 = std::max(a4, a6);  // decay exponents satisfy a6 <= a4
  rep.fitted.a5 = a5;
  rep.fitted.a6 = a6;
  rep.fitted.J = rep.has_declared ? rep.declared.J : 0;
  const bool have_decay = !pairs.empty();

  const double tol = 1e-6;
  if (rep.has_declared) {
    rep.lower_margin_min = 1e300;
    rep.upper_margin_max = -1e300;
    for (const auto& p : pairs) {
      const double lower = std::exp2(rep.declared.a4 * p.s) / p.a_norm;
      const double upper = std::exp2(rep.declared.a6 * p.s) * p.b_norm;
      rep.lower_margin_min = std::min(rep.lower_margin_min, lower);
      rep.upper_margin_max = std::max(rep.upper_margin_max, upper);
      if (lower < rep.declared.a3 * (1.0 - tol))
        rep.violations.push_back({"shape lower bound", p.x, p.y, p.t, p.s, lower, rep.declared.a3});
      if (upper > rep.declared.a5 * (1.0 + tol))
        rep.violations.push_back({"shape upper bound", p.x, p.y, p.t, p.s, upper, rep.declared.a5});
    }
    if (rep.vol_min < rep.declared.a1 * (1.0 - tol))
      rep.violations.push_back({"volume lower bound", Vec(), Vec(), 0, 0, rep.vol_min, rep.declared.a1});
    if (rep.vol_max > rep.declared.a2 * (1.0 + tol))
      rep.violations.push_back({"volume upper bound", Vec(), Vec(), 0, 0, rep.vol_max, rep.declared.a2});
  }
  if (rep.fitted.a6 <= 1e-3 && have_decay)
    rep.violations.push_back(
        {"fitted a6 near zero (shape condition degenerates)", Vec(), Vec(), 0, 0, rep.fitted.a6, 0.0});
  rep.pass = rep.violations.empty();
  return rep;
}

ModulusTable check_pointwise_continuity(const AnisotropicCover& cover, const Vec& x,
                                        double t, const std::vector<double>& radii) {
  for (size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] < radii[i - 1]) || radii[i] <= 0.0)
      throw std::invalid_argument("radii must be strictly decreasing and positive");

  ModulusTable table;
  const Mat m0 = cover.matrix(x, t);
  const auto dirs = direction_net(cover.dim(), 32);
  for (double r : radii) {
    double mod = 0.0;
    for (const Vec& u : dirs) {
      const Mat m = cover.matrix(x + u * r, t);
      mod = std::max(mod, (m - m0).op_norm());
    }
    table.entries.push_back({r, mod});
  }
  table.monotone = true;
  for (size_t i = 1; i < table.entries.size(); ++i)
    if (table.entries[i].modulus > table.entries[i - 1].modulus + 1e-9) table.monotone = false;
  table.converged =
      !table.entries.empty() && table.entries.back().modulus < 1e-3 * m0.op_norm();
  table.stalled = !(table.monotone && table.converged);
  return table;
}

std::optional<double> equivalence_constant(const AnisotropicCover& a,
                                           const AnisotropicCover& b, const Box& box,
                                           double t_lo, double t_hi, int samples,
                                           std::uint64_t seed) {
  if (a.dim() != b.dim()) throw std::invalid_argument("equivalence: dimension mismatch");
  Rng rng(seed);
  double c = 1.0;
  for (int i = 0; i < samples; ++i) {
    const Vec x = sample_point(rng, box);
    const double t = t_lo + (t_hi - t_lo) * (samples == 1 ? 0.0 : double(i) / (samples - 1));
    (void)rng.next_u64();
    const Mat ma = a.matrix(x, t);
    const Mat mb = b.matrix(x, t);
    c = std::max({c, mb.inverse().mul(ma).op_norm(), ma.inverse().mul(mb).op_norm()});
    if (c > 1e6) return std::nullopt;
  }
  return c;
}

int minimal_grand_order(const CoverParams& p, int dim, double lebesgue_p) {
  const double v = (std::max(1.0, p.a4) * dim + 1.0) / (p.a6 * lebesgue_p);
  return static_cast<int>(std::floor(v)) + 1;
}

int minimal_grand_weight(const CoverParams& p, int np) {
  const double v = (p.a4 * np + 1.0) / p.a6;
  return static_cast<int>(std::floor(v)) + 1;
}

}  // namespace aniso
