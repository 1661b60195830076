#include "aniso/maximal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "aniso/parallel.hpp"

namespace aniso {

const char* kind_name(MaximalKind k) {
  switch (k) {
    case MaximalKind::radial: return "radial";
    case MaximalKind::nontangential: return "nontangential";
    case MaximalKind::tangential: return "tangential";
    case MaximalKind::truncated_radial: return "truncated_radial";
    case MaximalKind::truncated_nontangential: return "truncated_nontangential";
    case MaximalKind::truncated_tangential: return "truncated_tangential";
    case MaximalKind::aperture: return "aperture";
  }
  return "?";
}

void MaximalConfig::validate() const {
  if (!(t_min <= t_max)) throw std::invalid_argument("config: t_min must be <= t_max");
  if (!(t_step > 0.0)) throw std::invalid_argument("config: t_step must be positive");
  if (N < 0 || Ntilde < N) throw std::invalid_argument("config: need 0 <= N <= Ntilde");
  if (L < 0.0) throw std::invalid_argument("config: need L >= 0");
  if (!(t0 < 0.0)) throw std::invalid_argument("config: need t0 < 0");
  if (aperture_l < 0) throw std::invalid_argument("config: need aperture_l >= 0");
  if (!(p > 0.0)) throw std::invalid_argument("config: need p > 0");
  if (!(q > 0.0 && q < p)) throw std::invalid_argument("config: need 0 < q < p");
}

std::vector<double> MaximalConfig::t_grid() const {
  const auto count = static_cast<std::int64_t>(std::floor((t_max - t_min) / t_step + 1e-9)) + 1;
  std::vector<double> tg(static_cast<size_t>(count));
  for (std::int64_t k = 0; k < count; ++k)
    tg[static_cast<size_t>(k)] = t_min + static_cast<double>(k) * t_step;
  return tg;
}

namespace {

inline double recip_pow(double base, int n) {
  double r = 1.0 / base;
  double out = 1.0;
  for (int i = 0; i < n; ++i) out *= r;
  return out;
}

inline double decay_weight(double base, double level) {
  if (level == 0.0) return 1.0;
  return std::pow(1.0 + base, -level);
}

struct IdxBox {
  std::int64_t lo0, hi0, lo1, hi1;  // inclusive
};

IdxBox ellipsoid_index_box(const GridSpec& g, const Vec& center, const Mat& m,
                           double cell_margin = 0.0) {
  const int n = g.dim();
  std::int64_t lo[2] = {0, 0}, hi[2] = {0, 0};
  for (int a = 0; a < n; ++a) {
    const size_t ai = static_cast<size_t>(a);
    const double ext = m.bbox_half_extent(a) + cell_margin * g.h[ai];
    lo[a] = std::max<std::int64_t>(
        0, static_cast<std::int64_t>(
               std::ceil((center[a] - ext - g.box.lo[ai]) / g.h[ai] - 1e-12)));
    hi[a] = std::min<std::int64_t>(
        g.count[ai] - 1, static_cast<std::int64_t>(
                             std::floor((center[a] + ext - g.box.lo[ai]) / g.h[ai] + 1e-12)));
  }
  return IdxBox{lo[0], hi[0], n == 2 ? lo[1] : 0, n == 2 ? hi[1] : 0};
}

// Square-ring walk around (i0, i1) with a monotone per-ring upper bound;
// stops as soon as the bound cannot beat the running maximum `cur`.
template <typename BoundFn, typename CellFn>
void scan_rings(const GridSpec& g, std::int64_t i0, std::int64_t i1, BoundFn&& bound,
                const double& cur, CellFn&& cell) {
  const std::int64_t n0 = g.count[0];
  const std::int64_t n1 = g.dim() == 2 ? g.count[1] : 1;
  const std::int64_t rmax = std::max(
      std::max(i0, n0 - 1 - i0), g.dim() == 2 ? std::max(i1, n1 - 1 - i1) : std::int64_t{0});
  for (std::int64_t r = 0; r <= rmax; ++r) {
    if (bound(r) <= cur) return;
    if (r == 0) {
      cell(i0, i1);
      continue;
    }
    if (g.dim() == 1) {
      if (i0 - r >= 0) cell(i0 - r, 0);
      if (i0 + r < n0) cell(i0 + r, 0);
      continue;
    }
    const std::int64_t lo1 = std::max<std::int64_t>(0, i1 - r);
    const std::int64_t hi1 = std::min(n1 - 1, i1 + r);
    if (i0 - r >= 0)
      for (std::int64_t j1 = lo1; j1 <= hi1; ++j1) cell(i0 - r, j1);
    if (i0 + r < n0)
      for (std::int64_t j1 = lo1; j1 <= hi1; ++j1) cell(i0 + r, j1);
    const std::int64_t lo0 = std::max<std::int64_t>(0, i0 - r + 1);
    const std::int64_t hi0 = std::min(n0 - 1, i0 + r - 1);
    if (i1 - r >= 0)
      for (std::int64_t j0 = lo0; j0 <= hi0; ++j0) cell(j0, i1 - r);
    if (i1 + r < n1)
      for (std::int64_t j0 = lo0; j0 <= hi0; ++j0) cell(j0, i1 + r);
  }
}

struct Acc {
  std::vector<double> val;
  std::vector<double> wt;
  std::vector<std::int64_t> wy;
  void init(std::int64_t n) {
    val.assign(static_cast<size_t>(n), 0.0);
    wt.assign(static_cast<size_t>(n), 0.0);
    wy.assign(static_cast<size_t>(n), -1);
  }
  inline void update(std::int64_t x, double v, double t, std::int64_t y) {
    if (v > val[static_cast<size_t>(x)]) {
      val[static_cast<size_t>(x)] = v;
      wt[static_cast<size_t>(x)] = t;
      wy[static_cast<size_t>(x)] = y;
    }
  }
};

struct KeyRange {
  std::int64_t lo, hi;
};

KeyRange key_x_range(const GridSpec& g, XDependence dep, std::int64_t key) {
  switch (dep) {
    case XDependence::none:
      return {0, g.size()};
    case XDependence::axis0:
      return {key * g.count[1], (key + 1) * g.count[1]};
    default:
      return {key, key + 1};
  }
}

// Everything one (t, key) slice needs.
struct SliceCtx {
  double t = 0.0;
  double w2t = 1.0;
  bool plain_here = false;
  bool trunc_here = false;
  Mat m, minv;
  double opn = 1.0;
  Mat map_m, map_inv;  // aperture ellipsoid at t - l J
  const std::vector<GridFunction>* fields = nullptr;  // may point to empty
  std::vector<double> fmax;
};

}  // namespace

std::vector<std::map<MaximalKind, MaximalField>> compute_maximal_fields(
    const std::vector<const GridFunction*>& fs, const TestFunction& phi,
    const AnisotropicCover& cover, const MaximalConfig& cfg,
    const std::vector<MaximalKind>& kinds) {
  cfg.validate();
  ConvolutionEngine eng(fs, phi, cover);
  const GridSpec& g = eng.grid();
  const int nb = eng.batch();
  const std::int64_t nx = g.size();
  const double hmin = g.dim() == 2 ? std::min(g.h[0], g.h[1]) : g.h[0];

  auto want = [&kinds](MaximalKind k) {
    return std::find(kinds.begin(), kinds.end(), k) != kinds.end();
  };
  const bool w_rad = want(MaximalKind::radial);
  const bool w_non = want(MaximalKind::nontangential);
  const bool w_tan = want(MaximalKind::tangential);
  const bool w_trad = want(MaximalKind::truncated_radial);
  const bool w_tnon = want(MaximalKind::truncated_nontangential);
  const bool w_ttan = want(MaximalKind::truncated_tangential);
  const bool w_ap = want(MaximalKind::aperture);
  const bool need_decay = w_trad || w_tnon || w_ttan || w_ap;
  const bool plain_any = w_rad || w_non || w_tan;

  int dilation_j = 0;
  if (w_ap && cfg.aperture_l > 0) dilation_j = cover.params().J;

  std::map<MaximalKind, std::vector<Acc>> acc;
  for (MaximalKind k : kinds) {
    auto& v = acc[k];
    v.resize(static_cast<size_t>(nb));
    for (auto& a : v) a.init(nx);
  }
  auto acc_of = [&acc](MaximalKind k) -> Acc* {
    auto it = acc.find(k);
    return it == acc.end() ? nullptr : it->second.data();
  };
  Acc* a_rad = acc_of(MaximalKind::radial);
  Acc* a_non = acc_of(MaximalKind::nontangential);
  Acc* a_tan = acc_of(MaximalKind::tangential);
  Acc* a_trad = acc_of(MaximalKind::truncated_radial);
  Acc* a_tnon = acc_of(MaximalKind::truncated_nontangential);
  Acc* a_ttan = acc_of(MaximalKind::truncated_tangential);
  Acc* a_ap = acc_of(MaximalKind::aperture);

  const std::int64_t keys = eng.key_count();
  std::vector<Mat> minv_t0(static_cast<size_t>(keys));
  if (need_decay)
    for (std::int64_t k = 0; k < keys; ++k)
      minv_t0[static_cast<size_t>(k)] = eng.matrix(k, cfg.t0).inverse();

  std::atomic<bool> tangential_boundary_flag{false};

  // Gather the contributions of one (t, key) slice for x in [xlo, xhi).
  auto gather = [&](const SliceCtx& ctx, std::int64_t key, std::int64_t xlo, std::int64_t xhi) {
    const bool have_fields = ctx.fields && !ctx.fields->empty();
    for (std::int64_t xf = xlo; xf < xhi; ++xf) {
      const Vec x = g.point_at(xf);
      const std::int64_t xi0 = xf / g.count[1];
      const std::int64_t xi1 = xf % g.count[1];

      for (int fi = 0; fi < nb; ++fi) {
        const size_t fiu = static_cast<size_t>(fi);
        auto conv = [&](std::int64_t yf, const Vec& y) -> double {
          return have_fields ? (*ctx.fields)[fiu].v[static_cast<size_t>(yf)]
                             : eng.direct_value(fi, ctx.m, y);
        };

        if (w_rad || w_trad) {
          const double c = std::abs(conv(xf, x));
          if (w_rad && ctx.plain_here) a_rad[fiu].update(xf, c, ctx.t, xf);
          if (w_trad && ctx.trunc_here) {
            const double w1 =
                decay_weight(minv_t0[static_cast<size_t>(key)].apply(x).norm(), cfg.L);
            a_trad[fiu].update(xf, c * w1 * ctx.w2t, ctx.t, xf);
          }
        }

        if (w_non || w_tnon) {
          const IdxBox ib = ellipsoid_index_box(g, x, ctx.m);
          for (std::int64_t j0 = ib.lo0; j0 <= ib.hi0; ++j0) {
            for (std::int64_t j1 = ib.lo1; j1 <= ib.hi1; ++j1) {
              const std::int64_t yf = g.index(j0, j1);
              if (!cfg.include_center && yf == xf) continue;
              const Vec y = g.point(j0, j1);
              if (yf != xf && ctx.minv.apply(y - x).norm() >= 1.0) continue;
              const double c = std::abs(conv(yf, y));
              if (w_non && ctx.plain_here) a_non[fiu].update(xf, c, ctx.t, yf);
              if (w_tnon && ctx.trunc_here) {
                const double w1 =
                    decay_weight(minv_t0[static_cast<size_t>(key)].apply(y).norm(), cfg.L);
                a_tnon[fiu].update(xf, c * w1 * ctx.w2t, ctx.t, yf);
              }
            }
          }
        }

        if (w_ap && ctx.trunc_here) {
          const IdxBox ib = ellipsoid_index_box(g, x, ctx.map_m);
          Acc& a = a_ap[fiu];
          for (std::int64_t j0 = ib.lo0; j0 <= ib.hi0; ++j0) {
            for (std::int64_t j1 = ib.lo1; j1 <= ib.hi1; ++j1) {
              const std::int64_t yf = g.index(j0, j1);
              const Vec y = g.point(j0, j1);
              if (yf != xf && ctx.map_inv.apply(y - x).norm() >= 1.0) continue;
              const double w1 =
                  decay_weight(minv_t0[static_cast<size_t>(key)].apply(y).norm(), cfg.L);
              a.update(xf, std::abs(conv(yf, y)) * w1 * ctx.w2t, ctx.t, yf);
            }
          }
        }

        if (w_tan && ctx.plain_here) {
          Acc& a = a_tan[fiu];
          double& cur = a.val[static_cast<size_t>(xf)];
          const double fm = ctx.fmax[fiu];
          scan_rings(
              g, xi0, xi1,
              [&](std::int64_t r) {
                return fm * recip_pow(1.0 + static_cast<double>(r) * hmin / ctx.opn, cfg.N);
              },
              cur,
              [&](std::int64_t j0, std::int64_t j1) {
                const std::int64_t yf = g.index(j0, j1);
                const Vec y = g.point(j0, j1);
                const double w = recip_pow(1.0 + ctx.minv.apply(x - y).norm(), cfg.N);
                a.update(xf, std::abs(conv(yf, y)) * w, ctx.t, yf);
              });
        }

        if (w_ttan && ctx.trunc_here) {
          Acc& a = a_ttan[fiu];
          double& cur = a.val[static_cast<size_t>(xf)];
          const double fm = ctx.fmax[fiu] * ctx.w2t;
          scan_rings(
              g, xi0, xi1,
              [&](std::int64_t r) {
                return fm * recip_pow(1.0 + static_cast<double>(r) * hmin / ctx.opn, cfg.N);
              },
              cur,
              [&](std::int64_t j0, std::int64_t j1) {
                const std::int64_t yf = g.index(j0, j1);
                const Vec y = g.point(j0, j1);
                const double w = recip_pow(1.0 + ctx.minv.apply(x - y).norm(), cfg.N);
                const double w1 =
                    decay_weight(minv_t0[static_cast<size_t>(key)].apply(y).norm(), cfg.L);
                a.update(xf, std::abs(conv(yf, y)) * w * w1 * ctx.w2t, ctx.t, yf);
              });
        }
      }
    }
  };

  auto make_ctx = [&](double t, std::int64_t key, bool plain_here, bool trunc_here,
                      const std::vector<GridFunction>* fields) {
    SliceCtx ctx;
    ctx.t = t;
    ctx.plain_here = plain_here;
    ctx.trunc_here = trunc_here;
    ctx.w2t = trunc_here ? decay_weight(std::exp2(t + cfg.t0), cfg.L) : 1.0;
    ctx.m = eng.matrix(key, t);
    ctx.minv = ctx.m.inverse();
    ctx.opn = ctx.m.op_norm();
    ctx.fields = fields;
    const bool have_fields = fields && !fields->empty();
    ctx.fmax.assign(static_cast<size_t>(nb), 0.0);
    for (int fi = 0; fi < nb; ++fi) {
      if (have_fields) {
        double mx = 0.0;
        for (double v : (*fields)[static_cast<size_t>(fi)].v) mx = std::max(mx, std::abs(v));
        ctx.fmax[static_cast<size_t>(fi)] = mx;
      } else {
        ctx.fmax[static_cast<size_t>(fi)] = eng.abs_bound(fi);
      }
    }
    if ((w_tan || w_ttan) && have_fields) {
      for (int fi = 0; fi < nb; ++fi) {
        const auto& fv = (*fields)[static_cast<size_t>(fi)];
        double bmax = 0.0;
        for (std::int64_t i0 = 0; i0 < g.count[0]; ++i0) {
          bmax = std::max(bmax, std::abs(fv.at(i0, 0)));
          if (g.dim() == 2) bmax = std::max(bmax, std::abs(fv.at(i0, g.count[1] - 1)));
        }
        if (g.dim() == 2)
          for (std::int64_t i1 = 0; i1 < g.count[1]; ++i1) {
            bmax = std::max(bmax, std::abs(fv.at(0, i1)));
            bmax = std::max(bmax, std::abs(fv.at(g.count[0] - 1, i1)));
          }
        if (bmax > 1e-6 * std::max(ctx.fmax[static_cast<size_t>(fi)], 1e-300))
          tangential_boundary_flag = true;
      }
    }
    if (w_ap && trunc_here) {
      ctx.map_m =
          cover.matrix(eng.key_point(key), t - static_cast<double>(cfg.aperture_l) * dilation_j);
      ctx.map_inv = ctx.map_m.inverse();
    }
    return ctx;
  };

  const auto tg = cfg.t_grid();
  for (double t : tg) {
    const bool trunc_here = need_decay && t >= cfg.t0 - 1e-12;
    if (!plain_any && !trunc_here) continue;

    if (keys >= 2 * worker_count()) {
      // many keys: one worker per key block, fields built inside the worker
      parallel_for_ranges(static_cast<size_t>(keys), [&](size_t lo, size_t hi) {
        for (size_t k = lo; k < hi; ++k) {
          const auto key = static_cast<std::int64_t>(k);
          const auto fields = eng.build_fields(t, key);
          const SliceCtx ctx = make_ctx(t, key, plain_any, trunc_here, &fields);
          const KeyRange xr = key_x_range(g, cover.x_dependence(), key);
          gather(ctx, key, xr.lo, xr.hi);
        }
      });
    } else {
      // few keys: build fields once per key, parallelize the x gathers
      for (std::int64_t key = 0; key < keys; ++key) {
        const auto fields = eng.build_fields(t, key);
        const SliceCtx ctx = make_ctx(t, key, plain_any, trunc_here, &fields);
        const KeyRange xr = key_x_range(g, cover.x_dependence(), key);
        parallel_for_ranges(static_cast<size_t>(xr.hi - xr.lo), [&](size_t lo, size_t hi) {
          gather(ctx, key, xr.lo + static_cast<std::int64_t>(lo),
                 xr.lo + static_cast<std::int64_t>(hi));
        });
      }
    }
  }

  // assemble
  std::vector<std::map<MaximalKind, MaximalField>> out(static_cast<size_t>(nb));
  for (MaximalKind k : kinds) {
    for (int fi = 0; fi < nb; ++fi) {
      MaximalField mf;
      mf.kind = kind_name(k);
      mf.values = GridFunction(g);
      const Acc& a = acc[k][static_cast<size_t>(fi)];
      mf.values.v = a.val;
      if (eng.truncation_flagged()) mf.flags.push_back("kernel-tail-truncation-above-budget");
      if ((k == MaximalKind::tangential || k == MaximalKind::truncated_tangential) &&
          tangential_boundary_flag)
        mf.flags.push_back("grid-box-tangential-truncation");
      std::int64_t best = 0;
      for (std::int64_t i = 1; i < nx; ++i)
        if (a.val[static_cast<size_t>(i)] > a.val[static_cast<size_t>(best)]) best = i;
      mf.global_max = {best, a.wt[static_cast<size_t>(best)], a.wy[static_cast<size_t>(best)],
                       a.val[static_cast<size_t>(best)]};
      out[static_cast<size_t>(fi)][k] = std::move(mf);
    }
  }
  return out;
}

namespace {

MaximalField single(const GridFunction& f, const TestFunction& phi,
                    const AnisotropicCover& cover, const MaximalConfig& cfg,
                    MaximalKind kind) {
  auto r = compute_maximal_fields({&f}, phi, cover, cfg, {kind});
  return std::move(r[0][kind]);
}

}  // namespace

MaximalField radial_maximal(const GridFunction& f, const TestFunction& phi,
                            const AnisotropicCover& cover, const MaximalConfig& cfg) {
  return single(f, phi, cover, cfg, MaximalKind::radial);
}
MaximalField nontangential_maximal(const GridFunction& f, const TestFunction& phi,
                                   const AnisotropicCover& cover, const MaximalConfig& cfg) {
  return single(f, phi, cover, cfg, MaximalKind::nontangential);
}
MaximalField tangential_maximal(const GridFunction& f, const TestFunction& phi,
                                const AnisotropicCover& cover, const MaximalConfig& cfg) {
  return single(f, phi, cover, cfg, MaximalKind::tangential);
}
MaximalField truncated_radial(const GridFunction& f, const TestFunction& phi,
                              const AnisotropicCover& cover, const MaximalConfig& cfg) {
  return single(f, phi, cover, cfg, MaximalKind::truncated_radial);
}
MaximalField truncated_nontangential(const GridFunction& f, const TestFunction& phi,
                                     const AnisotropicCover& cover, const MaximalConfig& cfg) {
  return single(f, phi, cover, cfg, MaximalKind::truncated_nontangential);
}
MaximalField truncated_tangential(const GridFunction& f, const TestFunction& phi,
                                  const AnisotropicCover& cover, const MaximalConfig& cfg) {
  return single(f, phi, cover, cfg, MaximalKind::truncated_tangential);
}
MaximalField aperture_maximal(const GridFunction& f, const TestFunction& phi,
                              const AnisotropicCover& cover, const MaximalConfig& cfg) {
  return single(f, phi, cover, cfg, MaximalKind::aperture);
}

MaximalField aperture_maximal_custom(const GridSpec& grid, const AnisotropicCover& cover,
                                     const MaximalConfig& cfg, const BaseField& field) {
  cfg.validate();
  const int dilation_j = cfg.aperture_l > 0 ? cover.params().J : 0;
  MaximalField mf;
  mf.kind = "aperture";
  mf.values = GridFunction(grid);
  std::vector<double> wt(static_cast<size_t>(grid.size()), 0.0);
  std::vector<std::int64_t> wy(static_cast<size_t>(grid.size()), -1);

  const auto tg = cfg.t_grid();
  parallel_for_ranges(static_cast<size_t>(grid.size()), [&](size_t lo, size_t hi) {
    for (size_t xf = lo; xf < hi; ++xf) {
      const Vec x = grid.point_at(static_cast<std::int64_t>(xf));
      double best = 0.0;
      double best_t = 0.0;
      std::int64_t best_y = -1;
      for (double t : tg) {
        if (t < cfg.t0 - 1e-12) continue;
        const Mat m = cover.matrix(x, t - static_cast<double>(cfg.aperture_l) * dilation_j);
        const Mat minv = m.inverse();
        const IdxBox ib = ellipsoid_index_box(grid, x, m);
        for (std::int64_t j0 = ib.lo0; j0 <= ib.hi0; ++j0) {
          for (std::int64_t j1 = ib.lo1; j1 <= ib.hi1; ++j1) {
            const std::int64_t yf = grid.index(j0, j1);
            const Vec y = grid.point(j0, j1);
            if (yf != static_cast<std::int64_t>(xf) && minv.apply(y - x).norm() >= 1.0)
              continue;
            const double v = field(x, y, t);
            if (v > best) {
              best = v;
              best_t = t;
              best_y = yf;
            }
          }
        }
      }
      mf.values.v[xf] = best;
      wt[xf] = best_t;
      wy[xf] = best_y;
    }
  });
  std::int64_t bi = 0;
  for (std::int64_t i = 1; i < grid.size(); ++i)
    if (mf.values.v[static_cast<size_t>(i)] > mf.values.v[static_cast<size_t>(bi)]) bi = i;
  mf.global_max = {bi, wt[static_cast<size_t>(bi)], wy[static_cast<size_t>(bi)],
                   mf.values.v[static_cast<size_t>(bi)]};
  return mf;
}

MaximalField hl_maximal(const GridFunction& f, const AnisotropicCover& cover,
                        const MaximalConfig& cfg) {
  cfg.validate();
  const GridSpec& g = f.g;
  if (g.dim() != cover.dim())
    throw std::invalid_argument("hl_maximal: grid/cover dimension mismatch");
  MaximalField mf;
  mf.kind = "hl";
  mf.values = GridFunction(g);
  std::vector<double> wt(static_cast<size_t>(g.size()), 0.0);
  bool skipped_scale = false;

  const int n = g.dim();
  const int corners = 1 << n;
  const int subs = n == 1 ? 4 : 16;
  static const double kSub[4] = {-0.375, -0.125, 0.125, 0.375};

  const auto tg = cfg.t_grid();
  parallel_for_ranges(static_cast<size_t>(g.size()), [&](size_t lo, size_t hi) {
    for (size_t xf = lo; xf < hi; ++xf) {
      const Vec x = g.point_at(static_cast<std::int64_t>(xf));
      double best = 0.0;
      double best_t = 0.0;
      for (double t : tg) {
        const Mat m = cover.matrix(x, t);
        const Mat minv = m.inverse();
        // half-cell margin: boundary cells keep sub-sample weight even when
        // their center sits outside the ellipsoid bbox
        const IdxBox ib = ellipsoid_index_box(g, x, m, 0.5);
        double num = 0.0, den = 0.0;
        for (std::int64_t j0 = ib.lo0; j0 <= ib.hi0; ++j0) {
          for (std::int64_t j1 = ib.lo1; j1 <= ib.hi1; ++j1) {
            const Vec z = g.point(j0, j1);
            // quick accept: every cell corner strictly inside (convexity)
            bool all_in = true;
            for (int c = 0; c < corners; ++c) {
              Vec corner = z;
              corner.c[0] += (c & 1) ? 0.5 * g.h[0] : -0.5 * g.h[0];
              if (n == 2) corner.c[1] += (c & 2) ? 0.5 * g.h[1] : -0.5 * g.h[1];
              if (minv.apply(corner - x).norm() >= 1.0) {
                all_in = false;
                break;
              }
            }
            double w = 1.0;
            if (!all_in) {
              int inside = 0;
              if (n == 1) {
                for (int a = 0; a < 4; ++a) {
                  Vec p = z;
                  p.c[0] += kSub[a] * g.h[0];
                  if (minv.apply(p - x).norm() < 1.0) ++inside;
                }
              } else {
                for (int a = 0; a < 4; ++a)
                  for (int b = 0; b < 4; ++b) {
                    Vec p = z;
                    p.c[0] += kSub[a] * g.h[0];
                    p.c[1] += kSub[b] * g.h[1];
                    if (minv.apply(p - x).norm() < 1.0) ++inside;
                  }
              }
              if (inside == 0) continue;
              w = static_cast<double>(inside) / subs;
            }
            num += w * std::abs(f.at(j0, j1));
            den += w;
          }
        }
        if (den <= 0.0) {
          skipped_scale = true;
          continue;
        }
        // denominator: the measured cell weight, floored by the exact volume.
        // The floor keeps box-straddling ellipsoids honest (the unseen part
        // averages in as zero) while the measured part keeps sub-cell scales
        // from overshooting: constants reproduce exactly.
        const double cellw = g.cell_volume();
        const double volume = std::abs(m.det()) * unit_ball_volume(n);
        const double avg = (num * cellw) / std::max(den * cellw, volume);
        if (avg > best) {
          best = avg;
          best_t = t;
        }
      }
      mf.values.v[xf] = best;
      wt[xf] = best_t;
    }
  });
  if (skipped_scale) mf.flags.push_back("sub-cell-ellipsoid-scale-skipped");
  std::int64_t bi = 0;
  for (std::int64_t i = 1; i < g.size(); ++i)
    if (mf.values.v[static_cast<size_t>(i)] > mf.values.v[static_cast<size_t>(bi)]) bi = i;
  mf.global_max = {bi, wt[static_cast<size_t>(bi)], bi, mf.values.v[static_cast<size_t>(bi)]};
  return mf;
}

SeminormSpec grand_orders(const AnisotropicCover& cover, const MaximalConfig& cfg) {
  const CoverParams& p = cover.params();
  const int np_min = minimal_grand_order(p, cover.dim(), cfg.p);
  const int np = cfg.Np > 0 ? cfg.Np : np_min;
  if (np < np_min)
    throw std::invalid_argument("config: Np below the minimal admissible grand order");
  const int nt_min = minimal_grand_weight(p, np);
  const int nt = cfg.Ntilde_p > 0 ? cfg.Ntilde_p : nt_min;
  if (nt < nt_min)
    throw std::invalid_argument("config: Ntilde_p below the minimal admissible weight");
  return SeminormSpec(np, nt);
}

std::vector<TestFunction> default_dictionary(int dim, const SeminormSpec& spec) {
  std::vector<TestFunction> raw;
  raw.push_back(TestFunction::gaussian(dim));
  raw.push_back(TestFunction::hermite_gaussian(dim, {0.0, 2.0}));
  raw.push_back(TestFunction::hermite_gaussian(dim, {-2.0, 0.0, 4.0}));
  if (spec.N <= 6) {
    raw.push_back(TestFunction::bump(dim));
  } else {
    // the bump's closed-form derivatives stop at order 6
    raw.push_back(TestFunction::hermite_gaussian(dim, {0.0, -12.0, 0.0, 8.0}));
  }
  std::vector<TestFunction> dict;
  dict.reserve(raw.size());
  for (const auto& k : raw) dict.push_back(k.scaled(1.0 / seminorm(k, spec)));
  return dict;
}

namespace {

MaximalField grand_impl(const GridFunction& f, const AnisotropicCover& cover,
                        const MaximalConfig& cfg, const std::vector<TestFunction>& dict,
                        MaximalKind inner, const char* name) {
  if (dict.empty()) throw std::invalid_argument("grand maximal: empty dictionary");
  MaximalField out;
  out.kind = name;
  bool first = true;
  for (const auto& k : dict) {
    MaximalField part = single(f, k, cover, cfg, inner);
    if (first) {
      out.values = std::move(part.values);
      out.global_max = part.global_max;
      first = false;
    } else {
      for (size_t i = 0; i < out.values.v.size(); ++i)
        out.values.v[i] = std::max(out.values.v[i], part.values.v[i]);
      if (part.global_max.value > out.global_max.value) out.global_max = part.global_max;
    }
    for (const auto& fl : part.flags)
      if (std::find(out.flags.begin(), out.flags.end(), fl) == out.flags.end())
        out.flags.push_back(fl);
  }
  out.flags.push_back("finite-dictionary-lower-bound");
  return out;
}

}  // namespace

MaximalField grand_radial_maximal(const GridFunction& f, const AnisotropicCover& cover,
                                  const MaximalConfig& cfg,
                                  const std::vector<TestFunction>& dictionary) {
  return grand_impl(f, cover, cfg, dictionary, MaximalKind::radial, "grand_radial");
}

MaximalField grand_nontangential_maximal(const GridFunction& f,
                                         const AnisotropicCover& cover,
                                         const MaximalConfig& cfg,
                                         const std::vector<TestFunction>& dictionary) {
  return grand_impl(f, cover, cfg, dictionary, MaximalKind::nontangential,
                    "grand_nontangential");
}

}  // namespace aniso
