#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aniso/maximal.hpp"
#include "oracle.hpp"

using namespace aniso;

namespace {

TestFunction mass_one_gaussian(int dim) {
  auto g = TestFunction::gaussian(dim);
  return g.scaled(1.0 / g.mass());
}

GridFunction indicator(const GridSpec& g) {
  if (g.dim() == 1)
    return GridFunction::sample(g, [](const Vec& z) { return std::abs(z[0]) <= 1.0 ? 1.0 : 0.0; });
  return GridFunction::sample(g, [](const Vec& z) {
    return std::abs(z[0]) <= 1.0 && std::abs(z[1]) <= 1.0 ? 1.0 : 0.0;
  });
}

MaximalConfig small_cfg() {
  MaximalConfig cfg;
  cfg.t_min = -3.0;
  cfg.t_max = 2.0;
  cfg.t_step = 5.0 / 7.0;  // 8 levels
  cfg.N = 2;
  cfg.Ntilde = 4;
  cfg.L = 1.0;
  cfg.t0 = -2.0;
  cfg.aperture_l = 1;
  return cfg;
}

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.v.size(); ++i) worst = std::max(worst, std::abs(a.v[i] - b.v[i]));
  return worst;
}

}  // namespace

TEST_CASE("all engines match the brute-force oracle on a 32-point grid") {
  const GridSpec g = GridSpec::regular(Box::interval(-8.0, 8.0), 32);
  const GridFunction f = indicator(g);
  const auto cover = AnisotropicCover::isotropic(1);
  const auto phi = mass_one_gaussian(1);
  const MaximalConfig cfg = small_cfg();

  auto fields = compute_maximal_fields(
      {&f}, phi, cover, cfg,
      {MaximalKind::radial, MaximalKind::nontangential, MaximalKind::tangential,
       MaximalKind::truncated_radial, MaximalKind::truncated_nontangential,
       MaximalKind::truncated_tangential, MaximalKind::aperture});

  CHECK(max_abs_diff(fields[0][MaximalKind::radial].values, oracle::radial(f, phi, cover, cfg)) <
        1e-10);
  CHECK(max_abs_diff(fields[0][MaximalKind::nontangential].values,
                     oracle::nontangential(f, phi, cover, cfg)) < 1e-10);
  CHECK(max_abs_diff(fields[0][MaximalKind::tangential].values,
                     oracle::tangential(f, phi, cover, cfg)) < 1e-10);
  CHECK(max_abs_diff(fields[0][MaximalKind::truncated_radial].values,
                     oracle::truncated(f, phi, cover, cfg, MaximalKind::truncated_radial)) <
        1e-10);
  CHECK(max_abs_diff(
            fields[0][MaximalKind::truncated_nontangential].values,
            oracle::truncated(f, phi, cover, cfg, MaximalKind::truncated_nontangential)) <
        1e-10);
  CHECK(max_abs_diff(fields[0][MaximalKind::truncated_tangential].values,
                     oracle::truncated(f, phi, cover, cfg, MaximalKind::truncated_tangential)) <
        1e-10);
  CHECK(max_abs_diff(fields[0][MaximalKind::aperture].values,
                     oracle::aperture(f, phi, cover, cfg)) < 1e-10);
  CHECK(max_abs_diff(hl_maximal(f, cover, cfg).values, oracle::hl(f, cover, cfg)) < 1e-10);
}

TEST_CASE("oracle agreement on a small 2-D variable-cover grid") {
  const GridSpec g = GridSpec::regular(Box::square(-4.0, 4.0), 16, 16);
  const GridFunction f = indicator(g);
  const auto cover = AnisotropicCover::variable_diagonal(BField{});
  const auto phi = mass_one_gaussian(2);
  MaximalConfig cfg = small_cfg();
  cfg.t_min = -2.0;
  cfg.t_max = 2.0;
  cfg.t_step = 1.0;

  auto fields = compute_maximal_fields(
      {&f}, phi, cover, cfg,
      {MaximalKind::radial, MaximalKind::nontangential, MaximalKind::tangential});
  CHECK(max_abs_diff(fields[0][MaximalKind::radial].values, oracle::radial(f, phi, cover, cfg)) <
        1e-10);
  CHECK(max_abs_diff(fields[0][MaximalKind::nontangential].values,
                     oracle::nontangential(f, phi, cover, cfg)) < 1e-10);
  CHECK(max_abs_diff(fields[0][MaximalKind::tangential].values,
                     oracle::tangential(f, phi, cover, cfg)) < 1e-10);
  CHECK(max_abs_diff(hl_maximal(f, cover, cfg).values, oracle::hl(f, cover, cfg)) < 1e-10);
}

TEST_CASE("radial maximal: zero input, mollifier value, translation invariance") {
  const auto cover = AnisotropicCover::isotropic(1);
  const auto phi = mass_one_gaussian(1);
  const GridSpec g = GridSpec::regular(Box::interval(-8.0, 8.0), 1024);

  MaximalConfig cfg;
  cfg.t_min = -6.0;
  cfg.t_max = 8.0;
  cfg.t_step = 0.1;

  GridFunction zero(g);
  auto rz = radial_maximal(zero, phi, cover, cfg);
  for (double v : rz.values.v) CHECK(v == 0.0);

  const GridFunction f = indicator(g);
  auto r = radial_maximal(f, phi, cover, cfg);
  const std::int64_t center = 512;  // x = 0
  CHECK(r.values.v[center] == doctest::Approx(1.0).epsilon(2e-3));

  // translation by one grid cell (translation-invariant family)
  const GridFunction fs = GridFunction::sample(g, [&](const Vec& z) {
    return std::abs(z[0] - g.h[0]) <= 1.0 ? 1.0 : 0.0;
  });
  auto rs = radial_maximal(fs, phi, cover, cfg);
  for (std::int64_t i = 200; i < 800; i += 37)
    CHECK(rs.values.v[static_cast<size_t>(i + 1)] ==
          doctest::Approx(r.values.v[static_cast<size_t>(i)]).epsilon(1e-12));
}

TEST_CASE("pointwise chain and mass-one plateaus") {
  const GridSpec g = GridSpec::regular(Box::interval(-8.0, 8.0), 256);
  const auto cover = AnisotropicCover::isotropic(1);
  const auto phi = mass_one_gaussian(1);
  MaximalConfig cfg = small_cfg();
  cfg.N = 4;

  const GridFunction f = indicator(g);
  auto fields = compute_maximal_fields(
      {&f}, phi, cover, cfg,
      {MaximalKind::radial, MaximalKind::nontangential, MaximalKind::tangential});
  const auto& rad = fields[0][MaximalKind::radial].values;
  const auto& non = fields[0][MaximalKind::nontangential].values;
  const auto& tan = fields[0][MaximalKind::tangential].values;
  const double two_n = std::exp2(cfg.N);
  for (size_t i = 0; i < rad.v.size(); ++i) {
    CHECK(rad.v[i] <= non.v[i] * (1.0 + 1e-12) + 1e-15);
    CHECK(non.v[i] <= two_n * tan.v[i] * (1.0 + 1e-12) + 1e-15);
  }

  // f == 1: nontangential and tangential plateaus at 1 (t >= 0 keeps the
  // kernel well inside the box)
  MaximalConfig plateau = cfg;
  plateau.t_min = 0.0;
  plateau.t_max = 4.0;
  plateau.t_step = 0.5;
  GridFunction ones = GridFunction::sample(g, [](const Vec&) { return 1.0; });
  auto pf = compute_maximal_fields({&ones}, phi, cover, plateau,
                                   {MaximalKind::nontangential, MaximalKind::tangential});
  const std::int64_t inner_lo = 64, inner_hi = 192;  // |x| <= 4
  for (std::int64_t i = inner_lo; i < inner_hi; ++i) {
    CHECK(pf[0][MaximalKind::nontangential].values.v[static_cast<size_t>(i)] ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK(pf[0][MaximalKind::tangential].values.v[static_cast<size_t>(i)] ==
          doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("nontangential strictly exceeds radial off the plateau") {
  const GridSpec g = GridSpec::regular(Box::interval(-8.0, 8.0), 512);
  const auto cover = AnisotropicCover::isotropic(1);
  const auto phi = mass_one_gaussian(1);
  MaximalConfig cfg;
  cfg.t_min = -4.0;
  cfg.t_max = 6.0;
  cfg.t_step = 0.025;

  const GridFunction f = indicator(g);
  auto fields = compute_maximal_fields(
      {&f}, phi, cover, cfg, {MaximalKind::radial, MaximalKind::nontangential});
  const std::int64_t ix = 512 / 2 + static_cast<std::int64_t>(1.5 / g.h[0]);  // x = 1.5
  const double rad = fields[0][MaximalKind::radial].values.v[static_cast<size_t>(ix)];
  const double non = fields[0][MaximalKind::nontangential].values.v[static_cast<size_t>(ix)];
  CHECK(non > rad * 1.01);

  // 4x finer t-resolution: the sup only grows, and the gap stays small. The
  // nontangential value jumps when grid nodes enter the ellipsoid as t moves,
  // so the gap is first-order in t_step; 2e-3 is the frozen bound here.
  MaximalConfig fine = cfg;
  fine.t_step = cfg.t_step / 4.0;
  auto ref = compute_maximal_fields({&f}, phi, cover, fine,
                                    {MaximalKind::nontangential, MaximalKind::radial});
  const double non4 = ref[0][MaximalKind::nontangential].values.v[static_cast<size_t>(ix)];
  CHECK(non4 >= non - 1e-15);
  CHECK(non4 - non < 2e-3);
  // the radial sup is smooth in t and converges quadratically
  auto rad1 = fields[0][MaximalKind::radial].values.v[static_cast<size_t>(ix)];
  auto rad4 = ref[0][MaximalKind::radial].values.v[static_cast<size_t>(ix)];
  CHECK(rad4 - rad1 < 1e-4);
}

TEST_CASE("tangential decreases toward the nontangential cap as N grows") {
  const GridSpec g = GridSpec::regular(Box::interval(-8.0, 8.0), 128);
  const auto cover = AnisotropicCover::isotropic(1);
  const auto phi = mass_one_gaussian(1);
  const GridFunction f = indicator(g);

  GridFunction prev;
  bool first = true;
  for (int n : {2, 4, 8}) {
    MaximalConfig cfg = small_cfg();
    cfg.N = n;
    cfg.Ntilde = 2 * n;
    auto tg = tangential_maximal(f, phi, cover, cfg);
    if (!first)
      for (size_t i = 0; i < tg.values.v.size(); ++i)
        CHECK(tg.values.v[i] <= prev.v[i] * (1.0 + 1e-12));
    prev = tg.values;
    first = false;
  }
}

TEST_CASE("sub-linearity and homogeneity") {
  const GridSpec g = GridSpec::regular(Box::interval(-8.0, 8.0), 64);
  const auto cover = AnisotropicCover::isotropic(1);
  const auto phi = mass_one_gaussian(1);
  const MaximalConfig cfg = small_cfg();

  const GridFunction f = indicator(g);
  const GridFunction gg = GridFunction::sample(g, [](const Vec& z) { return std::exp(-z.norm_sq()); });
  GridFunction sum(g);
  for (size_t i = 0; i < sum.v.size(); ++i) sum.v[i] = f.v[i] + gg.v[i];

  auto mf = radial_maximal(f, phi, cover, cfg).values;
  auto mg = radial_maximal(gg, phi, cover, cfg).values;
  auto ms = radial_maximal(sum, phi, cover, cfg).values;
  for (size_t i = 0; i < ms.v.size(); ++i)
    CHECK(ms.v[i] <= mf.v[i] + mg.v[i] + 1e-12);

  GridFunction scaled(g);
  for (size_t i = 0; i < scaled.v.size(); ++i) scaled.v[i] = -3.0 * f.v[i];
  auto msc = radial_maximal(scaled, phi, cover, cfg).values;
  for (size_t i = 0; i < msc.v.size(); ++i)
    CHECK(msc.v[i] == doctest::Approx(3.0 * mf.v[i]).epsilon(1e-13));
}

TEST_CASE("t-grid refinement never decreases values") {
  const GridSpec g = GridSpec::regular(Box::interval(-8.0, 8.0), 128);
  const auto cover = AnisotropicCover::isotropic(1);
  const auto phi = mass_one_gaussian(1);
  const GridFunction f = indicator(g);

  MaximalConfig coarse = small_cfg();
  MaximalConfig fine = coarse;
  fine.t_step = coarse.t_step / 2.0;
  auto vc = radial_maximal(f, phi, cover, coarse).values;
  auto vf = radial_maximal(f, phi, cover, fine).values;
  for (size_t i = 0; i < vc.v.size(); ++i) CHECK(vf.v[i] >= vc.v[i] - 1e-15);

  // convergence gate: one more halving changes the L^1 norm by < 1%
  MaximalConfig finer = fine;
  finer.t_step = fine.t_step / 2.0;
  auto vff = radial_maximal(f, phi, cover, finer).values;
  const double n1 = vf.lp_quasi_norm(1.0), n2 = vff.lp_quasi_norm(1.0);
  CHECK(std::abs(n1 - n2) / n2 < 0.01);
}

TEST_CASE("hl maximal closed-form values for the unit-interval indicator") {
  const auto cover = AnisotropicCover::isotropic(1);
  const GridSpec g = GridSpec::regular(Box::interval(-4.0, 4.0), 256);
  MaximalConfig cfg;
  cfg.t_min = -6.0;
  cfg.t_max = 8.0;
  cfg.t_step = 0.05;
  const GridFunction f = GridFunction::sample(
      g, [](const Vec& z) { return z[0] >= 0.0 && z[0] <= 1.0 ? 1.0 : 0.0; });
  auto field = hl_maximal(f, cover, cfg).values;

  const std::int64_t ix2 = 192;  // x = 2
  CHECK(field.v[static_cast<size_t>(ix2)] == doctest::Approx(0.25).epsilon(0.02));
  const std::int64_t ix_half = 144;  // x = 0.5
  CHECK(field.v[static_cast<size_t>(ix_half)] == doctest::Approx(1.0).epsilon(0.02));

  // constant input reproduces the constant exactly up to quadrature
  GridFunction c = GridFunction::sample(g, [](const Vec&) { return 0.7; });
  auto fc = hl_maximal(c, cover, cfg).values;
  for (double v : fc.v) CHECK(v == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("aperture maximal: coincidence at l = 0 and monotonicity in l") {
  const GridSpec g = GridSpec::regular(Box::interval(-8.0, 8.0), 128);
  const auto cover = AnisotropicCover::isotropic(1);
  const auto phi = mass_one_gaussian(1);
  const GridFunction f = indicator(g);

  MaximalConfig cfg = small_cfg();
  cfg.L = 0.0;
  cfg.t0 = cfg.t_min - 0.5;  // t0 below every level: no truncation effect
  cfg.aperture_l = 0;
  auto ap0 = aperture_maximal(f, phi, cover, cfg).values;
  auto non = nontangential_maximal(f, phi, cover, cfg).values;
  for (size_t i = 0; i < ap0.v.size(); ++i)
    CHECK(ap0.v[i] == doctest::Approx(non.v[i]).epsilon(1e-10));

  MaximalConfig cfg1 = cfg;
  cfg1.aperture_l = 1;
  auto ap1 = aperture_maximal(f, phi, cover, cfg1).values;
  MaximalConfig cfg2 = cfg;
  cfg2.aperture_l = 2;
  auto ap2 = aperture_maximal(f, phi, cover, cfg2).values;
  for (size_t i = 0; i < ap1.v.size(); ++i) {
    CHECK(ap1.v[i] >= ap0.v[i] - 1e-15);
    CHECK(ap2.v[i] >= ap1.v[i] - 1e-15);
  }
}

TEST_CASE("truncated operators reduce to plain ones at L = 0, t0 below range") {
  const GridSpec g = GridSpec::regular(Box::interval(-8.0, 8.0), 128);
  const auto cover = AnisotropicCover::isotropic(1);
  const auto phi = mass_one_gaussian(1);
  const GridFunction f = indicator(g);

  MaximalConfig cfg = small_cfg();
  cfg.L = 0.0;
  cfg.t0 = cfg.t_min - 0.5;
  auto fields = compute_maximal_fields(
      {&f}, phi, cover, cfg,
      {MaximalKind::radial, MaximalKind::truncated_radial, MaximalKind::nontangential,
       MaximalKind::truncated_nontangential, MaximalKind::tangential,
       MaximalKind::truncated_tangential});
  CHECK(max_abs_diff(fields[0][MaximalKind::radial].values,
                     fields[0][MaximalKind::truncated_radial].values) < 1e-10);
  CHECK(max_abs_diff(fields[0][MaximalKind::nontangential].values,
                     fields[0][MaximalKind::truncated_nontangential].values) < 1e-10);
  CHECK(max_abs_diff(fields[0][MaximalKind::tangential].values,
                     fields[0][MaximalKind::truncated_tangential].values) < 1e-10);

  // decreasing t0 (toward -inf) never decreases values at L = 0
  MaximalConfig higher = small_cfg();
  higher.L = 0.0;
  higher.t0 = -1.0;
  MaximalConfig lower = higher;
  lower.t0 = -3.0;
  auto vh = truncated_nontangential(f, phi, cover, higher).values;
  auto vl = truncated_nontangential(f, phi, cover, lower).values;
  for (size_t i = 0; i < vh.v.size(); ++i) CHECK(vl.v[i] >= vh.v[i] - 1e-15);
}

TEST_CASE("grand maximal dictionary behavior") {
  const GridSpec g = GridSpec::regular(Box::interval(-8.0, 8.0), 256);
  const auto cover = AnisotropicCover::isotropic(1);
  const GridFunction f = indicator(g);
  MaximalConfig cfg = small_cfg();

  const SeminormSpec spec = grand_orders(cover, cfg);
  CHECK(spec.N == 3);       // (max(1,1)*1+1)/(1*1) = 2 -> 3
  CHECK(spec.Ntilde == 5);  // (1*3+1)/1 = 4 -> 5

  const auto dict = default_dictionary(1, spec);
  REQUIRE(dict.size() == 4);
  for (const auto& k : dict) CHECK(seminorm(k, spec) <= 1.0 + 1e-9);

  // singleton dictionary equals the plain radial of that kernel
  const std::vector<TestFunction> solo = {dict[0]};
  auto grand1 = grand_radial_maximal(f, cover, cfg, solo).values;
  auto plain = radial_maximal(f, dict[0], cover, cfg).values;
  CHECK(max_abs_diff(grand1, plain) == 0.0);

  // enlarging the dictionary never decreases values
  auto grand4 = grand_radial_maximal(f, cover, cfg, dict).values;
  for (size_t i = 0; i < grand4.v.size(); ++i) CHECK(grand4.v[i] >= grand1.v[i]);

  // grand nontangential dominates grand radial
  auto gnon = grand_nontangential_maximal(f, cover, cfg, dict).values;
  for (size_t i = 0; i < gnon.v.size(); ++i) CHECK(gnon.v[i] >= grand4.v[i] - 1e-15);

  // label in the flags
  auto field = grand_radial_maximal(f, cover, cfg, dict);
  bool labeled = false;
  for (const auto& fl : field.flags)
    if (fl.find("lower-bound") != std::string::npos) labeled = true;
  CHECK(labeled);

  CHECK_THROWS(grand_radial_maximal(f, cover, cfg, {}));
}

TEST_CASE("grand radial against a 16-kernel oracle dictionary") {
  const GridSpec g = GridSpec::regular(Box::interval(-8.0, 8.0), 256);
  const auto cover = AnisotropicCover::isotropic(1);
  const GridFunction f = indicator(g);
  MaximalConfig cfg = small_cfg();
  cfg.t_step = 0.25;
  const SeminormSpec spec = grand_orders(cover, cfg);

  const auto dict4 = default_dictionary(1, spec);
  // a rich superset: more Hermite orders, rescaled Gaussians, rescaled bumps
  std::vector<TestFunction> dict16 = dict4;
  auto add = [&](TestFunction k) { dict16.push_back(k.scaled(1.0 / seminorm(k, spec))); };
  add(TestFunction::hermite_gaussian(1, {0.0, 0.0, 0.0, 8.0}));
  add(TestFunction::hermite_gaussian(1, {12.0, 0.0, -48.0, 0.0, 16.0}));
  add(TestFunction::gaussian(1, 1.0, 0.5));
  add(TestFunction::gaussian(1, 1.0, 2.0));
  add(TestFunction::gaussian(1, 1.0, 4.0));
  add(TestFunction::bump(1, 1.0, 0.5));
  add(TestFunction::bump(1, 1.0, 2.0));
  add(TestFunction::hermite_gaussian(1, {0.0, 2.0}, 2.0));
  add(TestFunction::hermite_gaussian(1, {1.0, 1.0}));
  add(TestFunction::hermite_gaussian(1, {0.0, 0.0, 4.0}));
  add(TestFunction::gaussian(1, 1.0, 8.0));
  add(TestFunction::bump(1, 1.0, 4.0));
  REQUIRE(dict16.size() == 16);

  auto g4 = grand_radial_maximal(f, cover, cfg, dict4).values;
  auto g16 = grand_radial_maximal(f, cover, cfg, dict16).values;
  for (double x : {0.0, 1.5, 3.0}) {
    const auto ix = static_cast<std::int64_t>(std::llround((x + 8.0) / g.h[0]));
    const double v4 = g4.v[static_cast<size_t>(ix)];
    const double v16 = g16.v[static_cast<size_t>(ix)];
    CHECK(v16 >= v4 - 1e-15);  // superset
    // frozen from the first validated run: the 4-kernel default tracks the
    // rich dictionary to within 25% at these probe points
    CHECK(v16 <= 1.25 * v4);
  }
}

TEST_CASE("lower semicontinuity probe for the aperture maximal") {
  const GridSpec g = GridSpec::regular(Box::interval(-8.0, 8.0), 128);
  const auto cover = AnisotropicCover::isotropic(1);
  const auto phi = mass_one_gaussian(1);
  const GridFunction f = indicator(g);
  MaximalConfig cfg = small_cfg();
  cfg.aperture_l = 1;
  auto field = aperture_maximal(f, phi, cover, cfg).values;

  for (std::int64_t i = 2; i < g.count[0] - 2; i += 5) {
    const double v = field.v[static_cast<size_t>(i)];
    if (v <= 0.0) continue;
    for (double frac : {0.90, 0.95, 0.99}) {
      const double lambda = v * frac;
      bool neighbor = false;
      for (std::int64_t d = -2; d <= 2; ++d) {
        if (d == 0) continue;
        if (field.v[static_cast<size_t>(i + d)] > lambda) neighbor = true;
      }
      CHECK(neighbor);
    }
  }
}

TEST_CASE("custom-field aperture maximal matches the built-in on the default field") {
  const GridSpec g = GridSpec::regular(Box::interval(-8.0, 8.0), 64);
  const auto cover = AnisotropicCover::isotropic(1);
  const auto phi = mass_one_gaussian(1);
  const GridFunction f = indicator(g);
  MaximalConfig cfg = small_cfg();
  cfg.aperture_l = 1;

  const Mat minv_t0_proto = cover.matrix(Vec(0.0), cfg.t0).inverse();
  auto base = [&](const Vec& x, const Vec& y, double t) {
    (void)x;
    const double w1 = std::pow(1.0 + minv_t0_proto.apply(y).norm(), -cfg.L);
    const double w2 = std::pow(1.0 + std::exp2(t + cfg.t0), -cfg.L);
    return std::abs(oracle::conv(f, phi, cover, x, t, y)) * w1 * w2;
  };
  auto custom = aperture_maximal_custom(g, cover, cfg, base).values;
  auto builtin = aperture_maximal(f, phi, cover, cfg).values;
  CHECK(max_abs_diff(custom, builtin) < 1e-10);
}
