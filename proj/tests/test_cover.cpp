#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aniso/cover.hpp"
#include "aniso/jsonio.hpp"
#include "aniso/parallel.hpp"

using namespace aniso;

TEST_CASE("matrix evaluation for the built-in families") {
  auto iso1 = AnisotropicCover::isotropic(1);
  CHECK(iso1.matrix(Vec(0.0), 0.0)(0, 0) == doctest::Approx(1.0));
  CHECK(iso1.matrix(Vec(3.0), -1.0)(0, 0) == doctest::Approx(2.0));

  auto iso2 = AnisotropicCover::isotropic(2);
  const Mat m = iso2.matrix(Vec(0.0, 0.0), 2.0);
  CHECK(m(0, 0) == doctest::Approx(0.5));
  CHECK(m(1, 1) == doctest::Approx(0.5));
  CHECK(m(0, 1) == 0.0);

  // variable diagonal with b(x) = (2 + sin x1)/4 at x = 0, t = 4
  BField b;  // defaults: offset 1/2, amplitude 1/4, frequency 1
  auto var = AnisotropicCover::variable_diagonal(b);
  const Mat mv = var.matrix(Vec(0.0, 0.0), 4.0);
  CHECK(mv(0, 0) == doctest::Approx(0.25));
  CHECK(mv(1, 1) == doctest::Approx(0.25));
  // t dependence through b: at x1 = pi/2, b = 3/4
  const Mat mv2 = var.matrix(Vec(kPi / 2.0, 0.0), 4.0);
  CHECK(mv2(0, 0) == doctest::Approx(std::exp2(-3.0)));
  CHECK(mv2(1, 1) == doctest::Approx(std::exp2(-1.0)));
}

TEST_CASE("ellipsoids: membership and volume") {
  auto iso1 = AnisotropicCover::isotropic(1);
  Ellipsoid e = iso1.ellipsoid_at(Vec(0.0), 1.0);
  CHECK(e.matrix(0, 0) == doctest::Approx(0.5));
  CHECK(e.contains(Vec(0.49)));
  CHECK_FALSE(e.contains(Vec(0.5)));  // strict

  Ellipsoid e2 = iso1.ellipsoid_at(Vec(3.0), -1.0);  // interval (1, 5)
  CHECK(e2.contains(Vec(1.01)));
  CHECK(e2.contains(Vec(4.99)));
  CHECK_FALSE(e2.contains(Vec(5.0)));

  Ellipsoid e3{Vec(0.0, 0.0), Mat::diag(2.0, 1.0)};
  CHECK(e3.contains(Vec(1.5, 0.0)));
  CHECK_FALSE(e3.contains(Vec(2.0, 0.0)));
  CHECK_FALSE(e3.contains(Vec(1.0, 0.9)));  // 0.25 + 0.81 > 1

  // variable diagonal has det = 2^{-t}, so |theta| = 2^{-t} pi
  auto var = AnisotropicCover::variable_diagonal(BField{});
  for (double t : {-2.0, 0.0, 3.0})
    CHECK(var.ellipsoid_at(Vec(0.7, -0.3), t).volume() == doctest::Approx(std::exp2(-t) * kPi));
}

TEST_CASE("volume identity vs Monte Carlo") {
  auto var = AnisotropicCover::variable_diagonal(BField{});
  const Ellipsoid e = var.ellipsoid_at(Vec(1.3, 0.4), 1.0);
  // sample the bbox
  const double ex0 = e.matrix.bbox_half_extent(0), ex1 = e.matrix.bbox_half_extent(1);
  Rng rng(42);
  const int n = 100000;
  int inside = 0;
  for (int i = 0; i < n; ++i) {
    Vec p(e.center[0] + rng.uniform(-ex0, ex0), e.center[1] + rng.uniform(-ex1, ex1));
    if (e.contains(p)) ++inside;
  }
  const double mc = 4.0 * ex0 * ex1 * inside / n;
  CHECK(mc == doctest::Approx(e.volume()).epsilon(0.02));
}

TEST_CASE("compute_J for the built-in families") {
  const Box box1 = Box::interval(-4.0, 4.0);
  auto iso1 = AnisotropicCover::isotropic(1);
  CHECK(iso1.compute_J(box1, -4.0, 4.0, 32) == 2);  // strict containment

  const Box box2 = Box::square(-4.0, 4.0);
  auto iso2 = AnisotropicCover::isotropic(2);
  CHECK(iso2.compute_J(box2, -4.0, 4.0, 32) == 3);

  // constant diagonal with exponents (1) reduces to isotropic 1-D
  auto cm = AnisotropicCover::constant_matrix({1.0});
  CHECK(cm.compute_J(box1, -4.0, 4.0, 32) == 2);

  // monotone: larger J keeps the containment
  auto contains_all = [&](const AnisotropicCover& c, int j) {
    Rng rng(7);
    for (int i = 0; i < 64; ++i) {
      const Vec x(rng.uniform(-4.0, 4.0));
      const double t = rng.uniform(-4.0, 4.0);
      const Mat m = c.matrix(x, t);
      const Ellipsoid outer = c.ellipsoid_at(x, t - j);
      for (double dir : {-1.0, 1.0})
        if (!outer.contains(x + m.apply(Vec(dir)) * 2.0)) return false;
    }
    return true;
  };
  CHECK(contains_all(iso1, 2));
  CHECK(contains_all(iso1, 3));
  CHECK(contains_all(iso1, 5));
}

TEST_CASE("validate_cover fits the expected constants") {
  const Box box1 = Box::interval(-4.0, 4.0);
  auto iso1 = AnisotropicCover::isotropic(1);
  auto rep = validate_cover(iso1, box1, -4.0, 3.0, 4000, 11);
  CHECK(rep.pass);
  CHECK(rep.fitted.a1 == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(rep.fitted.a2 == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(rep.fitted.a3 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.fitted.a5 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.fitted.a4 == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(rep.fitted.a6 == doctest::Approx(1.0).epsilon(1e-2));

  auto iso2 = AnisotropicCover::isotropic(2);
  auto rep2 = validate_cover(iso2, Box::square(-4.0, 4.0), -4.0, 3.0, 4000, 11);
  CHECK(rep2.pass);
  CHECK(rep2.fitted.a4 == doctest::Approx(0.5).epsilon(1e-2));
  CHECK(rep2.fitted.a6 == doctest::Approx(0.5).epsilon(1e-2));
  CHECK(rep2.fitted.a1 == doctest::Approx(kPi).epsilon(1e-9));

  CHECK_THROWS(validate_cover(iso1, box1, -4.0, 3.0, 50, 1));  // needs >= 100 samples
}

TEST_CASE("degenerate family is reported") {
  // diag(2^-t, 1): volume is fine but the second axis never contracts
  auto degenerate = AnisotropicCover::custom(
      2,
      [](const Vec&, double t) { return Mat::diag(std::exp2(-t), 1.0); },
      "degenerate", XDependence::none);
  auto rep = validate_cover(degenerate, Box::square(-4.0, 4.0), -4.0, 3.0, 4000, 11);
  CHECK_FALSE(rep.pass);
  CHECK(rep.fitted.a6 == doctest::Approx(0.0).epsilon(1e-6));
  bool found = false;
  for (const auto& v : rep.violations)
    if (v.what.find("a6") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("variable cover passes validation on the working range") {
  auto var = AnisotropicCover::variable_diagonal(BField{});
  auto rep = validate_cover(var, Box::square(-4.0, 4.0), -4.0, 3.0, 2000, 5);
  CHECK(rep.pass);
  CHECK(rep.fitted.a1 == doctest::Approx(kPi).epsilon(1e-9));
  CHECK(rep.fitted.a6 > 0.1);
}

TEST_CASE("pointwise continuity modulus") {
  std::vector<double> radii;
  for (int k = 1; k <= 10; ++k) radii.push_back(std::exp2(-k));

  auto iso2 = AnisotropicCover::isotropic(2);
  auto t1 = check_pointwise_continuity(iso2, Vec(0.3, -0.4), 1.0, radii);
  CHECK(t1.converged);
  CHECK_FALSE(t1.stalled);
  for (const auto& e : t1.entries) CHECK(e.modulus == 0.0);  // x-independent

  auto var = AnisotropicCover::variable_diagonal(BField{});
  auto t2 = check_pointwise_continuity(var, Vec(0.0, 0.0), 1.0, radii);
  CHECK(t2.converged);
  CHECK_FALSE(t2.stalled);
  // modulus ~ r * t * ln2 * |db/dx| * 2^{-t b}: linear in r at small r
  const double last = t2.entries.back().modulus;
  const double prev = t2.entries[t2.entries.size() - 2].modulus;
  CHECK(prev / last == doctest::Approx(2.0).epsilon(0.1));

  BField jumpy;
  jumpy.kind = BField::Kind::jump;
  auto dis = AnisotropicCover::variable_diagonal(jumpy);
  auto t3 = check_pointwise_continuity(dis, Vec(0.0, 0.0), 1.0, radii);
  CHECK(t3.stalled);

  CHECK_THROWS(check_pointwise_continuity(iso2, Vec(0.0, 0.0), 1.0, {0.1, 0.2}));
}

TEST_CASE("equivalence constants") {
  const Box box = Box::interval(-4.0, 4.0);
  auto iso = AnisotropicCover::isotropic(1);
  auto same = equivalence_constant(iso, iso, box, -3.0, 3.0, 200);
  REQUIRE(same.has_value());
  CHECK(*same == doctest::Approx(1.0));

  auto scaled = AnisotropicCover::isotropic(1, 2.0);
  auto c2 = equivalence_constant(iso, scaled, box, -3.0, 3.0, 200);
  REQUIRE(c2.has_value());
  CHECK(*c2 == doctest::Approx(2.0));

  // isotropic 2-D and variable diagonal agree at t = 0
  auto iso2 = AnisotropicCover::isotropic(2);
  auto var = AnisotropicCover::variable_diagonal(BField{});
  auto c3 = equivalence_constant(iso2, var, Box::square(-4.0, 4.0), 0.0, 0.0, 50);
  REQUIRE(c3.has_value());
  CHECK(*c3 == doctest::Approx(1.0));

  CHECK_THROWS(equivalence_constant(iso, iso2, box, -1.0, 1.0, 10));
}

TEST_CASE("nested scales for built-in families") {
  auto var = AnisotropicCover::variable_diagonal(BField{});
  const int j = var.params().J;
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const Vec x(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0));
    const double t = rng.uniform(-3.0, 3.0);
    const double s = rng.uniform(0.0, 3.0);
    const Ellipsoid inner = var.ellipsoid_at(x, t + s);
    const Ellipsoid outer = var.ellipsoid_at(x, t - j);
    for (int k = 0; k < 32; ++k) {
      const double ang = 2.0 * kPi * k / 32.0;
      const Vec probe = x + inner.matrix.apply(Vec(std::cos(ang), std::sin(ang)));
      CHECK(outer.contains(probe));
    }
  }
}

TEST_CASE("grand-maximal order formulas") {
  CoverParams p;
  p.a1 = p.a2 = 2.0;
  p.a3 = p.a5 = 1.0;
  p.a4 = p.a6 = 1.0;
  p.J = 2;
  // (max(1,1)*1 + 1)/(1*1) = 2 -> minimal integer strictly greater = 3
  CHECK(minimal_grand_order(p, 1, 1.0) == 3);
  // (1*3 + 1)/1 = 4 -> 5
  CHECK(minimal_grand_weight(p, 3) == 5);
  p.a4 = p.a6 = 0.5;
  // (1*2+1)/(0.5) = 6 -> 7
  CHECK(minimal_grand_order(p, 2, 1.0) == 7);
}

TEST_CASE("cover JSON round trip and validation report serialization") {
  json j = {{"dimension", 1}, {"family", "isotropic"}, {"params", {{"scale", 1.0}}}};
  auto cover = cover_from_json(j);
  CHECK(cover.dim() == 1);
  CHECK(cover.matrix(Vec(0.0), 0.0)(0, 0) == doctest::Approx(1.0));

  json jv = {{"dimension", 2},
             {"family", "variable_diagonal"},
             {"params", {{"b", {{"kind", "sine"}, {"offset", 0.5}, {"amplitude", 0.25}}}}}};
  auto var = cover_from_json(jv);
  CHECK(var.dim() == 2);

  json bad = {{"dimension", 1}, {"family", "nope"}};
  CHECK_THROWS(cover_from_json(bad));

  auto rep = validate_cover(AnisotropicCover::isotropic(1), Box::interval(-2.0, 2.0), -2.0,
                            2.0, 500, 9);
  json out = validation_to_json(rep);
  CHECK(out.at("pass").get<bool>());
  CHECK(out.contains("fitted"));
}

TEST_CASE("declared-parameter violations carry witnesses") {
  auto iso = AnisotropicCover::isotropic(1);
  CoverParams wrong = *iso.declared_params();
  wrong.a2 = 1.0;  // volume is exactly 2; declaring a2 = 1 must fail
  iso.set_declared_params(wrong);
  auto rep = validate_cover(iso, Box::interval(-2.0, 2.0), -2.0, 2.0, 500, 9);
  CHECK_FALSE(rep.pass);
  REQUIRE(!rep.violations.empty());
}
