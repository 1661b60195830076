#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aniso/geometry.hpp"

using namespace aniso;

TEST_CASE("matrix determinant, inverse, products") {
  Mat a = Mat::diag(2.0, 0.5);
  CHECK(a.det() == doctest::Approx(1.0));
  Mat ai = a.inverse();
  CHECK(ai(0, 0) == doctest::Approx(0.5));
  CHECK(ai(1, 1) == doctest::Approx(2.0));
  Mat id = a.mul(ai);
  CHECK(id(0, 0) == doctest::Approx(1.0));
  CHECK(id(0, 1) == doctest::Approx(0.0));

  Mat g;
  g.n = 2;
  g.a = {1.0, 2.0, 3.0, 4.0};
  CHECK(g.det() == doctest::Approx(-2.0));
  Mat gi = g.inverse();
  Mat gg = g.mul(gi);
  CHECK(gg(0, 0) == doctest::Approx(1.0));
  CHECK(gg(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("operator norm matches the largest singular value") {
  // diagonal: max |entry|
  CHECK(Mat::diag(3.0, -5.0).op_norm() == doctest::Approx(5.0));
  CHECK(Mat::diag(3.0, -5.0).sigma_min() == doctest::Approx(3.0));

  // rotation leaves the norm at 1
  const double c = std::cos(0.7), s = std::sin(0.7);
  Mat r;
  r.n = 2;
  r.a = {c, -s, s, c};
  CHECK(r.op_norm() == doctest::Approx(1.0));
  CHECK(r.sigma_min() == doctest::Approx(1.0));

  // shear [1 1; 0 1]: singular values ((sqrt5 +- 1)/2)
  Mat sh;
  sh.n = 2;
  sh.a = {1.0, 1.0, 0.0, 1.0};
  CHECK(sh.op_norm() == doctest::Approx((std::sqrt(5.0) + 1.0) / 2.0));
  CHECK(sh.sigma_min() == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0));

  // 1-D
  Mat one = Mat::scalar(1, -0.25);
  CHECK(one.op_norm() == doctest::Approx(0.25));
}

TEST_CASE("op_norm as a sup over directions (oracle)") {
  Mat m;
  m.n = 2;
  m.a = {0.3, 1.7, -0.4, 0.9};
  double best = 0.0;
  for (int k = 0; k < 4096; ++k) {
    const double ang = 2.0 * kPi * k / 4096.0;
    Vec u(std::cos(ang), std::sin(ang));
    best = std::max(best, m.apply(u).norm());
  }
  CHECK(m.op_norm() == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("bbox half extents are row norms") {
  Mat m;
  m.n = 2;
  m.a = {3.0, 4.0, 0.0, 1.0};
  CHECK(m.bbox_half_extent(0) == doctest::Approx(5.0));
  CHECK(m.bbox_half_extent(1) == doctest::Approx(1.0));
}

TEST_CASE("unit ball volumes") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
  CHECK(unit_ball_volume(2) == doctest::Approx(kPi));
  CHECK_THROWS(unit_ball_volume(3));
}
