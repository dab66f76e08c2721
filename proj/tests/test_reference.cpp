#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "speclab/reference.hpp"

using namespace speclab::reference;
constexpr double pi = std::numbers::pi;

TEST_CASE("Bessel values against the power series") {
  for (int n = 0; n <= 4; ++n)
    for (double x : {0.1, 1.0, 2.5, 5.0, 9.3, 14.0})
      CHECK(bessel_j(n, x) == doctest::Approx(oracle::bessel_series(n, x)).epsilon(1e-11).scale(1.0));
}

TEST_CASE("Bessel zeros against bisection on the series") {
  const auto z0 = bessel_j_zeros(0, 3);
  CHECK(z0[0] == doctest::Approx(oracle::bessel_zero(0, 2.0, 3.0)).epsilon(1e-12));
  CHECK(z0[1] == doctest::Approx(oracle::bessel_zero(0, 5.0, 6.0)).epsilon(1e-12));
  CHECK(z0[2] == doctest::Approx(oracle::bessel_zero(0, 8.0, 9.0)).epsilon(1e-12));
  const auto z1 = bessel_j_zeros(1, 2);
  CHECK(z1[0] == doctest::Approx(oracle::bessel_zero(1, 3.5, 4.0)).epsilon(1e-12));
  CHECK(z1[1] == doctest::Approx(oracle::bessel_zero(1, 7.0, 7.2)).epsilon(1e-12));
  const auto below = bessel_j_zeros_below(2, 10.0);
  REQUIRE(below.size() == 2);
  CHECK(below[0] == doctest::Approx(oracle::bessel_zero(2, 5.0, 5.3)).epsilon(1e-12));
}

TEST_CASE("spherical Bessel zeros") {
  // j_0(x) = sin x / x
  const auto z = spherical_bessel_j_zeros_below(0, 10.0);
  REQUIRE(z.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(z[i] == doctest::Approx((i + 1) * pi).epsilon(1e-12));
  CHECK(spherical_bessel_j(1, 2.0) == doctest::Approx(std::sin(2.0) / 4.0 - std::cos(2.0) / 2.0));
}

TEST_CASE("disk and two-ball spectra") {
  const double j01 = oracle::bessel_zero(0, 2.0, 3.0), j11 = oracle::bessel_zero(1, 3.5, 4.0);
  const double j21 = oracle::bessel_zero(2, 5.0, 5.3), j02 = oracle::bessel_zero(0, 5.0, 6.0);
  const auto b = ball_spectrum(2, 1.0, 6);
  REQUIRE(b.size() == 6);
  CHECK(b[0] == doctest::Approx(j01 * j01));
  CHECK(b[1] == doctest::Approx(j11 * j11));
  CHECK(b[2] == doctest::Approx(j11 * j11));
  CHECK(b[3] == doctest::Approx(j21 * j21));
  CHECK(b[5] == doctest::Approx(j02 * j02));
  const auto th = theta_spectrum(2, 4);
  // two balls of half the area: every disk eigenvalue doubled, twice
  CHECK(th[0] == doctest::Approx(2 * j01 * j01));
  CHECK(th[1] == doctest::Approx(2 * j01 * j01));
  CHECK(th[2] == doctest::Approx(2 * j11 * j11));
  CHECK(th[3] == doctest::Approx(2 * j11 * j11));
  const double radii[] = {1.0, 0.5};
  const auto m = balls_spectrum(2, radii, 3);
  CHECK(m[0] == doctest::Approx(j01 * j01));
  CHECK(m[1] == doctest::Approx(j11 * j11));
  CHECK(m[2] == doctest::Approx(j11 * j11));
}

TEST_CASE("three-dimensional ball") {
  const auto b = ball_spectrum(3, 1.0, 4);
  CHECK(b[0] == doctest::Approx(pi * pi));
  // l = 1 zero, triple
  CHECK(b[1] == doctest::Approx(b[3]));
  CHECK(b[1] == doctest::Approx(std::pow(4.493409457909064, 2)).epsilon(1e-9));
}

TEST_CASE("rectangle spectrum") {
  const auto r = rectangle_spectrum(2.0, 1.0, 3);
  CHECK(r[0] == doctest::Approx(pi * pi * (0.25 + 1.0)));
  CHECK(r[1] == doctest::Approx(pi * pi * (1.0 + 1.0)));
  CHECK(r[2] == doctest::Approx(pi * pi * (2.25 + 1.0)));
}

TEST_CASE("volume split reduces to the two-ball set") {
  const auto th = theta_spectrum(2, 6);
  for (int k = 1; k <= 6; ++k) CHECK(volume_split_eigenvalue(2, 0.0, k) == doctest::Approx(th[k - 1]));
  const double j01 = oracle::bessel_zero(0, 2.0, 3.0);
  // balls of area 0.6 pi and 0.4 pi
  CHECK(volume_split_eigenvalue(2, 0.1, 1) == doctest::Approx(j01 * j01 / 0.6));
  CHECK(volume_split_eigenvalue(2, 0.1, 2) == doctest::Approx(j01 * j01 / 0.4));
}

TEST_CASE("torsion closed forms") {
  CHECK(ball_torsion(2, 1.0) == doctest::Approx(pi / 8));
  CHECK(ball_torsion_sup(2, 1.0) == doctest::Approx(0.25));
  CHECK(ball_torsion(3, 1.0) == doctest::Approx(4 * pi / 45));
  CHECK(theta_torsion(2) == doctest::Approx(pi / 16));
  CHECK(theta_boundary_gradient(2) == doctest::Approx(std::sqrt(0.5) / 2));
  CHECK(torsion_volume_constant(2) == doctest::Approx(0.625));
  CHECK(eigen_torsion_constant() == doctest::Approx(std::exp(1 / (4 * pi))));
  CHECK(cheng_yang_factor(2, 4) == doctest::Approx(12.0));
}

TEST_CASE("reference bundle") {
  const auto r = references(2, 6);
  CHECK(r.measure == doctest::Approx(pi));
  CHECK(r.ball.size() == 6);
  CHECK(r.theta[0] == doctest::Approx(2 * r.ball[0]));
  CHECK(r.torsion_theta == doctest::Approx(r.torsion_ball / 2));
}
