#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "speclab/geometry.hpp"
#include "speclab/operators.hpp"
#include "speclab/reference.hpp"

using namespace speclab;
constexpr double pi = std::numbers::pi;

TEST_CASE("Laplacian stencil on a box") {
  const double h = 1.0 / 8;
  const auto g = rasterize(Shape::box(2, {0, 0, 0}, {1, 0.5, 0}), h);
  const auto A = assemble_laplacian(g);
  REQUIRE(A.size() == 32);
  CHECK(A.coeff(0, 0) == doctest::Approx(4 / (h * h)));
  CHECK(A.coeff(0, 1) == doctest::Approx(-1 / (h * h)));
  // corner row: two interior neighbours
  double row = 0.0;
  for (std::size_t j = 0; j < A.size(); ++j) row += A.coeff(0, j);
  CHECK(row == doctest::Approx(2 / (h * h)));
}

TEST_CASE("box spectrum equals the discrete sine formula") {
  const double h = 1.0 / 16;
  const auto g = rasterize(Shape::box(2, {0, 0, 0}, {1.0, 0.75, 0}), h);
  const auto ref = oracle::discrete_box_spectrum(16, 12, h, 8);
  const auto s = spectrum(g, 8);
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(s.eigenvalues[i] == doctest::Approx(ref[i]).epsilon(1e-8));
  REQUIRE(s.eigenfunctions.size() == 8);
  double nrm = 0.0;
  for (double v : s.eigenfunctions[0]) nrm += v * v * h * h;
  CHECK(nrm == doctest::Approx(1.0));
}

TEST_CASE("3-D box spectrum") {
  const double h = 1.0 / 8;
  const auto g = rasterize(Shape::box(3, {0, 0, 0}, {1, 1, 1}), h);
  const auto s = spectrum(g, 4);
  const double s1 = std::pow(std::sin(pi / 18), 2), s2 = std::pow(std::sin(2 * pi / 18), 2);
  CHECK(s.eigenvalues[0] == doctest::Approx(4 / (h * h) * 3 * s1).epsilon(1e-8));
  CHECK(s.eigenvalues[1] == doctest::Approx(4 / (h * h) * (2 * s1 + s2)).epsilon(1e-8));
  CHECK(s.eigenvalues[3] == doctest::Approx(s.eigenvalues[1]).epsilon(1e-8));
}

TEST_CASE("cluster detection") {
  const std::vector<double> v{1.0, 2.0, 2.0 + 1e-6, 2.0 - 1e-6, 3.0, 3.5};
  const auto c = detect_clusters(v);
  REQUIRE(c.size() == 4);
  CHECK(c[1].first == 1);
  CHECK(c[1].multiplicity == 3);
  CHECK(c[1].mean == doctest::Approx(2.0));
  CHECK(detect_clusters(v, 0.3).size() == 3);
}

TEST_CASE("extrapolated disk spectrum approaches the Bessel values") {
  const auto gen = [](double h) { return make_ball(1.0, {0, 0, 0}, h); };
  const auto s = spectrum_extrapolated(gen, 1.0 / 32, 4);
  const double j01 = oracle::bessel_zero(0, 2.0, 3.0), j11 = oracle::bessel_zero(1, 3.5, 4.0);
  CHECK(s.extrapolated);
  CHECK(s.eigenvalues[0] == doctest::Approx(j01 * j01).epsilon(0.005));
  CHECK(s.eigenvalues[1] == doctest::Approx(j11 * j11).epsilon(0.01));
  CHECK(s.eigenvalues[2] == doctest::Approx(j11 * j11).epsilon(0.01));
  // the extrapolation beats the fine level
  CHECK(std::abs(s.eigenvalues[0] - j01 * j01) < std::abs(s.fine[0] - j01 * j01));
  CHECK(s.error_estimate[0] == doctest::Approx(std::abs(s.fine[0] - s.coarse[0])));
  // the second eigenvalue of the disk is double
  const auto cl = s.clusters(1e-2);
  CHECK(cl[1].multiplicity == 2);
}

TEST_CASE("torsion of a square against the series") {
  const double h = 1.0 / 32;
  const auto gen = [](double hh) { return rasterize(Shape::box(2, {0, 0, 0}, {1, 1, 0}), hh); };
  const auto t = torsion_extrapolated(gen, h);
  CHECK(t.T == doctest::Approx(oracle::rectangle_torsion(1, 1)).epsilon(2e-3));
  CHECK(t.energy_T > 0.0);
}

TEST_CASE("torsion of the disk") {
  const auto gen = [](double hh) { return make_ball(1.0, {0, 0, 0}, hh); };
  const auto t = torsion_extrapolated(gen, 1.0 / 32);
  CHECK(t.T == doctest::Approx(pi / 8).epsilon(0.01));
  CHECK(t.sup_w == doctest::Approx(0.25).epsilon(0.02));
  // w is the discrete solution: A w = 1 on interior cells
  const auto g = make_ball(1.0, {0, 0, 0}, 1.0 / 16);
  const auto tr = torsion(g);
  const auto Aw = assemble_laplacian(g) * tr.w;
  for (double v : Aw) CHECK(v == doctest::Approx(1.0).epsilon(1e-7));
  double sum = 0.0;
  for (double v : tr.w) sum += v / 256.0;
  CHECK(tr.T == doctest::Approx(sum));
}

TEST_CASE("prolongation injects parent values") {
  const auto coarse = make_ball(0.8, {0, 0, 0}, 1.0 / 8);
  const auto fine = make_ball(0.8, {0, 0, 0}, 1.0 / 16);
  std::vector<double> one(coarse.cell_count(), 1.0);
  const auto p = prolongate(coarse, one, fine);
  REQUIRE(p.size() == fine.cell_count());
  std::size_t ones = 0;
  for (double v : p) {
    CHECK((v == 0.0 || v == 1.0));
    ones += v == 1.0;
  }
  CHECK(ones >= fine.cell_count() * 9 / 10);
}

TEST_CASE("lattice field is zero outside") {
  const auto g = make_ball(0.8, {0, 0, 0}, 1.0 / 16);
  const auto s = spectrum(g, 2);
  const auto f = s.lattice_field(0);
  REQUIRE(f.size() == g.frame().size());
  for (std::size_t c = 0; c < f.size(); ++c)
    if (!g.inside(c)) CHECK(f[c] == 0.0);
}

TEST_CASE("domain too small for k") {
  const auto g = rasterize(Shape::box(2, {0, 0, 0}, {0.25, 0.25, 0}), 1.0 / 8);
  CHECK_THROWS(spectrum(g, 4));
}
