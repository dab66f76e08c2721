#include <doctest.h>

#include <cmath>
#include <numbers>

#include "speclab/errors.hpp"
#include "speclab/geometry.hpp"
#include "speclab/nodal.hpp"

using namespace speclab;
constexpr double pi = std::numbers::pi;

TEST_CASE("connected components") {
  const double h = 1.0 / 16;
  const auto s = Shape::disjoint_union({Shape::ball(2, {-2, 0, 0}, 0.5), Shape::ball(2, {0, 0, 0}, 0.5),
                                        Shape::ball(2, {2, 0, 0}, 0.5)});
  const auto g = rasterize(s, h);
  const auto c = connected_components(g);
  REQUIRE(c.size() == 3);
  std::size_t total = 0;
  for (const auto& p : c) total += p.cell_count();
  CHECK(total == g.cell_count());
  CHECK(c[0].frame().center(c[0].interior_cells().front())[0] < -1.0);
  // diagonal contact is not a connection
  const auto diag = GridDomain(GridFrame{2, 1.0, {0, 0, 0}, {4, 4, 1}},
                               {0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0});
  CHECK(connected_components(diag).size() == 2);
}

TEST_CASE("nodal decomposition of a 2:1 rectangle") {
  const double h = 1.0 / 16;
  const auto g = rasterize(Shape::box(2, {0, 0, 0}, {2, 1, 0}), h);
  const auto s = spectrum(g, 3);
  const auto d = decompose(g, s);
  CHECK(d.source == DecompositionSource::nodal);
  CHECK(d.omega_plus.cell_count() == d.omega_minus.cell_count());
  CHECK(intersect(d.omega_plus, d.omega_minus).empty());
  // each half is a 16 x 16 block; its discrete first eigenvalue is known in
  // closed form and sits an O(h) distance below lambda_2 of the rectangle
  const double half = 8.0 / (h * h) * std::pow(std::sin(std::numbers::pi / 34), 2);
  CHECK(d.lambda1_plus == doctest::Approx(half).epsilon(1e-8));
  CHECK(d.lambda1_minus == doctest::Approx(half).epsilon(1e-8));
  CHECK(d.max_lambda1() <= s.eigenvalues[1]);
  CHECK(d.max_lambda1() == doctest::Approx(s.eigenvalues[1]).epsilon(0.04));
}

TEST_CASE("nodal decomposition of the disk") {
  const auto g = make_ball(1.0, {0, 0, 0}, 1.0 / 32);
  const auto s = spectrum(g, 3);
  const auto d = decompose(g, s);
  CHECK(d.components == 1);
  CHECK(std::abs(d.max_lambda1() - d.lambda2) / d.lambda2 < 0.02);
  CHECK(d.pieces().cell_count() <= g.cell_count());
}

TEST_CASE("component split of two balls") {
  const auto g = make_theta(TwoBallConfig::for_total_measure(2, pi, {-1.2, 0, 0}, {1.2, 0, 0}), 1.0 / 32);
  const auto s = spectrum(g, 3);
  const auto d = decompose(g, s);
  CHECK(d.source == DecompositionSource::components);
  CHECK(d.components == 2);
  CHECK_FALSE(d.fell_back);
  CHECK(d.pieces().cell_count() == g.cell_count());
  CHECK(d.max_lambda1() == doctest::Approx(s.eigenvalues[1]).epsilon(1e-6));
  CHECK(source_name(d.source) == "components");
}
