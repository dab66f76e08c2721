#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "speclab/errors.hpp"
#include "speclab/geometry.hpp"
#include "speclab/nodal.hpp"

using namespace speclab;
constexpr double pi = std::numbers::pi;

TEST_CASE("unit ball volumes") {
  CHECK(unit_ball_volume(2) == doctest::Approx(pi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * pi / 3.0));
  CHECK(ball_radius_for_measure(2, pi) == doctest::Approx(1.0));
  CHECK(ball_radius_for_measure(3, pi / 6.0) == doctest::Approx(0.5));
}

TEST_CASE("lattice-aligned box rasterizes exactly") {
  const auto box = Shape::box(2, {0, 0, 0}, {1, 1, 0});
  const auto g = rasterize(box, 1.0 / 8.0);
  CHECK(g.cell_count() == 64);
  CHECK(g.measure() == doctest::Approx(1.0));
  CHECK(box.measure().value() == doctest::Approx(1.0));
}

TEST_CASE("frame border is exterior") {
  const auto g = rasterize(Shape::ball(2, {0.3, -0.2, 0}, 1.0), 1.0 / 16.0);
  const auto& f = g.frame();
  for (std::size_t c = 0; c < f.size(); ++c) {
    const auto ij = f.coords(c);
    if (ij[0] == 0 || ij[1] == 0 || ij[0] == f.n[0] - 1 || ij[1] == f.n[1] - 1) CHECK_FALSE(g.inside(c));
  }
}

TEST_CASE("disk measure converges under refinement") {
  double prev = 1.0;
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}) {
    const double err = std::abs(make_ball(1.0, {0, 0, 0}, h).measure() - pi);
    CHECK(err < 0.05);
    CHECK(err < prev * 1.5);
    prev = err;
  }
}

TEST_CASE("cell centers strictly inside are counted") {
  const double h = 1.0 / 20.0;
  const auto g = make_ball(0.7, {0.1, 0.05, 0}, h);
  long brute = 0;
  for (long i = -40; i < 40; ++i)
    for (long j = -40; j < 40; ++j) {
      const double x = (i + 0.5) * h - 0.1, y = (j + 0.5) * h - 0.05;
      brute += x * x + y * y < 0.49;
    }
  CHECK(static_cast<long>(g.cell_count()) == brute);
}

TEST_CASE("set algebra obeys inclusion-exclusion on the lattice") {
  const double h = 1.0 / 32.0;
  const auto a = Shape::ball(2, {0, 0, 0}, 1.0);
  const auto b = Shape::box(2, {0, -0.5, 0}, {1.5, 0.5, 0});
  const auto frame = GridFrame::fit(a.bounds(), 2, h).merged(GridFrame::fit(b.bounds(), 2, h));
  const auto ga = rasterize(a, frame), gb = rasterize(b, frame);
  const double u = measure(unite(ga, gb)), i = measure(intersect(ga, gb));
  CHECK(u + i == doctest::Approx(ga.measure() + gb.measure()));
  CHECK(measure(set_minus(ga, gb)) == doctest::Approx(ga.measure() - i));
  CHECK(symm_diff_measure(ga, gb) == doctest::Approx(u - i));
  CHECK(symm_diff_measure(ga, ga) == 0.0);
  // shape-level algebra matches the mask-level algebra
  CHECK(rasterize(a.unite(b), frame).cell_count() == unite(ga, gb).cell_count());
  CHECK(rasterize(a.intersect(b), frame).cell_count() == intersect(ga, gb).cell_count());
  CHECK(rasterize(a.subtract(b), frame).cell_count() == set_minus(ga, gb).cell_count());
}

TEST_CASE("embedding keeps the cells") {
  const auto g = make_ball(0.5, {0, 0, 0}, 1.0 / 16);
  const auto big = GridFrame::fit(Bounds{{-2, -2, 0}, {2, 2, 0}}, 2, 1.0 / 16);
  const auto e = embed(g, big);
  CHECK(e.cell_count() == g.cell_count());
  CHECK(symm_diff_measure(e, embed(g, big)) == 0.0);
  auto [x, y] = on_common_frame(g, make_ball(0.5, {1.5, 0, 0}, 1.0 / 16));
  CHECK(x.frame() == y.frame());
}

TEST_CASE("mismatched lattices are rejected") {
  const auto a = make_ball(0.5, {0, 0, 0}, 1.0 / 16);
  const auto b = make_ball(0.5, {0, 0, 0}, 1.0 / 32);
  CHECK_THROWS_AS(intersect(a, b), GridMismatchError);
  CHECK_THROWS_AS(on_common_frame(a, b), GridMismatchError);
}

TEST_CASE("degenerate and invalid configurations throw") {
  CHECK_THROWS_AS(make_ball(0.05, {0, 0, 0}, 1.0 / 32), DegenerateDomainError);
  TwoBallConfig overlap{2, {0, 0, 0}, {1, 0, 0}, 0.6};
  CHECK_THROWS_AS(overlap.validate(), InvalidConfigError);
  CHECK_THROWS_AS(make_theta(overlap, 1.0 / 16), InvalidConfigError);
  CHECK_THROWS_AS(rasterize(Shape::ball(2, {0, 0, 0}, 1e-3), 0.1).require_nonempty(), DegenerateDomainError);
  CHECK_THROWS_AS(parse_family("no-such-family"), ArgumentError);
}

TEST_CASE("two-ball configuration") {
  const auto c = TwoBallConfig::for_total_measure(2, pi, {-1.5, 0, 0}, {1.5, 0, 0});
  CHECK(c.ball_measure() == doctest::Approx(pi / 2));
  CHECK(c.radius == doctest::Approx(std::sqrt(0.5)));
  CHECK(c.separation() == doctest::Approx(3.0));
  CHECK(c.shape().measure().value() == doctest::Approx(pi));
  const auto g = make_theta(c, 1.0 / 32);
  CHECK(connected_components(g).size() == 2);
}

TEST_CASE("families have measure pi and start at the two-ball set") {
  for (Family f : {Family::volume_split, Family::ellipse_pair, Family::dumbbell_neck}) {
    CHECK(parse_family(family_name(f)) == f);
    const auto [lo, hi] = family_range(f);
    for (double t : {lo, lo + 0.3 * (hi - lo)}) {
      const auto s = family_shape(f, t);
      REQUIRE(s.measure().has_value());
      CHECK(*s.measure() == doctest::Approx(pi).epsilon(1e-9));
      CHECK(domain_family(f, t, 1.0 / 64).measure() == doctest::Approx(pi).epsilon(0.02));
    }
    // t = 0 coincides with two balls of half measure
    const auto g = domain_family(f, 0.0, 1.0 / 32);
    const auto comps = connected_components(g);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0].measure() == doctest::Approx(comps[1].measure()).epsilon(0.01));
  }
  CHECK_THROWS(family_shape(Family::volume_split, 0.5));
}

TEST_CASE("normalization and scaling") {
  const auto e = Shape::ellipse({0.2, 0.1, 0}, 2.0, 0.5, 0.3);
  CHECK(e.measure().value() == doctest::Approx(pi));
  const auto s = e.normalized_to(2 * pi);
  CHECK(s.measure().value() == doctest::Approx(2 * pi));
  CHECK(rasterize(s, 1.0 / 64).measure() == doctest::Approx(2 * pi).epsilon(0.01));
  const auto poly = Shape::polygon({{0, 0}, {2, 0}, {2, 1}, {0, 1}});
  CHECK(poly.measure().value() == doctest::Approx(2.0));
  CHECK(Shape::regular_polygon(6, pi, {0, 0, 0}).measure().value() == doctest::Approx(pi));
}

TEST_CASE("three-dimensional ball") {
  const auto g = make_ball(1.0, {0, 0, 0}, 1.0 / 16, 3);
  CHECK(g.dim() == 3);
  CHECK(g.measure() == doctest::Approx(4 * pi / 3).epsilon(0.03));
  CHECK(connected_components(g).size() == 1);
}

TEST_CASE("greymap export") {
  std::ostringstream out;
  write_pgm(make_ball(0.5, {0, 0, 0}, 1.0 / 8), out);
  CHECK(out.str().rfind("P5", 0) == 0);
}
