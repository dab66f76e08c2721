#include "speclab/corpus.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "speclab/errors.hpp"

namespace speclab {

namespace {

constexpr double kPi = std::numbers::pi;

using Vertices = std::vector<std::array<double, 2>>;

Shape area_pi(const Shape& s) { return s.normalized_to(kPi); }

Shape rectangle(double aspect) {
  const double a = std::sqrt(kPi * aspect), b = kPi / a;
  return Shape::box(2, {-a / 2, -b / 2, 0.0}, {a / 2, b / 2, 0.0});
}

Shape ellipse(double aspect, double angle = 0.0) {
  const double b = 1.0 / std::sqrt(aspect);
  return Shape::ellipse({0.0, 0.0, 0.0}, aspect * b, b, angle);
}

// disjoint balls with the given measures (fractions of pi), laid out on a row
Shape balls_row(const std::vector<double>& fractions, double gap = 0.3) {
  std::vector<Shape> pieces;
  double x = 0.0;
  for (double f : fractions) {
    const double r = std::sqrt(f);
    pieces.push_back(Shape::ball(2, {x + r, 0.0, 0.0}, r));
    x += 2.0 * r + gap;
  }
  const double shift = (x - gap) / 2.0;
  return Shape::disjoint_union(pieces).translated({-shift, 0.0, 0.0});
}

Shape star(int points, double inner) {
  Vertices v;
  for (int i = 0; i < 2 * points; ++i) {
    const double r = i % 2 == 0 ? 1.0 : inner;
    const double a = kPi * i / points + kPi / 2;
    v.push_back({r * std::cos(a), r * std::sin(a)});
  }
  return area_pi(Shape::polygon(v));
}

Shape stadium(double half_length, double r) {
  Shape s = Shape::box(2, {-half_length, -r, 0.0}, {half_length, r, 0.0})
                .unite(Shape::ball(2, {-half_length, 0.0, 0.0}, r))
                .unite(Shape::ball(2, {half_length, 0.0, 0.0}, r));
  return area_pi(s.with_measure(4.0 * half_length * r + kPi * r * r));
}

}  // namespace

Shape theta_shape(int dim, double gap, double angle) {
  const double r = ball_radius_for_measure(dim, unit_ball_volume(dim) / 2.0);
  const double c = r + gap / 2.0;
  const Point p{c * std::cos(angle), c * std::sin(angle), 0.0};
  return Shape::disjoint_union({Shape::ball(dim, {-p[0], -p[1], -p[2]}, r), Shape::ball(dim, p, r)});
}

std::vector<DomainSpec> default_corpus() {
  std::vector<DomainSpec> c;
  auto add = [&](std::string label, Shape s) { c.push_back({std::move(label), std::move(s)}); };

  add("disk", Shape::ball(2, {0.0, 0.0, 0.0}, 1.0));
  add("disk-offset", Shape::ball(2, {0.37, -0.21, 0.0}, 1.0));

  for (double a : {1.1, 1.2, 1.5, 2.0, 3.0}) add("ellipse-" + std::to_string(a).substr(0, 3), ellipse(a));
  add("ellipse-1.5-rot30", ellipse(1.5, kPi / 6));

  add("square", rectangle(1.0));
  add("square-rot45", Shape::regular_polygon(4, kPi, {0.0, 0.0, 0.0}, 0.0));
  for (double a : {1.5, 2.0, 3.0, 4.0}) add("rectangle-" + std::to_string(a).substr(0, 3), rectangle(a));

  for (int n : {3, 5, 6, 8, 12}) add("polygon-" + std::to_string(n), Shape::regular_polygon(n, kPi, {0.0, 0.0, 0.0}));

  add("right-triangle", area_pi(Shape::polygon({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}).translated({-0.33, -0.33, 0.0})));
  add("trapezoid", area_pi(Shape::polygon({{-1.0, -0.5}, {1.0, -0.5}, {0.5, 0.5}, {-0.5, 0.5}})));
  add("parallelogram", area_pi(Shape::polygon({{-1.0, -0.5}, {0.6, -0.5}, {1.0, 0.5}, {-0.6, 0.5}})));
  add("kite", area_pi(Shape::polygon({{0.0, -1.2}, {0.7, 0.0}, {0.0, 0.6}, {-0.7, 0.0}})));
  add("l-shape", area_pi(Shape::polygon({{-1, -1}, {1, -1}, {1, 0}, {0, 0}, {0, 1}, {-1, 1}})));
  add("cross", area_pi(Shape::polygon({{-0.5, -1.5}, {0.5, -1.5}, {0.5, -0.5}, {1.5, -0.5}, {1.5, 0.5}, {0.5, 0.5},
                                       {0.5, 1.5}, {-0.5, 1.5}, {-0.5, 0.5}, {-1.5, 0.5}, {-1.5, -0.5}, {-0.5, -0.5}})));
  add("t-shape", area_pi(Shape::polygon({{-1.5, 0.5}, {-0.4, 0.5}, {-0.4, -1.5}, {0.4, -1.5}, {0.4, 0.5},
                                         {1.5, 0.5}, {1.5, 1.3}, {-1.5, 1.3}})));
  add("u-shape", area_pi(Shape::polygon({{-1.5, -1}, {1.5, -1}, {1.5, 1}, {0.7, 1}, {0.7, -0.2}, {-0.7, -0.2},
                                         {-0.7, 1}, {-1.5, 1}})));
  add("star-5", star(5, 0.6));
  add("star-6", star(6, 0.75));

  add("half-disk", area_pi(Shape::ball(2, {0.0, 0.0, 0.0}, 1.0)
                               .intersect(Shape::box(2, {-1.5, 0.0, 0.0}, {1.5, 1.5, 0.0}))
                               .with_measure(kPi / 2)
                               .translated({0.0, -0.4, 0.0})));
  add("stadium", stadium(0.5, 1.0));
  add("stadium-long", stadium(1.5, 0.5));
  add("annulus", area_pi(Shape::ball(2, {0.0, 0.0, 0.0}, 1.2)
                             .subtract(Shape::ball(2, {0.0, 0.0, 0.0}, 0.5))
                             .with_measure(kPi * (1.44 - 0.25))));
  add("square-with-hole", area_pi(Shape::box(2, {-1, -1, 0}, {1, 1, 0})
                                      .subtract(Shape::box(2, {-0.2, -0.2, 0}, {0.2, 0.2, 0}))
                                      .with_measure(4.0 - 0.16)));
  {
    // notch = disk cap cut by the strip |y| < 0.15, x > 0.5
    const double notch = std::asin(0.15) + 0.15 * std::sqrt(1.0 - 0.0225) - 0.15;
    add("disk-notched", area_pi(Shape::ball(2, {0.0, 0.0, 0.0}, 1.0)
                                    .subtract(Shape::box(2, {0.5, -0.15, 0.0}, {1.5, 0.15, 0.0}))
                                    .with_measure(kPi - notch)));
  }

  add("theta", theta_shape(2, 1.0));
  add("theta-gap-0.1", theta_shape(2, 0.1));
  add("theta-gap-0.4", theta_shape(2, 0.4));
  add("theta-vertical", theta_shape(2, 0.6, kPi / 2));
  add("theta-diagonal", theta_shape(2, 0.6, kPi / 4));

  for (double t : {0.02, 0.05, 0.1, 0.2, 0.3})
    add("volume-split-" + std::to_string(t).substr(0, 4), family_shape(Family::volume_split, t));
  for (double t : {0.05, 0.1, 0.3, 0.6, 1.0})
    add("ellipse-pair-" + std::to_string(t).substr(0, 4), family_shape(Family::ellipse_pair, t));
  for (double t : {0.1, 0.2, 0.3, 0.4})
    add("dumbbell-neck-" + std::to_string(t).substr(0, 3), family_shape(Family::dumbbell_neck, t));

  add("three-balls", balls_row({1.0 / 3, 1.0 / 3, 1.0 / 3}));
  add("three-balls-unequal", balls_row({0.5, 0.3, 0.2}));
  add("four-balls", balls_row({0.25, 0.25, 0.25, 0.25}));
  add("disk-plus-small", balls_row({0.8, 0.2}));
  {
    const double s = std::sqrt(kPi / 2);
    add("two-squares", Shape::disjoint_union({Shape::box(2, {-s - 0.15, -s / 2, 0}, {-0.15, s / 2, 0}),
                                              Shape::box(2, {0.15, -s / 2, 0}, {s + 0.15, s / 2, 0})}));
    const double r = std::sqrt(0.5);
    add("disk-and-square", Shape::disjoint_union({Shape::ball(2, {-r - 0.15, 0.0, 0.0}, r),
                                                  Shape::box(2, {0.15, -s / 2, 0}, {s + 0.15, s / 2, 0})}));
    const double a = std::sqrt(0.5 * 1.5), b = std::sqrt(0.5 / 1.5);
    add("two-ellipses", Shape::disjoint_union({Shape::ellipse({-a - 0.2, 0.0, 0.0}, a, b),
                                               Shape::ellipse({a + 0.2, 0.0, 0.0}, a, b)}));
  }
  add("disk-and-rectangle", Shape::disjoint_union({Shape::ball(2, {-1.0, 0.0, 0.0}, std::sqrt(0.6)),
                                                   Shape::box(2, {0.0, -0.4, 0.0}, {kPi * 0.4 / 0.8, 0.4, 0.0})}));

  std::set<std::string> seen;
  for (const auto& d : c) {
    if (!seen.insert(d.label).second) throw ArgumentError("duplicate corpus label " + d.label);
    if (!d.shape.measure() || std::abs(*d.shape.measure() - kPi) > 1e-9)
      throw ArgumentError("corpus entry " + d.label + " is not of measure pi");
  }
  return c;
}

std::vector<DomainSpec> default_doubling_domains() {
  return {{"ellipse-1.2", ellipse(1.2)},
          {"ellipse-1.5-rot30", ellipse(1.5, kPi / 6)},
          {"ellipse-2.0", ellipse(2.0)},
          {"ellipse-3.0", ellipse(3.0)}};
}

}  // namespace speclab
