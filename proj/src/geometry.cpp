#include "speclab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "speclab/errors.hpp"

namespace speclab {

double unit_ball_volume(int dim) {
  switch (dim) {
    case 2: return std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi / 3.0;
    default: throw ArgumentError("unsupported dimension " + std::to_string(dim));
  }
}

double ball_radius_for_measure(int dim, double measure) {
  if (!(measure > 0.0)) throw ArgumentError("ball measure must be positive");
  return std::pow(measure / unit_ball_volume(dim), 1.0 / dim);
}

// ---------------------------------------------------------------------------
// Shape nodes

struct Shape::Node {
  explicit Node(int d) : dim(d) {}
  virtual ~Node() = default;
  virtual bool contains(const Point& p) const = 0;
  virtual Bounds bounds() const = 0;
  int dim;
};

namespace {

using NodePtr = std::shared_ptr<const Shape::Node>;

void check_dim(int dim) {
  if (dim != 2 && dim != 3) throw ArgumentError("dimension must be 2 or 3");
}

struct BallNode final : Shape::Node {
  BallNode(int d, const Point& c, double r) : Node(d), center(c), radius(r) {}
  bool contains(const Point& p) const override {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += (p[a] - center[a]) * (p[a] - center[a]);
    return s < radius * radius;
  }
  Bounds bounds() const override {
    Bounds b;
    for (int a = 0; a < dim; ++a) {
      b.lo[a] = center[a] - radius;
      b.hi[a] = center[a] + radius;
    }
    return b;
  }
  Point center;
  double radius;
};

struct EllipseNode final : Shape::Node {
  EllipseNode(const Point& c, double ax, double ay, double angle)
      : Node(2), center(c), a(ax), b(ay), cs(std::cos(angle)), sn(std::sin(angle)) {}
  bool contains(const Point& p) const override {
    const double dx = p[0] - center[0], dy = p[1] - center[1];
    const double u = cs * dx + sn * dy, v = -sn * dx + cs * dy;
    return (u * u) / (a * a) + (v * v) / (b * b) < 1.0;
  }
  Bounds bounds() const override {
    const double ex = std::sqrt(a * a * cs * cs + b * b * sn * sn);
    const double ey = std::sqrt(a * a * sn * sn + b * b * cs * cs);
    Bounds bb;
    bb.lo = {center[0] - ex, center[1] - ey, 0.0};
    bb.hi = {center[0] + ex, center[1] + ey, 0.0};
    return bb;
  }
  Point center;
  double a, b, cs, sn;
};

struct BoxNode final : Shape::Node {
  BoxNode(int d, const Point& l, const Point& h) : Node(d), lo(l), hi(h) {}
  bool contains(const Point& p) const override {
    for (int a = 0; a < dim; ++a)
      if (!(p[a] > lo[a] && p[a] < hi[a])) return false;
    return true;
  }
  Bounds bounds() const override { return {lo, hi}; }
  Point lo, hi;
};

struct PolygonNode final : Shape::Node {
  explicit PolygonNode(std::vector<std::array<double, 2>> v) : Node(2), verts(std::move(v)) {}
  bool contains(const Point& p) const override {
    // even-odd crossing rule
    bool in = false;
    const std::size_t n = verts.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const auto& a = verts[i];
      const auto& b = verts[j];
      if ((a[1] > p[1]) != (b[1] > p[1])) {
        const double x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
        if (p[0] < x) in = !in;
      }
    }
    return in;
  }
  Bounds bounds() const override {
    Bounds b;
    b.lo = {verts[0][0], verts[0][1], 0.0};
    b.hi = b.lo;
    for (const auto& v : verts) {
      b.lo[0] = std::min(b.lo[0], v[0]);
      b.lo[1] = std::min(b.lo[1], v[1]);
      b.hi[0] = std::max(b.hi[0], v[0]);
      b.hi[1] = std::max(b.hi[1], v[1]);
    }
    return b;
  }
  std::vector<std::array<double, 2>> verts;
};

struct UnionNode final : Shape::Node {
  UnionNode(int d, std::vector<NodePtr> c) : Node(d), children(std::move(c)) {}
  bool contains(const Point& p) const override {
    return std::any_of(children.begin(), children.end(),
                       [&](const NodePtr& c) { return c->contains(p); });
  }
  Bounds bounds() const override {
    Bounds b = children.front()->bounds();
    for (const auto& c : children) {
      const Bounds cb = c->bounds();
      for (int a = 0; a < dim; ++a) {
        b.lo[a] = std::min(b.lo[a], cb.lo[a]);
        b.hi[a] = std::max(b.hi[a], cb.hi[a]);
      }
    }
    return b;
  }
  std::vector<NodePtr> children;
};

struct IntersectNode final : Shape::Node {
  IntersectNode(int d, NodePtr x, NodePtr y) : Node(d), a(std::move(x)), b(std::move(y)) {}
  bool contains(const Point& p) const override { return a->contains(p) && b->contains(p); }
  Bounds bounds() const override {
    Bounds ba = a->bounds();
    const Bounds bb = b->bounds();
    for (int k = 0; k < dim; ++k) {
      ba.lo[k] = std::max(ba.lo[k], bb.lo[k]);
      ba.hi[k] = std::max(ba.lo[k], std::min(ba.hi[k], bb.hi[k]));
    }
    return ba;
  }
  NodePtr a, b;
};

struct SubtractNode final : Shape::Node {
  SubtractNode(int d, NodePtr x, NodePtr y) : Node(d), a(std::move(x)), b(std::move(y)) {}
  bool contains(const Point& p) const override { return a->contains(p) && !b->contains(p); }
  Bounds bounds() const override { return a->bounds(); }
  NodePtr a, b;
};

struct TranslateNode final : Shape::Node {
  TranslateNode(int d, NodePtr c, const Point& o) : Node(d), child(std::move(c)), offset(o) {}
  bool contains(const Point& p) const override {
    Point q = p;
    for (int a = 0; a < dim; ++a) q[a] -= offset[a];
    return child->contains(q);
  }
  Bounds bounds() const override {
    Bounds b = child->bounds();
    for (int a = 0; a < dim; ++a) {
      b.lo[a] += offset[a];
      b.hi[a] += offset[a];
    }
    return b;
  }
  NodePtr child;
  Point offset;
};

struct ScaleNode final : Shape::Node {
  ScaleNode(int d, NodePtr c, double s) : Node(d), child(std::move(c)), factor(s) {}
  bool contains(const Point& p) const override {
    Point q = p;
    for (int a = 0; a < dim; ++a) q[a] /= factor;
    return child->contains(q);
  }
  Bounds bounds() const override {
    Bounds b = child->bounds();
    for (int a = 0; a < dim; ++a) {
      b.lo[a] *= factor;
      b.hi[a] *= factor;
    }
    return b;
  }
  NodePtr child;
  double factor;
};

}  // namespace

Shape Shape::ball(int dim, const Point& center, double radius) {
  check_dim(dim);
  if (!(radius > 0.0)) throw ArgumentError("ball radius must be positive");
  return Shape(std::make_shared<BallNode>(dim, center, radius),
               unit_ball_volume(dim) * std::pow(radius, dim));
}

Shape Shape::ellipse(const Point& center, double semi_x, double semi_y, double angle) {
  if (!(semi_x > 0.0 && semi_y > 0.0)) throw ArgumentError("ellipse semi-axes must be positive");
  return Shape(std::make_shared<EllipseNode>(center, semi_x, semi_y, angle),
               std::numbers::pi * semi_x * semi_y);
}

Shape Shape::box(int dim, const Point& lo, const Point& hi) {
  check_dim(dim);
  double m = 1.0;
  for (int a = 0; a < dim; ++a) {
    if (hi[a] < lo[a]) throw ArgumentError("box corners out of order");
    m *= hi[a] - lo[a];
  }
  return Shape(std::make_shared<BoxNode>(dim, lo, hi), m);
}

Shape Shape::polygon(std::vector<std::array<double, 2>> vertices) {
  if (vertices.size() < 3) throw ArgumentError("polygon needs at least 3 vertices");
  double twice = 0.0;
  for (std::size_t i = 0, j = vertices.size() - 1; i < vertices.size(); j = i++)
    twice += vertices[j][0] * vertices[i][1] - vertices[i][0] * vertices[j][1];
  const double area = std::abs(twice) / 2.0;
  return Shape(std::make_shared<PolygonNode>(std::move(vertices)), area);
}

Shape Shape::regular_polygon(int sides, double area, const Point& center, double rotation) {
  if (sides < 3) throw ArgumentError("regular polygon needs at least 3 sides");
  const double R = std::sqrt(2.0 * area / (sides * std::sin(2.0 * std::numbers::pi / sides)));
  std::vector<std::array<double, 2>> v;
  v.reserve(static_cast<std::size_t>(sides));
  for (int i = 0; i < sides; ++i) {
    const double th = rotation + 2.0 * std::numbers::pi * i / sides;
    v.push_back({center[0] + R * std::cos(th), center[1] + R * std::sin(th)});
  }
  return polygon(std::move(v)).with_measure(area);
}

Shape Shape::disjoint_union(const std::vector<Shape>& pieces) {
  if (pieces.empty()) throw ArgumentError("empty union");
  std::vector<NodePtr> nodes;
  std::optional<double> m = 0.0;
  const int d = pieces.front().dim();
  for (const auto& p : pieces) {
    if (p.dim() != d) throw ArgumentError("dimension mismatch in union");
    nodes.push_back(p.node_);
    if (m && p.measure_) *m += *p.measure_;
    else m.reset();
  }
  return Shape(std::make_shared<UnionNode>(d, std::move(nodes)), m);
}

Shape Shape::unite(const Shape& other) const {
  if (other.dim() != dim()) throw ArgumentError("dimension mismatch in union");
  return Shape(std::make_shared<UnionNode>(dim(), std::vector<NodePtr>{node_, other.node_}),
               std::nullopt);
}

Shape Shape::intersect(const Shape& other) const {
  if (other.dim() != dim()) throw ArgumentError("dimension mismatch in intersection");
  return Shape(std::make_shared<IntersectNode>(dim(), node_, other.node_), std::nullopt);
}

Shape Shape::subtract(const Shape& other) const {
  if (other.dim() != dim()) throw ArgumentError("dimension mismatch in difference");
  return Shape(std::make_shared<SubtractNode>(dim(), node_, other.node_), std::nullopt);
}

Shape Shape::translated(const Point& offset) const {
  return Shape(std::make_shared<TranslateNode>(dim(), node_, offset), measure_);
}

Shape Shape::scaled(double factor) const {
  if (!(factor > 0.0)) throw ArgumentError("scale factor must be positive");
  std::optional<double> m;
  if (measure_) m = *measure_ * std::pow(factor, dim());
  return Shape(std::make_shared<ScaleNode>(dim(), node_, factor), m);
}

Shape Shape::with_measure(double measure) const { return Shape(node_, measure); }

Shape Shape::normalized_to(double target) const {
  if (!measure_) throw ArgumentError("cannot normalize a shape of unknown measure");
  return scaled(std::pow(target / *measure_, 1.0 / dim())).with_measure(target);
}

int Shape::dim() const { return node_->dim; }
bool Shape::contains(const Point& p) const { return node_->contains(p); }
Bounds Shape::bounds() const { return node_->bounds(); }

// ---------------------------------------------------------------------------
// Frames and domains

std::array<int, 3> GridFrame::coords(std::size_t linear) const {
  const auto n0 = static_cast<std::size_t>(n[0]);
  const auto n1 = static_cast<std::size_t>(n[1]);
  return {static_cast<int>(linear % n0), static_cast<int>((linear / n0) % n1),
          static_cast<int>(linear / (n0 * n1))};
}

Point GridFrame::center(std::size_t linear) const {
  const auto c = coords(linear);
  Point p{};
  for (int a = 0; a < dim; ++a) p[a] = (static_cast<double>(lo[a] + c[a]) + 0.5) * h;
  return p;
}

std::size_t GridFrame::stride(int axis) const {
  std::size_t s = 1;
  for (int a = 0; a < axis; ++a) s *= static_cast<std::size_t>(n[a]);
  return s;
}

double GridFrame::cell_volume() const { return std::pow(h, dim); }

GridFrame GridFrame::fit(const Bounds& b, int dim, double h, int pad) {
  check_dim(dim);
  if (!(h > 0.0)) throw ArgumentError("grid spacing must be positive");
  GridFrame f;
  f.dim = dim;
  f.h = h;
  for (int a = 0; a < dim; ++a) {
    const auto first = static_cast<long>(std::floor(b.lo[a] / h - 0.5));
    const auto last = static_cast<long>(std::ceil(b.hi[a] / h - 0.5));
    f.lo[a] = first - pad;
    f.n[a] = static_cast<int>(last - first + 1 + 2 * pad);
  }
  return f;
}

GridFrame GridFrame::merged(const GridFrame& other) const {
  if (other.dim != dim || other.h != h)
    throw GridMismatchError("cannot merge frames with different dimension or spacing");
  GridFrame f = *this;
  for (int a = 0; a < dim; ++a) {
    const long lo_a = std::min(lo[a], other.lo[a]);
    const long hi_a = std::max(lo[a] + n[a], other.lo[a] + other.n[a]);
    f.lo[a] = lo_a;
    f.n[a] = static_cast<int>(hi_a - lo_a);
  }
  return f;
}

GridDomain::GridDomain(GridFrame frame, std::vector<std::uint8_t> mask, std::string label)
    : frame_(frame), mask_(std::move(mask)), label_(std::move(label)) {
  if (mask_.size() != frame_.size()) throw ArgumentError("mask size does not match frame");
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    if (!mask_[i]) continue;
    mask_[i] = 1;
    ++count_;
    const auto c = frame_.coords(i);
    for (int a = 0; a < frame_.dim; ++a)
      if (c[a] == 0 || c[a] == frame_.n[a] - 1)
        throw ArgumentError("interior cell on the frame border; frame needs padding");
  }
}

GridDomain GridDomain::with_label(std::string label) const {
  GridDomain d = *this;
  d.label_ = std::move(label);
  return d;
}

void GridDomain::require_nonempty() const {
  if (count_ == 0)
    throw DegenerateDomainError("domain '" + label_ + "' has no interior cell");
}

std::vector<std::size_t> GridDomain::interior_cells() const {
  std::vector<std::size_t> cells;
  cells.reserve(count_);
  for (std::size_t i = 0; i < mask_.size(); ++i)
    if (mask_[i]) cells.push_back(i);
  return cells;
}

double TwoBallConfig::ball_measure() const { return unit_ball_volume(dim) * std::pow(radius, dim); }

double TwoBallConfig::separation() const {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += (center1[a] - center2[a]) * (center1[a] - center2[a]);
  return std::sqrt(s);
}

void TwoBallConfig::validate(double slack) const {
  if (!(radius > 0.0)) throw InvalidConfigError("two-ball radius must be positive");
  if (separation() < 2.0 * radius - slack)
    throw InvalidConfigError("balls overlap: center distance " + std::to_string(separation()) +
                             " < 2*radius " + std::to_string(2.0 * radius));
}

Shape TwoBallConfig::shape() const {
  return Shape::disjoint_union({Shape::ball(dim, center1, radius), Shape::ball(dim, center2, radius)});
}

TwoBallConfig TwoBallConfig::for_total_measure(int dim, double total, const Point& c1, const Point& c2) {
  return TwoBallConfig{dim, c1, c2, ball_radius_for_measure(dim, total / 2.0)};
}

GridDomain rasterize(const Shape& shape, double h, std::string label) {
  return rasterize(shape, GridFrame::fit(shape.bounds(), shape.dim(), h), std::move(label));
}

GridDomain rasterize(const Shape& shape, const GridFrame& frame, std::string label) {
  if (shape.dim() != frame.dim) throw GridMismatchError("shape and frame dimensions differ");
  std::vector<std::uint8_t> mask(frame.size(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const auto c = frame.coords(i);
    bool border = false;
    for (int a = 0; a < frame.dim; ++a) border = border || c[a] == 0 || c[a] == frame.n[a] - 1;
    if (!border && shape.contains(frame.center(i))) mask[i] = 1;
  }
  return GridDomain(frame, std::move(mask), std::move(label));
}

GridDomain make_ball(double radius, const Point& center, double h, int dim) {
  if (!(radius > 2.0 * h))
    throw DegenerateDomainError("ball radius " + std::to_string(radius) +
                                " not resolved at spacing " + std::to_string(h));
  return rasterize(Shape::ball(dim, center, radius), h, "ball");
}

GridDomain make_theta(const TwoBallConfig& config, double h) {
  config.validate();
  if (!(config.radius > 2.0 * h)) throw DegenerateDomainError("two-ball radius not resolved by grid");
  return rasterize(config.shape(), h, "theta");
}

namespace {

template <class Op>
GridDomain cellwise(const GridDomain& a, const GridDomain& b, Op op, const char* name) {
  if (!(a.frame() == b.frame()))
    throw GridMismatchError(std::string(name) + ": domains live on different frames");
  std::vector<std::uint8_t> m(a.mask().size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = op(a.mask()[i] != 0, b.mask()[i] != 0) ? 1 : 0;
  return GridDomain(a.frame(), std::move(m), a.label());
}

}  // namespace

GridDomain intersect(const GridDomain& a, const GridDomain& b) {
  return cellwise(a, b, [](bool x, bool y) { return x && y; }, "intersect");
}

GridDomain set_minus(const GridDomain& a, const GridDomain& b) {
  return cellwise(a, b, [](bool x, bool y) { return x && !y; }, "set_minus");
}

GridDomain unite(const GridDomain& a, const GridDomain& b) {
  return cellwise(a, b, [](bool x, bool y) { return x || y; }, "unite");
}

double measure(const GridDomain& a) { return a.measure(); }

double symm_diff_measure(const GridDomain& a, const GridDomain& b) {
  return set_minus(a, b).measure() + set_minus(b, a).measure();
}

GridDomain embed(const GridDomain& a, const GridFrame& frame) {
  const GridFrame& src = a.frame();
  if (src.dim != frame.dim || src.h != frame.h)
    throw GridMismatchError("embed: different dimension or spacing");
  std::array<long, 3> shift{0, 0, 0};
  for (int ax = 0; ax < src.dim; ++ax) {
    shift[ax] = src.lo[ax] - frame.lo[ax];
    if (shift[ax] < 0 || shift[ax] + src.n[ax] > frame.n[ax])
      throw GridMismatchError("embed: target frame does not contain the source frame");
  }
  std::vector<std::uint8_t> m(frame.size(), 0);
  for (std::size_t i = 0; i < a.mask().size(); ++i) {
    if (!a.mask()[i]) continue;
    const auto c = src.coords(i);
    m[frame.linear(static_cast<int>(c[0] + shift[0]), static_cast<int>(c[1] + shift[1]),
                   static_cast<int>(c[2] + shift[2]))] = 1;
  }
  return GridDomain(frame, std::move(m), a.label());
}

std::pair<GridDomain, GridDomain> on_common_frame(const GridDomain& a, const GridDomain& b) {
  const GridFrame f = a.frame().merged(b.frame());
  return {embed(a, f), embed(b, f)};
}

// ---------------------------------------------------------------------------
// Families

Family parse_family(std::string_view name) {
  if (name == "volume-split") return Family::volume_split;
  if (name == "ellipse-pair") return Family::ellipse_pair;
  if (name == "dumbbell-neck") return Family::dumbbell_neck;
  throw ArgumentError("unknown family '" + std::string(name) + "'");
}

std::string_view family_name(Family f) {
  switch (f) {
    case Family::volume_split: return "volume-split";
    case Family::ellipse_pair: return "ellipse-pair";
    case Family::dumbbell_neck: return "dumbbell-neck";
  }
  return "?";
}

std::pair<double, double> family_range(Family f) {
  switch (f) {
    case Family::volume_split: return {0.0, 0.5};
    case Family::ellipse_pair: return {0.0, 1.0};
    case Family::dumbbell_neck: return {0.0, 0.5};
  }
  return {0.0, 0.0};
}

namespace {

constexpr double kPairOffset = 1.5;   // two-ball families: centers at (+-1.5, 0)
constexpr double kDumbbellOffset = 1.0;

// Area of {|y| < w/2} inside the half ball {x < c} of radius r centred at c.
double half_strip_in_ball(double r, double w) {
  const double y = w / 2.0;
  const double F = (y * std::sqrt(r * r - y * y) + r * r * std::asin(y / r)) / 2.0;
  return 2.0 * F;
}

}  // namespace

Shape family_shape(Family f, double t, int dim) {
  const auto [lo, hi] = family_range(f);
  const bool ok = f == Family::volume_split ? (t >= lo && t < hi) : (t >= lo && t <= hi);
  if (!ok)
    throw ArgumentError("parameter t=" + std::to_string(t) + " outside the range of family " +
                        std::string(family_name(f)));
  const double omega = unit_ball_volume(dim);
  const Point left{-kPairOffset, 0.0, 0.0};
  const Point right{kPairOffset, 0.0, 0.0};
  switch (f) {
    case Family::volume_split: {
      const double r1 = ball_radius_for_measure(dim, (0.5 + t) * omega);
      const double r2 = ball_radius_for_measure(dim, (0.5 - t) * omega);
      return Shape::disjoint_union({Shape::ball(dim, left, r1), Shape::ball(dim, right, r2)});
    }
    case Family::ellipse_pair: {
      if (dim != 2) throw ArgumentError("ellipse-pair family is two-dimensional");
      const double r = std::sqrt(0.5);
      const double s = std::sqrt(1.0 + t);
      return Shape::disjoint_union({Shape::ellipse(left, r * s, r / s), Shape::ball(2, right, r)});
    }
    case Family::dumbbell_neck: {
      if (dim != 2) throw ArgumentError("dumbbell-neck family is two-dimensional");
      const double r = std::sqrt(0.5);
      const double c = kDumbbellOffset;
      Shape s = Shape::ball(2, {-c, 0.0, 0.0}, r).unite(Shape::ball(2, {c, 0.0, 0.0}, r));
      double area = std::numbers::pi;
      if (t > 0.0) {
        s = s.unite(Shape::box(2, {-c, -t / 2.0, 0.0}, {c, t / 2.0, 0.0}));
        area += 2.0 * c * t - 2.0 * half_strip_in_ball(r, t);
      }
      return s.with_measure(area).normalized_to(omega);
    }
  }
  throw ArgumentError("unknown family");
}

GridDomain domain_family(Family f, double t, double h, int dim) {
  return rasterize(family_shape(f, t, dim), h, std::string(family_name(f)) + "@" + std::to_string(t));
}

void write_pgm(const GridDomain& domain, std::ostream& out) {
  const GridFrame& f = domain.frame();
  const int z = f.dim == 3 ? f.n[2] / 2 : 0;
  out << "P5\n" << f.n[0] << ' ' << f.n[1] << "\n255\n";
  for (int j = f.n[1] - 1; j >= 0; --j)
    for (int i = 0; i < f.n[0]; ++i)
      out.put(domain.inside(f.linear(i, j, z)) ? static_cast<char>(255) : static_cast<char>(0));
}

}  // namespace speclab
