#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace speclab {

/// Points are always stored with three coordinates; unused ones are zero.
using Point = std::array<double, 3>;

/// Volume of the unit ball in dimension `dim` (2 or 3).
double unit_ball_volume(int dim);

/// Radius of the ball of the given measure.
double ball_radius_for_measure(int dim, double measure);

struct Bounds {
  Point lo{};
  Point hi{};
};

/// Immutable analytic open set: a membership predicate with a bounding box
/// and, when it is known in closed form, its measure.
class Shape {
 public:
  struct Node;

  static Shape ball(int dim, const Point& center, double radius);
  /// Ellipse with semi-axes along the rotated x/y axes.
  static Shape ellipse(const Point& center, double semi_x, double semi_y, double angle = 0.0);
  static Shape box(int dim, const Point& lo, const Point& hi);
  /// Simple polygon (any orientation); measure by the shoelace formula.
  static Shape polygon(std::vector<std::array<double, 2>> vertices);
  static Shape regular_polygon(int sides, double area, const Point& center, double rotation = 0.0);
  /// Union of pieces the caller guarantees to be pairwise disjoint, so the
  /// measure is the sum of the pieces' measures.
  static Shape disjoint_union(const std::vector<Shape>& pieces);

  Shape unite(const Shape& other) const;
  Shape intersect(const Shape& other) const;
  Shape subtract(const Shape& other) const;
  Shape translated(const Point& offset) const;
  /// Homothety about the origin.
  Shape scaled(double factor) const;
  /// Attach a closed-form measure to a composite whose measure the set
  /// algebra cannot infer.
  Shape with_measure(double measure) const;
  /// Rescale about the origin so the measure equals `target`.
  /// Requires a known measure.
  Shape normalized_to(double target) const;

  int dim() const;
  bool contains(const Point& p) const;
  Bounds bounds() const;
  std::optional<double> measure() const { return measure_; }

 private:
  Shape(std::shared_ptr<const Node> node, std::optional<double> measure)
      : node_(std::move(node)), measure_(measure) {}
  std::shared_ptr<const Node> node_;
  std::optional<double> measure_;
};

/// A window of the global cell lattice at spacing h. Cell (i,j,k) of the
/// frame is global cell lo + (i,j,k), centered at (lo + (i,j,k) + 1/2) * h.
/// All frames of equal h share one lattice, so embedding is exact.
struct GridFrame {
  int dim = 2;
  double h = 0.0;
  std::array<long, 3> lo{0, 0, 0};
  std::array<int, 3> n{1, 1, 1};

  std::size_t size() const {
    return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]) *
           static_cast<std::size_t>(n[2]);
  }
  std::size_t linear(int i, int j, int k = 0) const {
    return (static_cast<std::size_t>(k) * static_cast<std::size_t>(n[1]) +
            static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(n[0]) +
           static_cast<std::size_t>(i);
  }
  std::array<int, 3> coords(std::size_t linear) const;
  Point center(std::size_t linear) const;
  /// Linear stride of one step along `axis`.
  std::size_t stride(int axis) const;
  double cell_volume() const;

  /// Smallest frame covering `b` plus `pad` cells on every side.
  static GridFrame fit(const Bounds& b, int dim, double h, int pad = 2);
  /// Frame covering both; requires equal dim and h.
  GridFrame merged(const GridFrame& other) const;

  bool operator==(const GridFrame&) const = default;
};

/// Rasterized open set: cell-center indicator mask on a frame. The outermost
/// layer of every frame is exterior, so each interior cell has all 2*dim
/// neighbours inside the frame.
class GridDomain {
 public:
  GridDomain(GridFrame frame, std::vector<std::uint8_t> mask, std::string label = {});

  const GridFrame& frame() const { return frame_; }
  int dim() const { return frame_.dim; }
  double h() const { return frame_.h; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  bool inside(std::size_t linear) const { return mask_[linear] != 0; }
  std::size_t cell_count() const { return count_; }
  double measure() const { return static_cast<double>(count_) * frame_.cell_volume(); }
  bool empty() const { return count_ == 0; }
  const std::string& label() const { return label_; }
  GridDomain with_label(std::string label) const;

  /// Throws DegenerateDomainError when the domain has no interior cell.
  void require_nonempty() const;
  /// Linear indices of the interior cells in increasing order.
  std::vector<std::size_t> interior_cells() const;

 private:
  GridFrame frame_;
  std::vector<std::uint8_t> mask_;
  std::string label_;
  std::size_t count_ = 0;
};

/// Two equal balls with disjoint interiors.
struct TwoBallConfig {
  int dim = 2;
  Point center1{};
  Point center2{};
  double radius = 0.0;

  double ball_measure() const;
  double separation() const;
  /// Throws InvalidConfigError if the balls overlap by more than `slack`
  /// (a length) or the radius is not positive.
  void validate(double slack = 1e-12) const;
  Shape shape() const;
  /// Balls of measure total/2 each.
  static TwoBallConfig for_total_measure(int dim, double total, const Point& c1, const Point& c2);
};

struct BallConfig {
  int dim = 2;
  Point center{};
  double radius = 0.0;
  Shape shape() const { return Shape::ball(dim, center, radius); }
};

GridDomain rasterize(const Shape& shape, double h, std::string label = {});
GridDomain rasterize(const Shape& shape, const GridFrame& frame, std::string label = {});

/// Throws DegenerateDomainError when radius <= 2h.
GridDomain make_ball(double radius, const Point& center, double h, int dim = 2);
/// Throws InvalidConfigError for overlapping balls.
GridDomain make_theta(const TwoBallConfig& config, double h);

GridDomain intersect(const GridDomain& a, const GridDomain& b);
GridDomain set_minus(const GridDomain& a, const GridDomain& b);
GridDomain unite(const GridDomain& a, const GridDomain& b);
double measure(const GridDomain& a);
double symm_diff_measure(const GridDomain& a, const GridDomain& b);

/// Re-express `a` on a larger frame of the same lattice.
GridDomain embed(const GridDomain& a, const GridFrame& frame);
/// Bring two domains onto their merged frame.
std::pair<GridDomain, GridDomain> on_common_frame(const GridDomain& a, const GridDomain& b);

// Parametric families, all of measure omega_d, reducing to a two-ball set at t = 0.
enum class Family { volume_split, ellipse_pair, dumbbell_neck };

Family parse_family(std::string_view name);
std::string_view family_name(Family f);
/// Closed parameter range [first, second]; volume-split excludes 0.5.
std::pair<double, double> family_range(Family f);
Shape family_shape(Family f, double t, int dim = 2);
GridDomain domain_family(Family f, double t, double h, int dim = 2);

/// Binary greymap (P5); 3-D domains export their middle z-slice.
void write_pgm(const GridDomain& domain, std::ostream& out);

}  // namespace speclab
