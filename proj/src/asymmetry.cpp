#include "speclab/asymmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "speclab/errors.hpp"
#include "speclab/nelder_mead.hpp"

namespace speclab {

namespace {

struct Cells {
  int dim = 2;
  double h = 0.0;
  std::vector<double> xyz;  // dim coordinates per interior cell
  std::size_t count() const { return xyz.size() / static_cast<std::size_t>(dim); }
};

Cells cell_centers(const GridDomain& omega) {
  Cells c;
  c.dim = omega.dim();
  c.h = omega.h();
  c.xyz.reserve(omega.cell_count() * static_cast<std::size_t>(c.dim));
  for (std::size_t i = 0; i < omega.mask().size(); ++i) {
    if (!omega.inside(i)) continue;
    const Point p = omega.frame().center(i);
    for (int a = 0; a < c.dim; ++a) c.xyz.push_back(p[a]);
  }
  return c;
}

// index range [first, last] of lattice cells whose centers may lie within r of x
std::pair<long, long> span_of(double x, double r, double h) {
  return {static_cast<long>(std::floor((x - r) / h - 0.5)), static_cast<long>(std::ceil((x + r) / h - 0.5))};
}

struct Box {
  Point lo{};
  Point hi{};
};

// domain bounds from its cells, and the search box of twice that extent
std::pair<Box, Box> boxes(const Cells& c) {
  Box b;
  for (int a = 0; a < c.dim; ++a) {
    b.lo[a] = std::numeric_limits<double>::infinity();
    b.hi[a] = -b.lo[a];
  }
  for (std::size_t i = 0; i < c.count(); ++i)
    for (int a = 0; a < c.dim; ++a) {
      const double v = c.xyz[i * static_cast<std::size_t>(c.dim) + static_cast<std::size_t>(a)];
      b.lo[a] = std::min(b.lo[a], v - 0.5 * c.h);
      b.hi[a] = std::max(b.hi[a], v + 0.5 * c.h);
    }
  Box s;
  for (int a = 0; a < c.dim; ++a) {
    const double mid = 0.5 * (b.lo[a] + b.hi[a]);
    const double ext = b.hi[a] - b.lo[a];
    s.lo[a] = mid - ext;
    s.hi[a] = mid + ext;
  }
  return {b, s};
}

Point point_of(std::span<const double> x, int ball, int dim) {
  Point p{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) p[a] = x[static_cast<std::size_t>(ball * dim + a)];
  return p;
}

double dist(const Point& p, const Point& q, int dim) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += (p[a] - q[a]) * (p[a] - q[a]);
  return std::sqrt(s);
}

class Problem {
 public:
  Problem(const GridDomain& omega, int balls, double radius, double penalty)
      : omega_(omega), cells_(cell_centers(omega)), balls_(balls), r_(radius), penalty_(penalty) {
    std::tie(bounds_, search_) = boxes(cells_);
    omega_count_ = static_cast<double>(omega.cell_count());
  }

  int dim() const { return cells_.dim; }
  int balls() const { return balls_; }
  double radius() const { return r_; }
  double h() const { return cells_.h; }
  const Cells& cells() const { return cells_; }
  const Box& bounds() const { return bounds_; }
  const Box& search() const { return search_; }

  // smooth surrogate: partial-cell coverage, overlap and box penalties
  double smooth(std::span<const double> x) const {
    const int d = dim();
    const double h = cells_.h;
    const double cell = std::pow(h, d);
    double covered = 0.0;
    const std::size_t n = cells_.count();
    for (std::size_t i = 0; i < n; ++i) {
      const double* p = &cells_.xyz[i * static_cast<std::size_t>(d)];
      double cov = 0.0;
      for (int b = 0; b < balls_; ++b) {
        double s = 0.0;
        for (int a = 0; a < d; ++a) {
          const double t = p[a] - x[static_cast<std::size_t>(b * d + a)];
          s += t * t;
        }
        if (s > (r_ + h) * (r_ + h)) continue;
        cov += std::clamp((r_ - std::sqrt(s)) / h + 0.5, 0.0, 1.0);
      }
      covered += std::min(cov, 1.0);
    }
    const double omega_measure = omega_count_ * cell;
    const double w_measure = balls_ * unit_ball_volume(d) * std::pow(r_, d);
    double v = (omega_measure + w_measure - 2.0 * covered * cell) / omega_measure;
    if (balls_ == 2) {
      const double gap = std::max(0.0, 2.0 * r_ - dist(point_of(x, 0, d), point_of(x, 1, d), d));
      v += penalty_ * gap * gap / (r_ * r_);
    }
    for (int b = 0; b < balls_; ++b)
      for (int a = 0; a < d; ++a) {
        const double c = x[static_cast<std::size_t>(b * d + a)];
        const double out = std::max({0.0, search_.lo[a] - c, c - search_.hi[a]});
        v += penalty_ * out * out / (r_ * r_);
      }
    return v;
  }

  bool in_search_box(std::span<const double> x) const {
    for (int b = 0; b < balls_; ++b)
      for (int a = 0; a < dim(); ++a) {
        const double c = x[static_cast<std::size_t>(b * dim() + a)];
        if (c <= search_.lo[a] || c >= search_.hi[a]) return false;
      }
    return true;
  }

  bool feasible(std::span<const double> x) const {
    return balls_ == 1 || dist(point_of(x, 0, dim()), point_of(x, 1, dim()), dim()) >= 2.0 * r_;
  }

  // exact lattice value, the reported quantity
  double exact(std::span<const double> x) const {
    long inside = 0;
    long w = 0;
    for (int b = 0; b < balls_; ++b) {
      const Point c = point_of(x, b, dim());
      inside += domain_cells_in_ball(omega_, c, r_);
      w += lattice_cells_in_ball(dim(), h(), c, r_);
    }
    return (omega_count_ + static_cast<double>(w) - 2.0 * static_cast<double>(inside)) / omega_count_;
  }

  // push the two centers apart along their axis until tangent
  void project(std::vector<double>& x) const {
    if (balls_ != 2) return;
    const int d = dim();
    const Point p = point_of(x, 0, d), q = point_of(x, 1, d);
    const double s = dist(p, q, d);
    if (s >= 2.0 * r_) return;
    Point axis{1.0, 0.0, 0.0};
    if (s > 0.0)
      for (int a = 0; a < d; ++a) axis[a] = (q[a] - p[a]) / s;
    const double half = r_ * (1.0 + 1e-12);
    for (int a = 0; a < d; ++a) {
      const double mid = 0.5 * (p[a] + q[a]);
      x[static_cast<std::size_t>(a)] = mid - half * axis[a];
      x[static_cast<std::size_t>(d + a)] = mid + half * axis[a];
    }
  }

 private:
  const GridDomain& omega_;
  Cells cells_;
  int balls_;
  double r_;
  double penalty_;
  Box bounds_, search_;
  double omega_count_ = 0.0;
};

std::vector<double> centroid(const Cells& c, const std::vector<std::size_t>& which) {
  std::vector<double> m(static_cast<std::size_t>(c.dim), 0.0);
  for (std::size_t i : which)
    for (int a = 0; a < c.dim; ++a) m[static_cast<std::size_t>(a)] += c.xyz[i * static_cast<std::size_t>(c.dim) + static_cast<std::size_t>(a)];
  for (double& v : m) v /= static_cast<double>(std::max<std::size_t>(1, which.size()));
  return m;
}

// halves of the domain on either side of the principal axis through the centroid
std::vector<double> principal_split_seed(const Problem& P) {
  const Cells& c = P.cells();
  const int d = c.dim;
  std::vector<std::size_t> all(c.count());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto m = centroid(c, all);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t i : all)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        cov(a, b) += (c.xyz[i * d + a] - m[a]) * (c.xyz[i * d + b] - m[b]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(cov.topLeftCorner(d, d)));
  const Eigen::VectorXd e = es.eigenvectors().col(d - 1);
  std::vector<std::size_t> plus, minus;
  for (std::size_t i : all) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += (c.xyz[i * d + a] - m[a]) * e[a];
    (s >= 0.0 ? plus : minus).push_back(i);
  }
  auto cp = centroid(c, plus), cm = centroid(c, minus);
  std::vector<double> x(cm);
  x.insert(x.end(), cp.begin(), cp.end());
  P.project(x);
  return x;
}

struct LatticePoint {
  Point p;
  long score;
};

std::vector<LatticePoint> lattice_scan(const Problem& P, const GridDomain& omega, int per_axis) {
  const int d = P.dim();
  std::vector<LatticePoint> out;
  std::array<int, 3> idx{0, 0, 0};
  const int total = static_cast<int>(std::pow(per_axis, d));
  for (int t = 0; t < total; ++t) {
    int rem = t;
    Point p{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) {
      idx[a] = rem % per_axis;
      rem /= per_axis;
      const double f = per_axis == 1 ? 0.5 : static_cast<double>(idx[a]) / (per_axis - 1);
      p[a] = P.bounds().lo[a] + f * (P.bounds().hi[a] - P.bounds().lo[a]);
    }
    out.push_back({p, domain_cells_in_ball(omega, p, P.radius())});
  }
  return out;
}

std::vector<std::vector<double>> seeds(const Problem& P, const GridDomain& omega, int per_axis) {
  const int d = P.dim();
  std::vector<std::vector<double>> s;
  const auto pts = lattice_scan(P, omega, per_axis);
  auto flat = [d](const Point& p) { return std::vector<double>(p.begin(), p.begin() + d); };
  if (P.balls() == 1) {
    std::vector<std::size_t> all(P.cells().count());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    s.push_back(centroid(P.cells(), all));
    const auto best = std::max_element(pts.begin(), pts.end(),
                                       [](const LatticePoint& a, const LatticePoint& b) { return a.score < b.score; });
    s.push_back(flat(best->p));
    return s;
  }
  s.push_back(principal_split_seed(P));
  // best lattice pairs at feasible separation
  struct Pair {
    long score;
    std::size_t i, j;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (dist(pts[i].p, pts[j].p, d) >= 2.0 * P.radius()) pairs.push_back({pts[i].score + pts[j].score, i, j});
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });
  std::vector<std::size_t> used;
  for (const Pair& q : pairs) {
    if (s.size() >= 4) break;
    if (std::find(used.begin(), used.end(), q.i) != used.end()) continue;
    used.push_back(q.i);
    auto x = flat(pts[q.i].p);
    const auto y = flat(pts[q.j].p);
    x.insert(x.end(), y.begin(), y.end());
    s.push_back(std::move(x));
  }
  return s;
}

// coordinate moves on the exact lattice value, halving the step down to h/8
void polish(const Problem& P, std::vector<double>& x, double& value) {
  for (double step = P.h() / 2.0; step >= P.h() / 8.0 - 1e-15; step /= 2.0) {
    for (int round = 0; round < 200; ++round) {
      bool moved = false;
      for (std::size_t c = 0; c < x.size(); ++c)
        for (const double sgn : {-1.0, 1.0}) {
          auto y = x;
          y[c] += sgn * step;
          if (!P.feasible(y)) continue;
          const double v = P.exact(y);
          if (v < value) {
            x = std::move(y);
            value = v;
            moved = true;
          }
        }
      if (!moved) break;
    }
  }
}

AsymmetryResult optimize(const GridDomain& omega, int balls, const AsymmetryOptions& opts) {
  omega.require_nonempty();
  const int d = omega.dim();
  const double target = opts.reference_measure > 0.0 ? opts.reference_measure : omega.measure();
  const double r = ball_radius_for_measure(d, target / balls);
  const Problem P(omega, balls, r, opts.penalty);

  AsymmetryResult best;
  best.balls = balls;
  best.value = std::numeric_limits<double>::infinity();
  std::vector<double> best_x;
  const auto starts = seeds(P, omega, std::max(2, opts.scan));
  for (auto x0 : starts) {
    ++best.starts;
    NelderMeadOptions nm;
    nm.initial_step = 0.25 * r;
    nm.xtol = 0.25 * omega.h();
    const auto res = nelder_mead([&P](std::span<const double> x) { return P.smooth(x); }, std::move(x0), nm);
    for (const auto& [x, v] : res.trace) {
      best.trace.push_back({x, v});
      if (!P.in_search_box(x)) best.hit_search_box = true;
    }
    auto x = res.x;
    P.project(x);
    double value = P.exact(x);
    polish(P, x, value);
    if (value < best.value || (value == best.value && x < best_x)) {
      best.value = value;
      best_x = x;
    }
  }

  if (balls == 1) {
    best.ball = BallConfig{d, point_of(best_x, 0, d), r};
  } else {
    Point a = point_of(best_x, 0, d), b = point_of(best_x, 1, d);
    if (b < a) std::swap(a, b);
    best.pair = TwoBallConfig{d, a, b, r};
  }
  return best;
}

}  // namespace

long lattice_cells_in_ball(int dim, double h, const Point& center, double radius) {
  std::array<std::pair<long, long>, 3> range{};
  for (int a = 0; a < 3; ++a) range[a] = a < dim ? span_of(center[a], radius, h) : std::pair<long, long>{0, 0};
  const double r2 = radius * radius;
  long count = 0;
  for (long k = range[2].first; k <= range[2].second; ++k) {
    const double dz = dim == 3 ? (static_cast<double>(k) + 0.5) * h - center[2] : 0.0;
    for (long j = range[1].first; j <= range[1].second; ++j) {
      const double dy = (static_cast<double>(j) + 0.5) * h - center[1];
      for (long i = range[0].first; i <= range[0].second; ++i) {
        const double dx = (static_cast<double>(i) + 0.5) * h - center[0];
        if (dx * dx + dy * dy + dz * dz < r2) ++count;
      }
    }
  }
  return count;
}

long domain_cells_in_ball(const GridDomain& omega, const Point& center, double radius) {
  const GridFrame& f = omega.frame();
  const double h = f.h;
  std::array<std::pair<long, long>, 3> range{};
  for (int a = 0; a < 3; ++a) {
    if (a >= f.dim) {
      range[a] = {0, 0};
      continue;
    }
    auto [lo, hi] = span_of(center[a], radius, h);
    lo = std::max(lo - f.lo[a], 0L);
    hi = std::min(hi - f.lo[a], static_cast<long>(f.n[a]) - 1);
    range[a] = {lo, hi};
  }
  const double r2 = radius * radius;
  long count = 0;
  for (long k = range[2].first; k <= range[2].second; ++k) {
    const double dz = f.dim == 3 ? (static_cast<double>(f.lo[2] + k) + 0.5) * h - center[2] : 0.0;
    for (long j = range[1].first; j <= range[1].second; ++j) {
      const double dy = (static_cast<double>(f.lo[1] + j) + 0.5) * h - center[1];
      for (long i = range[0].first; i <= range[0].second; ++i) {
        if (!omega.inside(f.linear(static_cast<int>(i), static_cast<int>(j), static_cast<int>(k)))) continue;
        const double dx = (static_cast<double>(f.lo[0] + i) + 0.5) * h - center[0];
        if (dx * dx + dy * dy + dz * dz < r2) ++count;
      }
    }
  }
  return count;
}

double asymmetry_value(const GridDomain& omega, const BallConfig& ball) {
  omega.require_nonempty();
  const auto n = static_cast<double>(omega.cell_count());
  const auto in = static_cast<double>(domain_cells_in_ball(omega, ball.center, ball.radius));
  const auto w = static_cast<double>(lattice_cells_in_ball(omega.dim(), omega.h(), ball.center, ball.radius));
  return (n + w - 2.0 * in) / n;
}

double asymmetry_value(const GridDomain& omega, const TwoBallConfig& pair) {
  pair.validate();
  omega.require_nonempty();
  const auto n = static_cast<double>(omega.cell_count());
  double in = 0.0, w = 0.0;
  for (const Point& c : {pair.center1, pair.center2}) {
    in += static_cast<double>(domain_cells_in_ball(omega, c, pair.radius));
    w += static_cast<double>(lattice_cells_in_ball(omega.dim(), omega.h(), c, pair.radius));
  }
  return (n + w - 2.0 * in) / n;
}

AsymmetryResult fraenkel1(const GridDomain& omega, const AsymmetryOptions& opts) { return optimize(omega, 1, opts); }

AsymmetryResult fraenkel2(const GridDomain& omega, const AsymmetryOptions& opts) { return optimize(omega, 2, opts); }

}  // namespace speclab
