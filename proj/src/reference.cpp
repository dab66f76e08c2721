#include "speclab/reference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "speclab/errors.hpp"
#include "speclab/geometry.hpp"

namespace speclab::reference {

namespace {

constexpr double kPi = std::numbers::pi;

// Zeros of f on (start, limit): scan with a fixed step, bisect each bracket.
std::vector<double> zeros_below(const std::function<double(double)>& f, double start, double limit,
                                double step) {
  std::vector<double> out;
  double a = start;
  double fa = f(a);
  while (a < limit) {
    const double b = std::min(a + step, limit);
    const double fb = f(b);
    if (fa == 0.0 && a > start) out.push_back(a);
    if (fa * fb < 0.0) {
      double lo = a, hi = b, flo = fa;
      for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      out.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  return out;
}

}  // namespace

double bessel_j(int n, double x) {
  if (n < 0) return (n % 2 == 0 ? 1.0 : -1.0) * bessel_j(-n, x);
  const int m = 2 * static_cast<int>(std::ceil(n + std::abs(x))) + 64;
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    const double t = 2.0 * kPi * i / m;
    s += std::cos(n * t - x * std::sin(t));
  }
  return s / m;
}

std::vector<double> bessel_j_zeros_below(int n, double limit) {
  // no zero of J_n lies below n (and none below 2.4 for n = 0)
  const double start = std::max(1e-3, static_cast<double>(n));
  return zeros_below([n](double x) { return bessel_j(n, x); }, start, limit, 0.1);
}

std::vector<double> bessel_j_zeros(int n, int count) {
  double limit = n + 4.0 * count + 4.0;
  auto z = bessel_j_zeros_below(n, limit);
  while (static_cast<int>(z.size()) < count) {
    limit *= 1.5;
    z = bessel_j_zeros_below(n, limit);
  }
  z.resize(static_cast<std::size_t>(count));
  return z;
}

double spherical_bessel_j(int l, double x) {
  if (x == 0.0) return l == 0 ? 1.0 : 0.0;
  double j0 = std::sin(x) / x;
  if (l == 0) return j0;
  double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
  for (int i = 1; i < l; ++i) {
    const double j2 = (2.0 * i + 1.0) / x * j1 - j0;
    j0 = j1;
    j1 = j2;
  }
  return j1;
}

std::vector<double> spherical_bessel_j_zeros_below(int l, double limit) {
  const double start = std::max(1e-3, static_cast<double>(l));
  return zeros_below([l](double x) { return spherical_bessel_j(l, x); }, start, limit, 0.1);
}

std::vector<double> ball_spectrum(int dim, double radius, int count) {
  if (count < 1) return {};
  if (!(radius > 0.0)) throw ArgumentError("ball radius must be positive");
  // Weyl-type bound on the count-th Bessel zero for the unit ball, padded
  double limit = dim == 2 ? 2.0 * std::sqrt(static_cast<double>(count)) + 10.0
                          : 2.0 * std::cbrt(4.5 * kPi * count) + 10.0;
  for (;;) {
    std::vector<double> roots;
    for (int n = 0; n < limit; ++n) {
      const auto z = dim == 2 ? bessel_j_zeros_below(n, limit) : spherical_bessel_j_zeros_below(n, limit);
      const int mult = dim == 2 ? (n == 0 ? 1 : 2) : 2 * n + 1;
      for (double r : z)
        for (int c = 0; c < mult; ++c) roots.push_back(r);
    }
    if (static_cast<int>(roots.size()) >= count) {
      std::sort(roots.begin(), roots.end());
      std::vector<double> out(static_cast<std::size_t>(count));
      for (int i = 0; i < count; ++i) {
        const double j = roots[static_cast<std::size_t>(i)] / radius;
        out[static_cast<std::size_t>(i)] = j * j;
      }
      return out;
    }
    limit *= 1.5;
  }
}

std::vector<double> balls_spectrum(int dim, std::span<const double> radii, int count) {
  std::vector<double> all;
  for (double r : radii) {
    const auto s = ball_spectrum(dim, r, count);
    all.insert(all.end(), s.begin(), s.end());
  }
  std::sort(all.begin(), all.end());
  all.resize(static_cast<std::size_t>(count));
  return all;
}

std::vector<double> theta_spectrum(int dim, int count) {
  const double r = std::pow(0.5, 1.0 / dim);
  const double radii[2] = {r, r};
  return balls_spectrum(dim, radii, count);
}

std::vector<double> rectangle_spectrum(double a, double b, int count) {
  std::vector<double> v;
  for (int i = 1; i <= count; ++i)
    for (int j = 1; j <= count; ++j) v.push_back(kPi * kPi * (i * i / (a * a) + j * j / (b * b)));
  std::sort(v.begin(), v.end());
  v.resize(static_cast<std::size_t>(count));
  return v;
}

double volume_split_eigenvalue(int dim, double t, int k) {
  if (!(t >= 0.0 && t < 0.5)) throw ArgumentError("volume split t must lie in [0, 1/2)");
  const double radii[2] = {std::pow(0.5 + t, 1.0 / dim), std::pow(0.5 - t, 1.0 / dim)};
  return balls_spectrum(dim, radii, k).back();
}

double ball_torsion(int dim, double radius) {
  return unit_ball_volume(dim) * std::pow(radius, dim + 2) / (dim * (dim + 2.0));
}

double ball_torsion_sup(int dim, double radius) { return radius * radius / (2.0 * dim); }

double theta_torsion(int dim) { return 2.0 * ball_torsion(dim, std::pow(0.5, 1.0 / dim)); }

double theta_boundary_gradient(int dim) { return std::pow(0.5, 1.0 / dim) / dim; }

double torsion_volume_constant(int dim) {
  return 1.0 / dim + 1.0 / (std::pow(2.0, 2.0 / dim) * dim * dim);
}

double eigen_torsion_constant() { return std::exp(1.0 / (4.0 * kPi)); }

double cheng_yang_factor(int dim, int k) { return (1.0 + 4.0 / dim) * std::pow(k, 2.0 / dim); }

References references(int dim, int count) {
  References r;
  r.dim = dim;
  r.measure = unit_ball_volume(dim);
  r.ball = ball_spectrum(dim, 1.0, count);
  r.theta = theta_spectrum(dim, count);
  r.torsion_ball = ball_torsion(dim, 1.0);
  r.torsion_theta = theta_torsion(dim);
  r.sup_w_ball = ball_torsion_sup(dim, 1.0);
  r.boundary_grad_theta = theta_boundary_gradient(dim);
  return r;
}

}  // namespace speclab::reference
