#pragma once

// Brute-force references used only by the tests. Nothing here calls into the
// library, so agreement is a genuine cross-check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

// Cyclic Jacobi rotations; returns ascending eigenvalues. Fine up to n ~ 60.
inline std::vector<double> jacobi_eigenvalues(Dense a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

// Gaussian elimination with partial pivoting.
inline std::vector<double> solve(Dense a, std::vector<double> b) {
  const std::size_t n = a.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

// Random sparse-ish SPD matrix: symmetric pattern, diagonally dominated.
inline Dense random_spd(std::size_t n, std::uint64_t seed, double density = 0.3) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), coin(0.0, 1.0);
  Dense a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(g) < density) a[i][j] = a[j][i] = u(g);
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(a[i][j]);
    a[i][i] = row + 0.5 + coin(g) * 3.0;
  }
  return a;
}

// J_n(x) by its power series; good for x below ~20.
inline double bessel_series(int n, double x) {
  double term = std::pow(x / 2.0, n) / std::tgamma(n + 1.0), sum = term;
  for (int m = 1; m < 200; ++m) {
    term *= -(x * x / 4.0) / (m * (m + n));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Zero of J_n in [a, b] by secant-bisection on the series.
inline double bessel_zero(int n, double a, double b) {
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    if ((bessel_series(n, a) < 0) == (bessel_series(n, m) < 0)) a = m;
    else b = m;
  }
  return 0.5 * (a + b);
}

// Torsional rigidity of the a-by-b rectangle from the double sine series of
// the torsion function: T = (64 / pi^6) sum_{odd m,n} a^3 b^3 / (m^2 n^2 (b^2 m^2 + a^2 n^2)).
inline double rectangle_torsion(double a, double b, int terms = 801) {
  double s = 0.0;
  for (int m = 1; m <= terms; m += 2)
    for (int n = 1; n <= terms; n += 2)
      s += 1.0 / (double(m) * m * n * n * (m * m / (a * a) + n * n / (b * b)));
  return 64.0 / std::pow(std::numbers::pi, 6) * a * b * s;
}

// Discrete Dirichlet eigenvalues of the 5-point Laplacian on an n1-by-n2
// block of cells: (4/h^2)(sin^2(p pi / 2(n1+1)) + sin^2(q pi / 2(n2+1))).
inline std::vector<double> discrete_box_spectrum(int n1, int n2, double h, std::size_t count) {
  std::vector<double> v;
  for (int p = 1; p <= n1; ++p)
    for (int q = 1; q <= n2; ++q) {
      const double s1 = std::sin(p * std::numbers::pi / (2.0 * (n1 + 1)));
      const double s2 = std::sin(q * std::numbers::pi / (2.0 * (n2 + 1)));
      v.push_back(4.0 / (h * h) * (s1 * s1 + s2 * s2));
    }
  std::sort(v.begin(), v.end());
  v.resize(std::min(count, v.size()));
  return v;
}

// Area of the intersection of two disks (radii r1, r2, centers d apart).
inline double lens_area(double r1, double r2, double d) {
  if (d >= r1 + r2) return 0.0;
  if (d <= std::abs(r1 - r2)) return std::numbers::pi * std::pow(std::min(r1, r2), 2);
  const double a1 = std::acos((d * d + r1 * r1 - r2 * r2) / (2 * d * r1));
  const double a2 = std::acos((d * d + r2 * r2 - r1 * r1) / (2 * d * r2));
  return r1 * r1 * (a1 - std::sin(2 * a1) / 2) + r2 * r2 * (a2 - std::sin(2 * a2) / 2);
}

}  // namespace oracle
