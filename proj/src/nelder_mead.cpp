#include "speclab/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "speclab/errors.hpp"

namespace speclab {

namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

bool better(const Vertex& a, const Vertex& b) {
  if (a.f != b.f) return a.f < b.f;
  return a.x < b.x;
}

double diameter(const std::vector<Vertex>& s) {
  double d = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    double q = 0.0;
    for (std::size_t j = 0; j < s[0].x.size(); ++j) q += (s[i].x[j] - s[0].x[j]) * (s[i].x[j] - s[0].x[j]);
    d = std::max(d, std::sqrt(q));
  }
  return d;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  if (n == 0) throw ArgumentError("nelder_mead: empty start point");
  if (!(opts.initial_step > 0.0) || !(opts.xtol > 0.0)) throw ArgumentError("nelder_mead: step and xtol must be positive");

  auto eval = [&](std::vector<double> x) { const double v = f(x); return Vertex{std::move(x), std::isnan(v) ? HUGE_VAL : v}; };

  std::vector<Vertex> s;
  s.reserve(n + 1);
  s.push_back(eval(x0));
  for (std::size_t i = 0; i < n; ++i) {
    auto x = x0;
    x[i] += opts.initial_step;
    s.push_back(eval(std::move(x)));
  }

  NelderMeadResult res;
  for (int it = 0; it < opts.max_iter; ++it) {
    std::sort(s.begin(), s.end(), better);
    res.trace.emplace_back(s[0].x, s[0].f);
    if (diameter(s) < opts.xtol) {
      res.converged = true;
      break;
    }
    ++res.iterations;

    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c[j] += s[i].x[j] / static_cast<double>(n);
    auto along = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j) x[j] = c[j] + t * (s[n].x[j] - c[j]);
      return eval(std::move(x));
    };

    Vertex r = along(-1.0);
    if (better(r, s[0])) {
      Vertex e = along(-2.0);
      s[n] = better(e, r) ? std::move(e) : std::move(r);
      continue;
    }
    if (better(r, s[n - 1])) {
      s[n] = std::move(r);
      continue;
    }
    Vertex k = better(r, s[n]) ? along(-0.5) : along(0.5);
    if (better(k, s[n]) && (better(k, r) || !better(r, s[n]))) {
      s[n] = std::move(k);
      continue;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j) x[j] = s[0].x[j] + 0.5 * (s[i].x[j] - s[0].x[j]);
      s[i] = eval(std::move(x));
    }
  }
  std::sort(s.begin(), s.end(), better);
  res.x = s[0].x;
  res.value = s[0].f;
  return res;
}

}  // namespace speclab
