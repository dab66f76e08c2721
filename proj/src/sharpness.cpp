#include "speclab/sharpness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "speclab/errors.hpp"
#include "speclab/parallel.hpp"
#include "speclab/reference.hpp"

namespace speclab {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("fit_line: need two or more paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw ArgumentError("fit_line: abscissae coincide");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  return f;
}

std::string_view fit_mode_name(FitMode m) { return m == FitMode::positive_part ? "positive-part" : "absolute"; }

FamilySpectra family_spectra(Family f, const SharpnessOptions& opts) {
  FamilySpectra out;
  out.family = f;
  out.t = opts.t_grid;
  for (double t : out.t) family_shape(f, t);  // range check up front
  out.values.resize(out.t.size());
  std::vector<std::optional<std::string>> errors(out.t.size());
  parallel_for(out.t.size(), opts.jobs, [&](std::size_t i) {
    try {
      const double t = out.t[i];
      const auto s = spectrum_extrapolated([&](double h) { return domain_family(f, t, h); }, opts.h, opts.k_max,
                                           opts.solve);
      SetQuantities q;
      for (std::size_t j = 0; j < s.eigenvalues.size(); ++j) q.lambda.push_back({s.eigenvalues[j], s.error_estimate[j]});
      out.values[i] = std::move(q);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (errors[i])
      throw Error(std::string(family_name(f)) + " at t=" + std::to_string(out.t[i]) + ": " + *errors[i]);
  return out;
}

namespace {

ExponentFit fit_samples(ExponentFit fit) {
  std::stable_sort(fit.samples.begin(), fit.samples.end(),
                   [](const ExponentSample& a, const ExponentSample& b) { return a.d2.value < b.d2.value; });
  std::vector<double> x, y;
  for (const auto& s : fit.samples) {
    if (!s.kept) continue;
    x.push_back(std::log(s.d2.value));
    y.push_back(std::log(fit.mode == FitMode::absolute ? std::abs(s.dk.value) : s.dk.value));
  }
  fit.n_points = x.size();
  if (x.size() < 4)
    throw InsufficientDataError(std::string(family_name(fit.family)) + " k=" + std::to_string(fit.k) + ": only " +
                                std::to_string(x.size()) + " points above the error budget");
  const LineFit l = fit_line(x, y);
  fit.slope = l.slope;
  fit.intercept = l.intercept;
  fit.r_squared = l.r_squared;
  return fit;
}

void classify(ExponentSample& s, FitMode mode, double budget2, double budgetk) {
  if (!(s.d2.value > budget2)) {
    s.note = "delta lambda2 under budget";
    return;
  }
  const double v = mode == FitMode::absolute ? std::abs(s.dk.value) : s.dk.value;
  if (!(v > budgetk)) {
    s.note = mode == FitMode::absolute ? "delta lambda_k under budget" : "positive part under budget";
    return;
  }
  s.kept = true;
}

}  // namespace

ExponentFit fit_exponent(const FamilySpectra& spectra, int k, FitMode mode, const SharpnessOptions& opts) {
  if (k < 1) throw ArgumentError("fit_exponent: k must be positive");
  const int d = 2;
  const auto theta = reference::theta_spectrum(d, std::max(k, 2));
  ExponentFit fit;
  fit.family = spectra.family;
  fit.k = k;
  fit.mode = mode;
  for (std::size_t i = 0; i < spectra.t.size(); ++i) {
    const auto& q = spectra.values[i];
    if (static_cast<int>(q.lambda.size()) < std::max(k, 2)) throw ArgumentError("fit_exponent: k above solved range");
    ExponentSample s;
    s.t = spectra.t[i];
    s.d2 = q.eig(2) - Estimate::exact(theta[1]);
    s.dk = q.eig(k) - Estimate::exact(theta[static_cast<std::size_t>(k - 1)]);
    classify(s, mode, std::max(s.d2.error, opts.floor * theta[1]),
             std::max(s.dk.error, opts.floor * theta[static_cast<std::size_t>(k - 1)]));
    fit.samples.push_back(std::move(s));
  }
  return fit_samples(std::move(fit));
}

ExponentFit fit_exponent(Family f, int k, std::span<const double> t_grid, FitMode mode, const SharpnessOptions& opts) {
  for (double t : t_grid)
    if (!(t > 0.0)) throw ArgumentError("fit_exponent: t grid must be positive");
  SharpnessOptions o = opts;
  o.t_grid.assign(t_grid.begin(), t_grid.end());
  o.k_max = std::max(k, 2);
  return fit_exponent(family_spectra(f, o), k, mode, o);
}

ExponentFit fit_exponent_analytic(int k, std::span<const double> t_grid, int dim, FitMode mode) {
  const auto theta = reference::theta_spectrum(dim, std::max(k, 2));
  ExponentFit fit;
  fit.family = Family::volume_split;
  fit.k = k;
  fit.mode = mode;
  for (double t : t_grid) {
    if (!(t > 0.0 && t < 0.5)) throw ArgumentError("fit_exponent_analytic: t outside (0, 1/2)");
    ExponentSample s;
    s.t = t;
    s.d2 = Estimate::exact(reference::volume_split_eigenvalue(dim, t, 2) - theta[1]);
    s.dk = Estimate::exact(reference::volume_split_eigenvalue(dim, t, k) - theta[static_cast<std::size_t>(k - 1)]);
    classify(s, mode, 0.0, 0.0);
    fit.samples.push_back(std::move(s));
  }
  return fit_samples(std::move(fit));
}

Shape doubled_shape(const Shape& shape) {
  if (!shape.measure()) throw ArgumentError("doubled_shape: the measure of the shape must be known");
  const int d = shape.dim();
  const Shape half = shape.normalized_to(unit_ball_volume(d) / 2.0);
  const Bounds b = half.bounds();
  const double gap = 0.3;
  const double mid = (b.lo[0] + b.hi[0]) / 2.0, width = b.hi[0] - b.lo[0];
  const Shape left = half.translated({-mid - (width + gap) / 2.0, 0.0, 0.0});
  const Shape right = half.translated({-mid + (width + gap) / 2.0, 0.0, 0.0});
  return Shape::disjoint_union({left, right});
}

std::vector<DoublingPoint> doubling_points(const DomainSpec& omega, int k_max, const SharpnessOptions& opts) {
  if (k_max < 1) throw ArgumentError("doubling_points: k_max must be positive");
  const int d = omega.shape.dim();
  const Shape doubled = doubled_shape(omega.shape);
  const auto s = spectrum_extrapolated([&](double h) { return rasterize(omega.shape, h, omega.label); }, opts.h,
                                       k_max, opts.solve);
  const auto sd = spectrum_extrapolated([&](double h) { return rasterize(doubled, h, omega.label + "-doubled"); },
                                        opts.h, 2 * k_max, opts.solve);
  const auto ball = reference::ball_spectrum(d, 1.0, k_max);
  const auto theta = reference::theta_spectrum(d, 2 * k_max);
  const double scale = std::pow(2.0, 2.0 / d);

  double scaling = 0.0;
  for (int j = 1; j <= k_max; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    scaling = std::max(scaling, std::abs(sd.eigenvalues[2 * jj - 1] / (scale * s.eigenvalues[jj - 1]) - 1.0));
  }
  std::vector<DoublingPoint> out;
  for (int k = 1; k <= k_max; ++k) {
    const auto i = static_cast<std::size_t>(k - 1), i2 = static_cast<std::size_t>(2 * k - 1);
    DoublingPoint p;
    p.domain = omega.label;
    p.k = k;
    p.lhs = abs(Estimate{s.eigenvalues[i], s.error_estimate[i]} - Estimate::exact(ball[i]));
    p.rhs = abs(Estimate{sd.eigenvalues[i2], sd.error_estimate[i2]} - Estimate::exact(theta[i2]));
    p.scaling_discrepancy = scaling;
    out.push_back(p);
  }
  return out;
}

InequalityRecord doubling_check(const DomainSpec& omega, int k, const SharpnessOptions& opts) {
  const auto pts = doubling_points(omega, k, opts);
  const auto& p = pts.back();
  const int d = omega.shape.dim();
  auto r = ratio_record("doubling", omega.label, k, opts.h, p.lhs, p.rhs, BudgetPolicy{opts.floor});
  r.theta_reference = "analytic";
  const double printed = std::pow(2.0, -1.0 / d);
  r.notes.emplace_back("printed_prefactor", printed);
  r.notes.emplace_back("scaling_prefactor", std::pow(2.0, -2.0 / d));
  r.notes.emplace_back("relative_discrepancy_to_printed", std::abs(r.ratio - printed) / printed);
  r.notes.emplace_back("log2_ratio", std::log2(r.ratio));
  r.notes.emplace_back("scaling_law_discrepancy", p.scaling_discrepancy);
  return r;
}

DoublingFit doubling_fit(const std::vector<DomainSpec>& domains, int k_max, const SharpnessOptions& opts) {
  if (domains.empty()) throw ArgumentError("doubling_fit: no domains");
  const int d = domains.front().shape.dim();
  const auto ball = reference::ball_spectrum(d, 1.0, k_max);
  std::vector<std::vector<DoublingPoint>> per(domains.size());
  std::vector<std::optional<std::string>> errors(domains.size());
  SharpnessOptions inner = opts;
  inner.solve.eigen.start.clear();
  parallel_for(domains.size(), opts.jobs, [&](std::size_t i) {
    try {
      per[i] = doubling_points(domains[i], k_max, inner);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (errors[i]) throw Error("doubling probe on " + domains[i].label + ": " + *errors[i]);

  DoublingFit fit;
  fit.printed_power = -1.0 / d;
  fit.scaling_power = -2.0 / d;
  std::vector<double> x, y;
  for (const auto& pts : per) {
    for (const auto& p : pts) {
      const double b = opts.floor * ball[static_cast<std::size_t>(p.k - 1)];
      if (!(p.lhs.value > std::max(p.lhs.error, b) && p.rhs.value > std::max(p.rhs.error, b))) continue;
      fit.points.push_back(p);
      x.push_back(std::log2(p.rhs.value));
      y.push_back(std::log2(p.lhs.value));
    }
  }
  if (x.size() < 4) throw InsufficientDataError("doubling probe: only " + std::to_string(x.size()) + " points above budget");
  fit.fit = fit_line(x, y);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += y[i] - x[i];
  fit.power = sum / static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) fit.power_spread = std::max(fit.power_spread, std::abs(y[i] - x[i] - fit.power));
  const double tol = 0.1;
  const double ds = std::abs(fit.power - fit.scaling_power), dp = std::abs(fit.power - fit.printed_power);
  fit.matches = ds <= tol && ds < dp ? "scaling" : dp <= tol && dp < ds ? "printed" : "neither";
  return fit;
}

std::vector<double> sorted_merge(const std::vector<std::vector<double>>& spectra, std::size_t count) {
  std::vector<double> all;
  for (const auto& s : spectra) all.insert(all.end(), s.begin(), s.end());
  std::sort(all.begin(), all.end());
  if (all.size() > count) all.resize(count);
  return all;
}

}  // namespace speclab
