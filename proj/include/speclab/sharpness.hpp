#pragma once

#include <span>
#include <string>
#include <vector>

#include "speclab/geometry.hpp"
#include "speclab/harness.hpp"
#include "speclab/operators.hpp"

namespace speclab {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope x + intercept. Needs two distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

enum class FitMode {
  positive_part,  // (lambda_k(Omega_t) - lambda_k(Theta))_+
  absolute        // |lambda_k(Omega_t) - lambda_k(Theta)|
};
std::string_view fit_mode_name(FitMode m);

struct ExponentSample {
  double t = 0.0;
  Estimate d2;  // lambda_2(Omega_t) - lambda_2(Theta)
  Estimate dk;  // lambda_k(Omega_t) - lambda_k(Theta)
  bool kept = false;
  std::string note;
};

struct ExponentFit {
  Family family = Family::volume_split;
  int k = 1;
  FitMode mode = FitMode::positive_part;
  std::vector<ExponentSample> samples;  // every t, sorted by d2
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;
};

struct SharpnessOptions {
  double h = 1.0 / 64.0;  // coarse spacing of the extrapolation pair
  int k_max = 6;
  std::vector<double> t_grid{0.02, 0.04, 0.08, 0.16};
  SolveOptions solve{};
  /// difference below max(its error estimate, floor * lambda_k(Theta)) is noise
  double floor = 1e-3;
  /// required slope on the positive part is 1/2 - fit_tolerance
  double fit_tolerance = 0.1;
  unsigned jobs = 0;
};

/// Extrapolated spectra of the family snapshots at every t.
struct FamilySpectra {
  Family family = Family::volume_split;
  std::vector<double> t;
  std::vector<SetQuantities> values;
};

FamilySpectra family_spectra(Family f, const SharpnessOptions& opts);

/// Log-log slope of Delta lambda_k against Delta lambda_2 along the family.
/// Points whose Delta lambda_2 (or, in positive-part mode, Delta lambda_k)
/// is under budget are dropped; fewer than 4 survivors throw
/// InsufficientDataError.
ExponentFit fit_exponent(const FamilySpectra& spectra, int k, FitMode mode, const SharpnessOptions& opts = {});
ExponentFit fit_exponent(Family f, int k, std::span<const double> t_grid, FitMode mode,
                         const SharpnessOptions& opts = {});
/// Same fit on the closed-form two-ball values (volume-split only).
ExponentFit fit_exponent_analytic(int k, std::span<const double> t_grid, int dim = 2, FitMode mode = FitMode::absolute);

/// Two copies of `shape` scaled to measure omega_d/2 each, side by side.
Shape doubled_shape(const Shape& shape);

struct DoublingPoint {
  std::string domain;
  int k = 1;
  Estimate lhs;  // |lambda_k(Omega) - lambda_k(B)|
  Estimate rhs;  // |lambda_2k(doubled) - lambda_2k(Theta)|
  double scaling_discrepancy = 0.0;  // max_j |lambda_2j(doubled)/(2^{2/d} lambda_j(Omega)) - 1|
};

/// Both sides of the doubling identity for k = 1..k_max. The record's ratio
/// is lhs/rhs; the printed prefactor 2^{-1/d} is kept in the notes.
std::vector<DoublingPoint> doubling_points(const DomainSpec& omega, int k_max, const SharpnessOptions& opts = {});
InequalityRecord doubling_check(const DomainSpec& omega, int k, const SharpnessOptions& opts = {});

struct DoublingFit {
  std::vector<DoublingPoint> points;  // only those above budget
  LineFit fit;                        // log2 lhs against log2 rhs
  double power = 0.0;                 // mean of log2(lhs/rhs)
  double power_spread = 0.0;          // max deviation from the mean
  double printed_power = 0.0;         // -1/d
  double scaling_power = 0.0;         // -2/d
  std::string matches;                // "scaling", "printed" or "neither"
};

DoublingFit doubling_fit(const std::vector<DomainSpec>& domains, int k_max, const SharpnessOptions& opts = {});

/// Sorted merge of several spectra, truncated to `count`.
std::vector<double> sorted_merge(const std::vector<std::vector<double>>& spectra, std::size_t count);

}  // namespace speclab
