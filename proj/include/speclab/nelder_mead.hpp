#pragma once

#include <functional>
#include <span>
#include <vector>

namespace speclab {

struct NelderMeadOptions {
  double initial_step = 0.1;
  /// stop once every vertex lies within this distance of the best one
  double xtol = 1e-6;
  int max_iter = 5000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  /// best vertex after each iteration
  std::vector<std::pair<std::vector<double>, double>> trace;
};

using Objective = std::function<double(std::span<const double>)>;

/// Deterministic Nelder-Mead (standard coefficients 1, 2, 1/2, 1/2) started
/// from an axis-aligned simplex around x0. Ties between vertices are broken
/// lexicographically on the coordinates.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opts = {});

}  // namespace speclab
