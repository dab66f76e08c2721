#pragma once

#include <optional>
#include <vector>

#include "speclab/geometry.hpp"

namespace speclab {

struct AsymmetryTrace {
  std::vector<double> centers;  // dim coordinates per ball
  double value = 0.0;           // smooth surrogate
};

struct AsymmetryResult {
  double value = 0.0;  // |Omega symmdiff W| / |Omega|, counted on the lattice
  int balls = 1;
  BallConfig ball{};                  // set when balls == 1
  std::optional<TwoBallConfig> pair;  // set when balls == 2
  std::vector<AsymmetryTrace> trace;
  /// true if any optimizer iterate reached the search box
  bool hit_search_box = false;
  int starts = 0;
};

struct AsymmetryOptions {
  /// Measure the witness balls are sized for; <= 0 uses the grid measure of
  /// the domain.
  double reference_measure = 0.0;
  /// Lattice scan resolution per axis for seeding.
  int scan = 11;
  /// Overlap penalty weight.
  double penalty = 4.0;
};

/// Best single ball of measure |Omega|.
AsymmetryResult fraenkel1(const GridDomain& omega, const AsymmetryOptions& opts = {});
/// Best pair of disjoint balls of measure |Omega|/2 each.
AsymmetryResult fraenkel2(const GridDomain& omega, const AsymmetryOptions& opts = {});

/// Lattice-counted |Omega symmdiff W| / |Omega| for a ball or a ball pair.
double asymmetry_value(const GridDomain& omega, const BallConfig& ball);
double asymmetry_value(const GridDomain& omega, const TwoBallConfig& pair);

/// Number of lattice cell centers (spacing h) strictly inside the ball.
long lattice_cells_in_ball(int dim, double h, const Point& center, double radius);
/// Number of interior cells of omega whose center lies strictly inside the ball.
long domain_cells_in_ball(const GridDomain& omega, const Point& center, double radius);

}  // namespace speclab
