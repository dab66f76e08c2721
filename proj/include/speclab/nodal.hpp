#pragma once

#include <string_view>
#include <vector>

#include "speclab/geometry.hpp"
#include "speclab/operators.hpp"

namespace speclab {

/// 4-connected (2-D) / 6-connected (3-D) components, on the domain's frame,
/// ordered by their first cell.
std::vector<GridDomain> connected_components(const GridDomain& omega);

enum class DecompositionSource { nodal, components };
std::string_view source_name(DecompositionSource s);

struct Decomposition {
  GridDomain omega_plus;
  GridDomain omega_minus;
  double lambda1_plus = 0.0;
  double lambda1_minus = 0.0;
  /// lambda_2 of the spectrum the decomposition was built from
  double lambda2 = 0.0;
  DecompositionSource source = DecompositionSource::nodal;
  std::size_t components = 1;
  /// disconnected domain whose best component split exceeded lambda_2, so
  /// the nodal sets were used instead
  bool fell_back = false;

  double max_lambda1() const { return std::max(lambda1_plus, lambda1_minus); }
  GridDomain pieces() const { return unite(omega_plus, omega_minus); }
};

struct DecomposeOptions {
  SolveOptions solve{};
  /// relative slack on max(lambda1+-) <= lambda2 before the component split
  /// is rejected
  double budget = 0.01;
  /// |u2| below this fraction of max|u2| counts as zero
  double zero_tol = 1e-10;
};

/// Two disjoint subsets of omega realizing max(lambda1+-) <= lambda2(omega):
/// nodal sets of u2 on connected domains, a split of the connected
/// components otherwise. lambda1 of each piece comes from its own solve.
/// Throws DecompositionError when a nodal set is empty.
Decomposition decompose(const GridDomain& omega, const SpectrumResult& spec, const DecomposeOptions& opts = {});

}  // namespace speclab
