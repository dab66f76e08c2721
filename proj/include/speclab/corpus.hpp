#pragma once

#include <vector>

#include "speclab/harness.hpp"

namespace speclab {

/// Shipped planar corpus: every entry has measure pi, labels are unique.
/// Covers the disk, ellipses, rectangles, regular and irregular polygons,
/// two-ball sets at several separations, snapshots of the three families,
/// and a handful of disconnected and non-convex sets.
std::vector<DomainSpec> default_corpus();

/// Four ellipses of measure pi for the doubling probe. Curved boundaries keep
/// the staircase error smooth enough for the two-level extrapolation.
std::vector<DomainSpec> default_doubling_domains();

/// Two balls of measure omega_d / 2 with the given gap between them.
Shape theta_shape(int dim, double gap, double angle = 0.0);

}  // namespace speclab
