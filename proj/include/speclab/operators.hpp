#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "speclab/geometry.hpp"
#include "speclab/sparse.hpp"

namespace speclab {

/// 5-point (2-D) / 7-point (3-D) Dirichlet Laplacian over the interior
/// cells, numbered in increasing linear order. Exterior neighbours are
/// Dirichlet zeros.
SparseSymMatrix assemble_laplacian(const GridDomain& domain);

/// A run of eigenvalues that agree to a relative tolerance.
struct Cluster {
  std::size_t first = 0;  // 0-based index of the first member
  std::size_t multiplicity = 0;
  double mean = 0.0;
};

std::vector<Cluster> detect_clusters(std::span<const double> values, double rel_tol = 1e-4);

struct SolveOptions {
  EigenOptions eigen{};
  double cg_tol = 1e-10;
  int cg_max_iter = 200000;
};

struct SpectrumResult {
  std::vector<double> eigenvalues;
  /// Values on the interior cells of `domain`, with sum(u^2) h^d = 1.
  std::vector<std::vector<double>> eigenfunctions;
  double h = 0.0;
  bool extrapolated = false;
  std::vector<double> error_estimate;
  /// Raw values on the coarse and fine levels when extrapolated.
  std::vector<double> coarse;
  std::vector<double> fine;
  std::shared_ptr<const GridDomain> domain;

  std::vector<Cluster> clusters(double rel_tol = 1e-4) const {
    return detect_clusters(eigenvalues, rel_tol);
  }
  /// Eigenfunction expanded to the full frame, zero on exterior cells.
  std::vector<double> lattice_field(std::size_t index) const;
};

struct TorsionResult {
  std::vector<double> w;  // interior cells
  double T = 0.0;         // sum(w) h^d
  double energy_T = 0.0;  // 2 int w - int |grad w|^2, discrete
  double sup_w = 0.0;
  double boundary_grad_max = 0.0;
  double h = 0.0;
  bool extrapolated = false;
  double T_error = 0.0;
  double sup_w_error = 0.0;
  double boundary_grad_error = 0.0;
  std::shared_ptr<const GridDomain> domain;

  std::vector<double> lattice_field() const;
};

using DomainGenerator = std::function<GridDomain(double h)>;

/// First k Dirichlet eigenpairs at the domain's spacing.
SpectrumResult spectrum(const GridDomain& domain, int k, const SolveOptions& options = {});

/// Solves at h and h/2 and Richardson-extrapolates assuming a first-order
/// boundary error: lambda* = 2 lambda_{h/2} - lambda_h, with error estimate
/// |lambda_{h/2} - lambda_h|. Eigenfunctions are those of the fine level.
SpectrumResult spectrum_extrapolated(const DomainGenerator& generator, double h, int k,
                                     const SolveOptions& options = {});
SpectrumResult extrapolate(const SpectrumResult& coarse, const SpectrumResult& fine);

TorsionResult torsion(const GridDomain& domain, const SolveOptions& options = {});
TorsionResult torsion_extrapolated(const DomainGenerator& generator, double h,
                                   const SolveOptions& options = {});
TorsionResult extrapolate(const TorsionResult& coarse, const TorsionResult& fine);

/// Injects a field on the interior cells of `coarse` onto the interior cells
/// of `fine` (spacing h/2, same lattice family): each fine cell takes its
/// parent's value, zero where the parent is exterior.
std::vector<double> prolongate(const GridDomain& coarse, std::span<const double> field,
                               const GridDomain& fine);

}  // namespace speclab
