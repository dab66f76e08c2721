#include "speclab/operators.hpp"

#include <algorithm>
#include <cmath>

#include "speclab/errors.hpp"

namespace speclab {

namespace {

// lattice position -> unknown index, -1 for exterior cells
std::vector<long> unknown_index(const GridDomain& d) {
  std::vector<long> idx(d.mask().size(), -1);
  long next = 0;
  for (std::size_t i = 0; i < idx.size(); ++i)
    if (d.inside(i)) idx[i] = next++;
  return idx;
}

std::vector<double> expand(const GridDomain& d, std::span<const double> values) {
  std::vector<double> out(d.mask().size(), 0.0);
  std::size_t next = 0;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (d.inside(i)) out[i] = values[next++];
  return out;
}

long floor_div2(long v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

}  // namespace

SparseSymMatrix assemble_laplacian(const GridDomain& domain) {
  domain.require_nonempty();
  const GridFrame& f = domain.frame();
  const auto idx = unknown_index(domain);
  const double inv_h2 = 1.0 / (f.h * f.h);
  std::vector<SparseSymMatrix::Entry> e;
  e.reserve(domain.cell_count() * static_cast<std::size_t>(2 * f.dim + 1));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0) continue;
    const auto row = static_cast<std::size_t>(idx[i]);
    e.push_back({row, row, 2.0 * f.dim * inv_h2});
    for (int a = 0; a < f.dim; ++a) {
      const std::size_t s = f.stride(a);
      for (const std::size_t nb : {i - s, i + s}) {
        if (idx[nb] >= 0) e.push_back({row, static_cast<std::size_t>(idx[nb]), -inv_h2});
      }
    }
  }
  return SparseSymMatrix::from_entries(domain.cell_count(), e);
}

std::vector<Cluster> detect_clusters(std::span<const double> values, double rel_tol) {
  std::vector<Cluster> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!out.empty()) {
      Cluster& c = out.back();
      const double prev = values[i - 1];
      if (std::abs(values[i] - prev) <= rel_tol * std::max(std::abs(values[i]), std::abs(prev))) {
        c.mean = (c.mean * static_cast<double>(c.multiplicity) + values[i]) /
                 static_cast<double>(c.multiplicity + 1);
        ++c.multiplicity;
        continue;
      }
    }
    out.push_back({i, 1, values[i]});
  }
  return out;
}

std::vector<double> SpectrumResult::lattice_field(std::size_t index) const {
  if (!domain || index >= eigenfunctions.size()) throw ArgumentError("no such eigenfunction");
  return expand(*domain, eigenfunctions[index]);
}

std::vector<double> TorsionResult::lattice_field() const {
  if (!domain) throw ArgumentError("torsion result has no domain");
  return expand(*domain, w);
}

SpectrumResult spectrum(const GridDomain& domain, int k, const SolveOptions& options) {
  const SparseSymMatrix A = assemble_laplacian(domain);
  const auto pairs = smallest_eigenpairs(A, k, options.eigen);
  SpectrumResult r;
  r.h = domain.frame().h;
  const double scale = 1.0 / std::sqrt(domain.frame().cell_volume());
  for (const auto& p : pairs) {
    r.eigenvalues.push_back(p.value);
    std::vector<double> u = p.vector;
    for (double& x : u) x *= scale;
    r.eigenfunctions.push_back(std::move(u));
  }
  r.error_estimate.assign(r.eigenvalues.size(), 0.0);
  r.domain = std::make_shared<const GridDomain>(domain);
  return r;
}

SpectrumResult extrapolate(const SpectrumResult& coarse, const SpectrumResult& fine) {
  if (coarse.eigenvalues.size() != fine.eigenvalues.size())
    throw ArgumentError("extrapolate: spectra of different length");
  SpectrumResult r = fine;
  r.extrapolated = true;
  r.coarse = coarse.eigenvalues;
  r.fine = fine.eigenvalues;
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    r.eigenvalues[i] = 2.0 * fine.eigenvalues[i] - coarse.eigenvalues[i];
    r.error_estimate[i] = std::abs(fine.eigenvalues[i] - coarse.eigenvalues[i]);
  }
  return r;
}

SpectrumResult spectrum_extrapolated(const DomainGenerator& generator, double h, int k,
                                     const SolveOptions& options) {
  const GridDomain coarse_domain = generator(h);
  const GridDomain fine_domain = generator(h / 2.0);
  const SpectrumResult coarse = spectrum(coarse_domain, k, options);
  SolveOptions fine_opts = options;
  fine_opts.eigen.start.clear();
  for (const auto& u : coarse.eigenfunctions)
    fine_opts.eigen.start.push_back(prolongate(coarse_domain, u, fine_domain));
  const SpectrumResult fine = spectrum(fine_domain, k, fine_opts);
  return extrapolate(coarse, fine);
}

TorsionResult torsion(const GridDomain& domain, const SolveOptions& options) {
  const SparseSymMatrix A = assemble_laplacian(domain);
  const std::size_t n = A.size();
  const std::vector<double> ones(n, 1.0);
  std::vector<double> w = SpdFactorization(A).solve(ones);
  // polish / certify the residual with CG started from the direct solution
  w = cg_solve(A, ones, options.cg_tol, options.cg_max_iter, w);

  const GridFrame& f = domain.frame();
  const double vol = f.cell_volume();
  TorsionResult r;
  r.h = f.h;
  double sum = 0.0;
  for (double x : w) sum += x;
  const auto Aw = A * std::span<const double>(w);
  double wAw = 0.0;
  for (std::size_t i = 0; i < n; ++i) wAw += w[i] * Aw[i];
  r.T = sum * vol;
  r.energy_T = (2.0 * sum - wAw) * vol;
  r.sup_w = *std::max_element(w.begin(), w.end());

  std::size_t next = 0;
  for (std::size_t i = 0; i < domain.mask().size(); ++i) {
    if (!domain.inside(i)) continue;
    bool at_boundary = false;
    for (int a = 0; a < f.dim && !at_boundary; ++a) {
      const std::size_t s = f.stride(a);
      at_boundary = !domain.inside(i - s) || !domain.inside(i + s);
    }
    if (at_boundary) r.boundary_grad_max = std::max(r.boundary_grad_max, std::abs(w[next]) / f.h);
    ++next;
  }
  r.w = std::move(w);
  r.domain = std::make_shared<const GridDomain>(domain);
  return r;
}

TorsionResult extrapolate(const TorsionResult& coarse, const TorsionResult& fine) {
  TorsionResult r = fine;
  r.extrapolated = true;
  r.T = 2.0 * fine.T - coarse.T;
  r.energy_T = 2.0 * fine.energy_T - coarse.energy_T;
  r.sup_w = 2.0 * fine.sup_w - coarse.sup_w;
  r.boundary_grad_max = 2.0 * fine.boundary_grad_max - coarse.boundary_grad_max;
  r.T_error = std::abs(fine.T - coarse.T);
  r.sup_w_error = std::abs(fine.sup_w - coarse.sup_w);
  r.boundary_grad_error = std::abs(fine.boundary_grad_max - coarse.boundary_grad_max);
  return r;
}

TorsionResult torsion_extrapolated(const DomainGenerator& generator, double h, const SolveOptions& options) {
  return extrapolate(torsion(generator(h), options), torsion(generator(h / 2.0), options));
}

std::vector<double> prolongate(const GridDomain& coarse, std::span<const double> field,
                               const GridDomain& fine) {
  const GridFrame& cf = coarse.frame();
  const GridFrame& ff = fine.frame();
  if (cf.dim != ff.dim || std::abs(ff.h * 2.0 - cf.h) > 1e-15 * cf.h)
    throw GridMismatchError("prolongate: fine spacing must be half the coarse spacing");
  if (field.size() != coarse.cell_count()) throw ArgumentError("prolongate: field size mismatch");
  const auto full = expand(coarse, field);
  std::vector<double> out;
  out.reserve(fine.cell_count());
  for (std::size_t i = 0; i < fine.mask().size(); ++i) {
    if (!fine.inside(i)) continue;
    const auto c = ff.coords(i);
    std::array<int, 3> p{0, 0, 0};
    bool ok = true;
    for (int a = 0; a < ff.dim; ++a) {
      const long g = floor_div2(ff.lo[a] + c[a]) - cf.lo[a];
      ok = ok && g >= 0 && g < cf.n[a];
      p[a] = static_cast<int>(g);
    }
    out.push_back(ok ? full[cf.linear(p[0], p[1], p[2])] : 0.0);
  }
  return out;
}

}  // namespace speclab
