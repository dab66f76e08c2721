#include "speclab/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "speclab/errors.hpp"

namespace speclab {

namespace {

std::vector<std::size_t> neighbours(const GridFrame& f, std::size_t i) {
  std::vector<std::size_t> out;
  for (int a = 0; a < f.dim; ++a) {
    const std::size_t s = f.stride(a);
    out.push_back(i - s);
    out.push_back(i + s);
  }
  return out;
}

// interior cells never sit on the frame border, so neighbours stay in range
std::vector<int> label_components(const GridDomain& omega, int& count) {
  const GridFrame& f = omega.frame();
  std::vector<int> label(omega.mask().size(), -1);
  count = 0;
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < label.size(); ++seed) {
    if (!omega.inside(seed) || label[seed] >= 0) continue;
    label[seed] = count;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j : neighbours(f, i)) {
        if (omega.inside(j) && label[j] < 0) {
          label[j] = count;
          stack.push_back(j);
        }
      }
    }
    ++count;
  }
  return label;
}

GridDomain from_mask(const GridDomain& omega, std::vector<std::uint8_t> mask, std::string label) {
  return GridDomain(omega.frame(), std::move(mask), std::move(label));
}

double lambda1(const GridDomain& d, const SolveOptions& opts) {
  if (d.cell_count() < 2) {
    // a single cell: 1x1 operator
    d.require_nonempty();
    return 2.0 * d.dim() / (d.h() * d.h());
  }
  return spectrum(d, 1, opts).eigenvalues[0];
}

}  // namespace

std::vector<GridDomain> connected_components(const GridDomain& omega) {
  int count = 0;
  const auto label = label_components(omega, count);
  std::vector<std::vector<std::uint8_t>> masks(static_cast<std::size_t>(count),
                                               std::vector<std::uint8_t>(label.size(), 0));
  for (std::size_t i = 0; i < label.size(); ++i)
    if (label[i] >= 0) masks[static_cast<std::size_t>(label[i])][i] = 1;
  std::vector<GridDomain> out;
  for (int c = 0; c < count; ++c)
    out.push_back(from_mask(omega, std::move(masks[static_cast<std::size_t>(c)]),
                            omega.label() + "#" + std::to_string(c)));
  return out;
}

std::string_view source_name(DecompositionSource s) {
  return s == DecompositionSource::nodal ? "nodal" : "components";
}

namespace {

Decomposition nodal_split(const GridDomain& omega, const SpectrumResult& spec, const DecomposeOptions& opts) {
  const auto u = spec.lattice_field(1);
  double umax = 0.0;
  for (double v : u) umax = std::max(umax, std::abs(v));
  const double zero = opts.zero_tol * umax;

  std::vector<std::uint8_t> plus(u.size(), 0), minus(u.size(), 0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!omega.inside(i)) continue;
    if (u[i] > zero) plus[i] = 1;
    else if (u[i] < -zero) minus[i] = 1;
  }
  // open each set: drop cells with no neighbour of the same sign
  auto open = [&](std::vector<std::uint8_t>& m) {
    std::vector<std::uint8_t> keep = m;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (!m[i]) continue;
      bool lonely = true;
      for (std::size_t j : neighbours(omega.frame(), i)) lonely = lonely && !m[j];
      if (lonely) keep[i] = 0;
    }
    m = std::move(keep);
  };
  open(plus);
  open(minus);
  const auto np = std::count(plus.begin(), plus.end(), 1);
  const auto nm = std::count(minus.begin(), minus.end(), 1);
  if (np == 0 || nm == 0)
    throw DecompositionError("nodal sets of u2 on '" + omega.label() + "' are sign-degenerate");
  if (nm > np) std::swap(plus, minus);

  Decomposition d{from_mask(omega, std::move(plus), omega.label() + "+"),
                  from_mask(omega, std::move(minus), omega.label() + "-")};
  d.lambda1_plus = lambda1(d.omega_plus, opts.solve);
  d.lambda1_minus = lambda1(d.omega_minus, opts.solve);
  d.lambda2 = spec.eigenvalues[1];
  d.source = DecompositionSource::nodal;
  return d;
}

}  // namespace

Decomposition decompose(const GridDomain& omega, const SpectrumResult& spec, const DecomposeOptions& opts) {
  if (spec.eigenvalues.size() < 2 || spec.eigenfunctions.size() < 2 || !spec.domain)
    throw ArgumentError("decompose: spectrum must contain u2");
  if (!(spec.domain->frame() == omega.frame()) || spec.domain->mask() != omega.mask())
    throw GridMismatchError("decompose: spectrum was computed on a different domain");

  auto comps = connected_components(omega);
  if (comps.size() < 2) {
    auto d = nodal_split(omega, spec, opts);
    d.components = comps.size();
    return d;
  }

  const std::size_t c = comps.size();
  std::vector<double> lam(c);
  for (std::size_t i = 0; i < c; ++i) lam[i] = lambda1(comps[i], opts.solve);

  // group assignment: bit i set -> component i in the first group
  std::vector<bool> in_plus(c, false);
  if (c <= 12) {
    const double total = omega.measure();
    double best_max = std::numeric_limits<double>::infinity();
    double best_balance = std::numeric_limits<double>::infinity();
    const unsigned long limit = 1UL << (c - 1);
    // component 0 is always in the first group; every split appears once
    for (unsigned long bits = 0; bits < limit; ++bits) {
      const unsigned long set = (bits << 1) | 1UL;
      if (set == (1UL << c) - 1) continue;
      double l1 = std::numeric_limits<double>::infinity(), l2 = l1, m1 = 0.0;
      for (std::size_t i = 0; i < c; ++i) {
        if (set >> i & 1UL) {
          l1 = std::min(l1, lam[i]);
          m1 += comps[i].measure();
        } else {
          l2 = std::min(l2, lam[i]);
        }
      }
      const double mx = std::max(l1, l2);
      const double balance = std::abs(2.0 * m1 - total);
      const double tie = 1e-12 * mx;
      if (mx < best_max - tie || (std::abs(mx - best_max) <= tie && balance < best_balance)) {
        best_max = mx;
        best_balance = balance;
        for (std::size_t i = 0; i < c; ++i) in_plus[i] = (set >> i & 1UL) != 0;
      }
    }
  } else {
    std::vector<std::size_t> order(c);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lam[a] < lam[b]; });
    in_plus[order[0]] = true;
    double mp = comps[order[0]].measure(), mm = comps[order[1]].measure();
    std::vector<std::size_t> rest(order.begin() + 2, order.end());
    std::stable_sort(rest.begin(), rest.end(),
                     [&](std::size_t a, std::size_t b) { return comps[a].measure() > comps[b].measure(); });
    for (std::size_t i : rest) {
      if (mp <= mm) {
        in_plus[i] = true;
        mp += comps[i].measure();
      } else {
        mm += comps[i].measure();
      }
    }
  }

  std::vector<std::uint8_t> plus(omega.mask().size(), 0), minus(omega.mask().size(), 0);
  for (std::size_t i = 0; i < c; ++i) {
    auto& target = in_plus[i] ? plus : minus;
    const auto& m = comps[i].mask();
    for (std::size_t j = 0; j < m.size(); ++j)
      if (m[j]) target[j] = 1;
  }
  if (std::count(minus.begin(), minus.end(), 1) > std::count(plus.begin(), plus.end(), 1)) std::swap(plus, minus);
  Decomposition d{from_mask(omega, std::move(plus), omega.label() + "+"),
                  from_mask(omega, std::move(minus), omega.label() + "-")};
  d.lambda1_plus = lambda1(d.omega_plus, opts.solve);
  d.lambda1_minus = lambda1(d.omega_minus, opts.solve);
  d.lambda2 = spec.eigenvalues[1];
  d.source = DecompositionSource::components;
  d.components = c;

  if (d.max_lambda1() > d.lambda2 * (1.0 + opts.budget)) {
    auto n = nodal_split(omega, spec, opts);
    n.components = c;
    n.fell_back = true;
    return n;
  }
  return d;
}

}  // namespace speclab
