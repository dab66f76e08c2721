// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "speclab/config.hpp"
#include "speclab/corpus.hpp"
#include "speclab/errors.hpp"
#include "speclab/harness.hpp"
#include "speclab/nodal.hpp"
#include "speclab/operators.hpp"
#include "speclab/reference.hpp"
#include "speclab/sharpness.hpp"
#include "speclab/sparse.hpp"

using namespace speclab;
constexpr double pi = std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SparseSymMatrix dense_to_sparse(const oracle::Dense& a, std::size_t offset = 0,
                                std::vector<SparseSymMatrix::Entry>* into = nullptr) {
  std::vector<SparseSymMatrix::Entry> local;
  auto& e = into ? *into : local;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a[i][j] != 0.0) e.push_back({i + offset, j + offset, a[i][j]});
  return into ? SparseSymMatrix{} : SparseSymMatrix::from_entries(a.size(), e);
}

Outcome disk_eigenvalues() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto gen = [](double h) { return make_ball(1.0, {0, 0, 0}, h); };
  const auto s = spectrum_extrapolated(gen, 1.0 / 128, 3);
  const double secs = seconds_since(t0);
  const double j01 = reference::bessel_j_zeros(0, 1)[0], j11 = reference::bessel_j_zeros(1, 1)[0];
  const double e1 = rel(s.eigenvalues[0], j01 * j01), e2 = rel(s.eigenvalues[1], j11 * j11),
               e3 = rel(s.eigenvalues[2], j11 * j11);
  return {e1 <= 2e-3 && e2 <= 5e-3 && e3 <= 5e-3 && secs <= 60.0,
          fmt("lambda1 %.6f (rel %.2e), lambda2 %.6f (rel %.2e), lambda3 %.6f (rel %.2e), %.1f s", s.eigenvalues[0],
              e1, s.eigenvalues[1], e2, s.eigenvalues[2], e3, secs)};
}

Outcome torsion_values() {
  const auto disk = torsion_extrapolated([](double h) { return make_ball(1.0, {0, 0, 0}, h); }, 1.0 / 128);
  const auto theta_cfg = TwoBallConfig::for_total_measure(2, pi, {-1.5, 0, 0}, {1.5, 0, 0});
  const auto theta = torsion_extrapolated([&](double h) { return make_theta(theta_cfg, h); }, 1.0 / 128);
  const double eT = rel(disk.T, pi / 8), eW = rel(disk.sup_w, 0.25), eTh = rel(theta.T, pi / 16);
  return {eT <= 5e-3 && eW <= 1e-2 && eTh <= 5e-3,
          fmt("T(disk) %.6f (rel %.2e), sup w %.6f (rel %.2e), T(two balls) %.6f (rel %.2e)", disk.T, eT,
              disk.sup_w, eW, theta.T, eTh)};
}

Outcome two_ball_spectrum() {
  const auto cfg = TwoBallConfig::for_total_measure(2, pi, {-1.5, 0, 0}, {1.5, 0, 0});
  const auto s = spectrum_extrapolated([&](double h) { return make_theta(cfg, h); }, 1.0 / 128, 4);
  const double j01 = reference::bessel_j_zeros(0, 1)[0];
  const double target = 2 * j01 * j01;
  const double e1 = rel(s.eigenvalues[0], target), e2 = rel(s.eigenvalues[1], target);
  const auto clusters = s.clusters();
  const std::size_t mult = clusters.empty() ? 0 : clusters.front().multiplicity;
  return {e1 <= 5e-3 && e2 <= 5e-3 && mult == 2,
          fmt("lambda1 %.6f, lambda2 %.6f against %.6f (rel %.2e, %.2e), first cluster multiplicity %zu",
              s.eigenvalues[0], s.eigenvalues[1], target, e1, e2, mult)};
}

const char* const kKnown[] = {"FK", "KS", "SVI", "Talenti", "CY", "LemmaB", "LemmaB-lower", "torvol", "KJ1", "KJ2",
                              "claim"};

Outcome known_constants(const SweepReport& rep, double secs) {
  std::size_t violations = 0, rows = 0;
  std::string worst;
  for (const auto& r : rep.records) {
    if (!is_known_constant_id(r.id)) continue;
    ++rows;
    if (r.verdict == Verdict::violated) {
      ++violations;
      if (worst.empty()) worst = " first: " + r.id + " on " + r.domain;
    }
  }
  std::size_t present = 0;
  for (const char* id : kKnown) present += rep.aggregate(id) != nullptr;
  const bool ok = violations == 0 && rep.failures.empty() && present == std::size(kKnown) &&
                  rep.evaluations.size() >= 50 && secs <= 1800.0;
  return {ok, fmt("%zu domains, %zu known-constant rows, %zu violations, %zu failures, %zu/%zu ids, %.0f s%s",
                  rep.evaluations.size(), rows, violations, rep.failures.size(), present, std::size(kKnown), secs,
                  worst.c_str())};
}

Outcome decomposition_lemma(const SweepReport& rep) {
  const auto corpus = default_corpus();
  std::size_t connected = 0, within = 0;
  double worst = 0.0;
  std::string worst_label;
  for (const auto& ev : rep.evaluations) {
    if (!ev.decomposition) continue;
    const auto dom = ev.label;
    const auto it = std::find_if(corpus.begin(), corpus.end(), [&](const DomainSpec& d) { return d.label == dom; });
    if (it == corpus.end()) continue;
    if (connected_components(rasterize(it->shape, ev.h / 2)).size() != 1) continue;
    ++connected;
    const auto& dq = *ev.decomposition;
    const double mx = std::max(dq.lambda1_plus.value, dq.lambda1_minus.value);
    const double l2 = ev.omega.eig(2).value;
    const double r = std::abs(mx - l2) / l2;
    if (r <= 0.02) ++within;
    if (r > worst) {
      worst = r;
      worst_label = dom;
    }
  }
  return {within >= 10, fmt("%zu of %zu connected domains within 2%%, worst %.4f (%s)", within, connected, worst,
                            worst_label.c_str())};
}

Outcome theorem_stability(const SweepReport& coarse, const SweepReport& fine) {
  const std::vector<std::string> ids{"TH1", "TH2", "TH2bis"};
  const auto rows = compare_stability(coarse, fine, ids);
  bool ok = true;
  std::string detail;
  for (const auto& r : rows) {
    ok &= r.stable;
    detail += fmt("%s %.4f -> %.4f (change %.4f, budget %.4f); ", r.id.c_str(), r.coarse, r.fine, r.change, r.budget);
  }
  std::size_t gap_rows = 0, non_finite = 0;
  for (const auto* rep : {&coarse, &fine})
    for (const auto& rec : rep->records) {
      if (rec.id != "TH1" && rec.id != "TH2" && rec.id != "TH2bis") continue;
      double gap = std::nan(""), thr = std::nan("");
      for (const auto& [k, v] : rec.notes) {
        if (k == "delta_lambda2") gap = v;
        if (k == "delta_lambda2_threshold") thr = v;
      }
      if (!(gap > thr)) continue;
      ++gap_rows;
      if (!std::isfinite(rec.ratio)) ++non_finite;
    }
  ok &= non_finite == 0 && coarse.failures.empty() && fine.failures.empty();
  detail += fmt("%zu rows above the gap budget, %zu non-finite", gap_rows, non_finite);
  return {ok, detail};
}

Outcome sharpness_slopes(const std::string& config_path) {
  const auto cfg = load_config(config_path);
  const auto opts = sharpness_options(cfg);
  bool ok = true;
  std::size_t fitted = 0;
  double min_slope = INFINITY;
  std::string low;
  for (Family f : cfg.sharpness.families) {
    auto o = opts;
    o.t_grid = cfg.sharpness.grid_for(f);
    const auto spectra = family_spectra(f, o);
    for (int k = 1; k <= o.k_max; ++k) {
      try {
        const auto fit = fit_exponent(spectra, k, FitMode::positive_part, o);
        ++fitted;
        min_slope = std::min(min_slope, fit.slope);
        if (fit.slope < 0.4) {
          ok = false;
          low += fmt(" %s k=%d slope %.3f;", std::string(family_name(f)).c_str(), k, fit.slope);
        }
      } catch (const InsufficientDataError&) {
      }
    }
  }
  double worst_analytic = 0.0;
  for (int k = 1; k <= opts.k_max; ++k) {
    const auto fit = fit_exponent_analytic(k, cfg.sharpness.analytic_t_grid);
    worst_analytic = std::max(worst_analytic, std::abs(fit.slope - 1.0));
  }
  ok &= worst_analytic <= 0.05 && fitted > 0;
  return {ok, fmt("%zu positive-part fits, min slope %.3f, analytic |slope-1| <= %.4f%s", fitted, min_slope,
                  worst_analytic, low.c_str())};
}

Outcome disjoint_union(const std::string& config_path) {
  std::size_t merged_ok = 0;
  double worst = 0.0;
  for (std::uint64_t c = 0; c < 10; ++c) {
    std::mt19937_64 g(1000 + c);
    const std::size_t blocks = 2 + c % 3;
    std::vector<SparseSymMatrix::Entry> e;
    std::vector<std::vector<double>> parts;
    std::size_t n = 0;
    const int k = 4;
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::size_t m = 8 + g() % 12;
      const auto a = oracle::random_spd(m, g());
      dense_to_sparse(a, n, &e);
      n += m;
      std::vector<double> vals;
      for (const auto& p : smallest_eigenpairs(dense_to_sparse(a), k, {})) vals.push_back(p.value);
      parts.push_back(vals);
    }
    const auto whole = smallest_eigenpairs(SparseSymMatrix::from_entries(n, e), k);
    const auto merged = sorted_merge(parts, k);
    double dev = 0.0;
    for (int i = 0; i < k; ++i) dev = std::max(dev, rel(whole[i].value, merged[i]));
    worst = std::max(worst, dev);
    merged_ok += dev <= 1e-10;
  }
  const auto cfg = load_config(config_path);
  const auto opts = sharpness_options(cfg);
  const auto domains =
      cfg.sharpness.doubling_domains.empty() ? default_doubling_domains() : cfg.sharpness.doubling_domains;
  const auto fit = doubling_fit(domains, cfg.sharpness.doubling_k_max, opts);
  const bool ok = merged_ok == 10 && domains.size() >= 4 && fit.fit.r_squared >= 0.99;
  return {ok, fmt("sorted merge %zu/10 (max rel dev %.1e); doubling over %zu domains: power of 2 = %.4f, r2 %.5f, "
                  "matches %s",
                  merged_ok, worst, domains.size(), fit.power, fit.fit.r_squared, fit.matches.c_str())};
}

Outcome small_matrices() {
  std::size_t ok = 0;
  double worst = 0.0;
  for (std::uint64_t c = 0; c < 25; ++c) {
    std::mt19937_64 g(500 + c);
    const std::size_t n = 5 + g() % 36;
    const auto a = oracle::random_spd(n, g(), 0.1 + 0.05 * (c % 10));
    const auto ref = oracle::jacobi_eigenvalues(a);
    const int k = static_cast<int>(std::min<std::size_t>(6, n - 1));
    EigenOptions o;
    o.tol = 1e-12;
    const auto pairs = smallest_eigenpairs(dense_to_sparse(a), k, o);
    double dev = 0.0;
    for (int i = 0; i < k; ++i) dev = std::max(dev, rel(pairs[i].value, ref[i]));
    worst = std::max(worst, dev);
    ok += dev <= 1e-8;
  }
  return {ok == 25, fmt("%zu/25 within 1e-8, worst rel dev %.1e", ok, worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string root = argc > 1 ? argv[1] : ".";
  const std::string sharp_cfg = root + "/configs/sharpness.yaml";
  int failed = 0;
  auto report = [&](int n, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("criterion %d: %s  %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  };

  report(1, disk_eigenvalues);
  report(2, torsion_values);
  report(3, two_ball_spectrum);

  HarnessOptions coarse_opts;
  coarse_opts.h = 1.0 / 32;
  coarse_opts.k_max = 6;
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<SweepReport> coarse;
  double coarse_secs = 0.0;
  try {
    coarse = sweep(default_corpus(), coarse_opts);
    coarse_secs = seconds_since(t0);
  } catch (const std::exception& e) {
    std::printf("sweep at h = 1/32 threw: %s\n", e.what());
  }
  report(4, [&] { return coarse ? known_constants(*coarse, coarse_secs) : Outcome{false, "no sweep"}; });
  report(5, [&] { return coarse ? decomposition_lemma(*coarse) : Outcome{false, "no sweep"}; });
  report(6, [&] {
    if (!coarse) return Outcome{false, "no sweep"};
    auto fine_opts = coarse_opts;
    fine_opts.h = 1.0 / 64;
    return theorem_stability(*coarse, sweep(default_corpus(), fine_opts));
  });
  report(7, [&] { return sharpness_slopes(sharp_cfg); });
  report(8, [&] { return disjoint_union(sharp_cfg); });
  report(9, small_matrices);
  std::printf("%d of 9 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
