#include "speclab/run.hpp"

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "speclab/asymmetry.hpp"
#include "speclab/corpus.hpp"
#include "speclab/errors.hpp"
#include "speclab/parallel.hpp"
#include "speclab/report.hpp"

namespace speclab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

class Output {
 public:
  explicit Output(const std::string& dir) : dir_(dir) {
    fs::create_directories(dir_ / "plots");
  }
  void write(const std::string& name, const std::string& content) {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (dir_ / name).string());
    f << content;
    files.push_back(name);
  }
  template <class Fn>
  void stream(const std::string& name, Fn&& fn) {
    std::ostringstream s;
    fn(s);
    write(name, s.str());
  }
  std::vector<std::string> files;

 private:
  fs::path dir_;
};

std::string csv_line(const std::vector<std::string>& f) {
  std::string s;
  for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "," : "") + f[i];
  return s + "\n";
}

SolveOptions solve_options(const RunConfig& cfg) { return harness_options(cfg, 0).solve; }

DomainGenerator generator(const DomainSpec& d) {
  return [d](double h) { return rasterize(d.shape, h, d.label); };
}

// --- eig / torsion / asym ------------------------------------------------

RunSummary run_eig(const RunConfig& cfg, Output& out, std::ostream& log) {
  RunSummary sum;
  const auto solve = solve_options(cfg);
  const auto& ladder = cfg.h_ladder;
  struct Row {
    std::vector<SpectrumResult> raw;
    std::vector<SpectrumResult> extrapolated;
    std::string error;
  };
  std::vector<Row> rows(cfg.domains.size());
  parallel_for(cfg.domains.size(), cfg.jobs, [&](std::size_t i) {
    try {
      const auto& d = cfg.domains[i];
      for (double h : ladder) rows[i].raw.push_back(spectrum(rasterize(d.shape, h, d.label), cfg.k_max, solve));
      for (std::size_t l = 0; l + 1 < ladder.size(); ++l)
        rows[i].extrapolated.push_back(extrapolate(rows[i].raw[l], rows[i].raw[l + 1]));
    } catch (const std::exception& e) {
      rows[i].error = e.what();
    }
  });
  std::string csv = csv_line({"domain", "k", "h", "lambda", "extrapolated", "error_budget", "multiplicity",
                              "theta_reference"});
  json j = json::array();
  Plot plot{"eigenvalue convergence", "h", "lambda_k", true, false, {}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& d = cfg.domains[i];
    if (!rows[i].error.empty()) {
      ++sum.failures;
      log << "FAILED " << d.label << ": " << rows[i].error << "\n";
      continue;
    }
    json jd{{"domain", d.label}};
    auto emit = [&](const SpectrumResult& s, bool ex) {
      std::vector<std::size_t> mult(s.eigenvalues.size(), 1);
      for (const auto& c : s.clusters())
        for (std::size_t m = 0; m < c.multiplicity; ++m) mult[c.first + m] = c.multiplicity;
      json levels = json::array();
      for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
        const double err = ex ? s.error_estimate[k] : std::nan("");
        csv += csv_line({d.label, std::to_string(k + 1), format_number(s.h), format_number(s.eigenvalues[k]),
                         ex ? "true" : "false", format_number(err), std::to_string(mult[k]), "none"});
        levels.push_back({{"k", k + 1}, {"lambda", s.eigenvalues[k]}, {"multiplicity", mult[k]}});
      }
      return levels;
    };
    json raw = json::array(), ex = json::array();
    for (const auto& s : rows[i].raw) raw.push_back({{"h", s.h}, {"values", emit(s, false)}});
    for (const auto& s : rows[i].extrapolated) ex.push_back({{"h", s.h}, {"values", emit(s, true)}});
    jd["levels"] = raw;
    jd["extrapolated"] = ex;
    j.push_back(jd);
    for (int k = 0; k < cfg.k_max; ++k) {
      PlotSeries s{d.label + " k=" + std::to_string(k + 1), {}, {}, std::nullopt};
      for (const auto& r : rows[i].raw) {
        s.x.push_back(r.h);
        s.y.push_back(r.eigenvalues[static_cast<std::size_t>(k)]);
      }
      if (plot.series.size() < 8) plot.series.push_back(std::move(s));
    }
    const auto& best = rows[i].extrapolated.empty() ? rows[i].raw.back() : rows[i].extrapolated.back();
    log << d.label << ":";
    for (double v : best.eigenvalues) log << " " << format_number(v);
    log << "\n";
  }
  out.write("records.csv", csv);
  out.write("records.json", j.dump(1) + "\n");
  out.write("plots/convergence.svg", render_svg(plot));
  return sum;
}

RunSummary run_torsion(const RunConfig& cfg, Output& out, std::ostream& log) {
  RunSummary sum;
  const auto solve = solve_options(cfg);
  std::vector<std::optional<TorsionResult>> res(cfg.domains.size());
  std::vector<std::string> err(cfg.domains.size());
  parallel_for(cfg.domains.size(), cfg.jobs, [&](std::size_t i) {
    try {
      res[i] = cfg.h_ladder.size() >= 2 ? torsion_extrapolated(generator(cfg.domains[i]), cfg.h_ladder[0], solve)
                                        : torsion(rasterize(cfg.domains[i].shape, cfg.h_ladder[0]), solve);
    } catch (const std::exception& e) {
      err[i] = e.what();
    }
  });
  std::string csv = csv_line({"domain", "h", "torsion", "sup_w", "boundary_gradient", "error_budget", "sup_w_error",
                              "boundary_gradient_error", "theta_reference"});
  json j = json::array();
  for (std::size_t i = 0; i < res.size(); ++i) {
    const auto& d = cfg.domains[i];
    if (!res[i]) {
      ++sum.failures;
      log << "FAILED " << d.label << ": " << err[i] << "\n";
      continue;
    }
    const auto& t = *res[i];
    csv += csv_line({d.label, format_number(cfg.h_ladder[0]), format_number(t.T), format_number(t.sup_w),
                     format_number(t.boundary_grad_max), format_number(t.T_error), format_number(t.sup_w_error),
                     format_number(t.boundary_grad_error), "none"});
    j.push_back({{"domain", d.label}, {"h", cfg.h_ladder[0]}, {"extrapolated", t.extrapolated}, {"torsion", t.T},
                 {"torsion_error", t.T_error}, {"sup_w", t.sup_w}, {"boundary_gradient", t.boundary_grad_max}});
    log << d.label << ": T = " << format_number(t.T) << " +- " << format_number(t.T_error)
        << ", sup w = " << format_number(t.sup_w) << "\n";
  }
  out.write("records.csv", csv);
  out.write("records.json", j.dump(1) + "\n");
  return sum;
}

RunSummary run_asym(const RunConfig& cfg, Output& out, std::ostream& log) {
  RunSummary sum;
  const double h = cfg.h_ladder.back();
  std::vector<std::optional<std::pair<AsymmetryResult, AsymmetryResult>>> res(cfg.domains.size());
  std::vector<std::string> err(cfg.domains.size());
  parallel_for(cfg.domains.size(), cfg.jobs, [&](std::size_t i) {
    try {
      const auto g = rasterize(cfg.domains[i].shape, h, cfg.domains[i].label);
      AsymmetryOptions o;
      o.reference_measure = unit_ball_volume(g.dim());
      res[i].emplace(fraenkel1(g, o), fraenkel2(g, o));
    } catch (const std::exception& e) {
      err[i] = e.what();
    }
  });
  std::string csv = csv_line({"domain", "h", "fraenkel1", "fraenkel2", "ball_center_x", "ball_center_y",
                              "pair_center1_x", "pair_center1_y", "pair_center2_x", "pair_center2_y", "pair_radius",
                              "error_budget", "theta_reference"});
  json j = json::array();
  for (std::size_t i = 0; i < res.size(); ++i) {
    const auto& d = cfg.domains[i];
    if (!res[i]) {
      ++sum.failures;
      log << "FAILED " << d.label << ": " << err[i] << "\n";
      continue;
    }
    const auto& [a1, a2] = *res[i];
    const auto& p = *a2.pair;
    // one lattice layer along the boundary is the resolution of a counted asymmetry
    csv += csv_line({d.label, format_number(h), format_number(a1.value), format_number(a2.value),
                     format_number(a1.ball.center[0]), format_number(a1.ball.center[1]), format_number(p.center1[0]),
                     format_number(p.center1[1]), format_number(p.center2[0]), format_number(p.center2[1]),
                     format_number(p.radius), format_number(h), "analytic"});
    j.push_back({{"domain", d.label},
                 {"h", h},
                 {"fraenkel1", a1.value},
                 {"fraenkel2", a2.value},
                 {"ball", {{"center", {a1.ball.center[0], a1.ball.center[1]}}, {"radius", a1.ball.radius}}},
                 {"pair",
                  {{"center1", {p.center1[0], p.center1[1]}}, {"center2", {p.center2[0], p.center2[1]}}, {"radius", p.radius}}},
                 {"hit_search_box", a1.hit_search_box || a2.hit_search_box}});
    log << d.label << ": F1 = " << format_number(a1.value) << ", F2 = " << format_number(a2.value) << "\n";
  }
  out.write("records.csv", csv);
  out.write("records.json", j.dump(1) + "\n");
  return sum;
}

// --- verify / sweep -------------------------------------------------------

double note(const InequalityRecord& r, const std::string& key) {
  for (const auto& [k, v] : r.notes)
    if (k == key) return v;
  return std::nan("");
}

void sweep_plots(const SweepReport& rep, Output& out) {
  Plot th{"theorem ratios against the lambda_2 gap", "lambda_2(Omega) - lambda_2(Theta)", "ratio", true, true, {}};
  for (const char* id : {"TH1", "TH2", "TH2bis"}) {
    PlotSeries s{id, {}, {}, std::nullopt};
    for (const auto& r : rep.records)
      if (r.id == id && std::isfinite(r.ratio)) {
        s.x.push_back(note(r, "delta_lambda2"));
        s.y.push_back(r.ratio);
      }
    th.series.push_back(std::move(s));
  }
  out.write("plots/theorem-ratios.svg", render_svg(th));

  Plot q{"quantitative deficits against asymmetry", "asymmetry power", "eigenvalue deficit", true, true, {}};
  for (const char* id : {"qFK", "qKS"}) {
    PlotSeries s{id, {}, {}, std::nullopt};
    for (const auto& r : rep.records)
      if (r.id == id) {
        s.x.push_back(r.rhs_constant_free);
        s.y.push_back(r.lhs);
      }
    q.series.push_back(std::move(s));
  }
  out.write("plots/quantitative.svg", render_svg(q));
}

void log_sweep(const SweepReport& rep, std::ostream& log) {
  log << "h = " << format_number(rep.h) << " (fine level " << format_number(rep.h / 2) << "), "
      << rep.evaluations.size() << " domains, " << rep.records.size() << " records\n";
  for (const auto& a : rep.aggregates) {
    log << "  " << a.id << ": rows " << a.rows;
    if (is_known_constant_id(a.id)) log << ", violations " << a.violations << ", within budget " << a.within_budget;
    log << ", max ratio " << format_number(a.max_ratio);
    if (!a.argmax_domain.empty()) log << " (" << a.argmax_domain << ", k=" << a.argmax_k << ")";
    log << ", min ratio " << format_number(a.min_ratio);
    if (a.infinite) log << ", infinite " << a.infinite;
    log << "\n";
  }
  for (const auto& f : rep.failures) log << "  FAILED " << f.domain << ": " << f.error << "\n";
}

std::size_t known_violations(const SweepReport& rep) {
  std::size_t n = 0;
  for (const auto& r : rep.records) n += is_known_constant_id(r.id) && r.verdict == Verdict::violated;
  return n;
}

RunSummary run_sweep(const RunConfig& cfg, Output& out, std::ostream& log) {
  RunSummary sum;
  const auto rep = sweep(cfg.domains, harness_options(cfg, 0), cfg.jobs);
  log_sweep(rep, log);
  std::vector<StabilityRow> stability;
  std::optional<SweepReport> fine;
  if (cfg.command == Command::sweep && cfg.stability) {
    fine.emplace(sweep(cfg.domains, harness_options(cfg, 1), cfg.jobs));
    log_sweep(*fine, log);
    stability = compare_stability(rep, *fine, {"TH1", "TH2", "TH2bis", "lambda1-stability", "qFK", "qKS"});
    for (const auto& s : stability)
      log << "  stability " << s.id << ": " << format_number(s.coarse) << " -> " << format_number(s.fine)
          << ", change " << format_number(s.change) << " vs budget " << format_number(s.budget)
          << (s.stable ? " stable" : " UNSTABLE") << "\n";
  }
  out.stream("records.csv", [&](std::ostream& o) { write_records_csv(o, rep.records); });
  out.stream("records.json", [&](std::ostream& o) { write_sweep_json(o, rep, stability); });
  out.stream("aggregates.csv", [&](std::ostream& o) { write_aggregates_csv(o, rep.aggregates); });
  if (fine) {
    out.stream("records-h2.csv", [&](std::ostream& o) { write_records_csv(o, fine->records); });
    out.stream("stability.csv", [&](std::ostream& o) { write_stability_csv(o, stability); });
  }
  sweep_plots(rep, out);
  sum.violations = known_violations(rep) + (fine ? known_violations(*fine) : 0);
  sum.failures = rep.failures.size() + (fine ? fine->failures.size() : 0);
  return sum;
}

// --- sharpness --------------------------------------------------------------

RunSummary run_sharpness(const RunConfig& cfg, Output& out, std::ostream& log) {
  RunSummary sum;
  const auto opts = sharpness_options(cfg);
  std::vector<ExponentFit> fits;
  json skipped = json::array();
  std::map<Family, Plot> plots;
  for (Family f : cfg.sharpness.families) {
    FamilySpectra spectra;
    auto fopts = opts;
    fopts.t_grid = cfg.sharpness.grid_for(f);
    try {
      spectra = family_spectra(f, fopts);
    } catch (const std::exception& e) {
      ++sum.failures;
      log << "FAILED " << family_name(f) << ": " << e.what() << "\n";
      continue;
    }
    Plot& p = plots[f];
    p = {std::string(family_name(f)) + ": positive part against the lambda_2 gap", "lambda_2 - lambda_2(Theta)",
         "(lambda_k - lambda_k(Theta))+", true, true, {}};
    for (int k = 1; k <= opts.k_max; ++k) {
      for (FitMode mode : {FitMode::positive_part, FitMode::absolute}) {
        try {
          auto fit = fit_exponent(spectra, k, mode, opts);
          const bool consistent = mode != FitMode::positive_part || fit.slope >= 0.5 - opts.fit_tolerance;
          log << family_name(f) << " k=" << k << " " << fit_mode_name(mode) << ": slope " << format_number(fit.slope)
              << " r2 " << format_number(fit.r_squared) << " n " << fit.n_points
              << (consistent ? "" : "  BELOW 1/2 - tolerance") << "\n";
          if (mode == FitMode::positive_part) {
            PlotSeries s{"k=" + std::to_string(k), {}, {}, LineFit{fit.slope, fit.intercept, fit.r_squared}};
            for (const auto& smp : fit.samples)
              if (smp.kept) {
                s.x.push_back(smp.d2.value);
                s.y.push_back(smp.dk.value);
              }
            p.series.push_back(std::move(s));
          }
          fits.push_back(std::move(fit));
        } catch (const InsufficientDataError& e) {
          skipped.push_back({{"family", family_name(f)}, {"k", k}, {"mode", fit_mode_name(mode)}, {"reason", e.what()}});
        }
      }
    }
  }
  for (int k = 1; k <= opts.k_max; ++k) {
    auto fit = fit_exponent_analytic(k, cfg.sharpness.analytic_t_grid);
    log << "volume-split analytic k=" << k << ": slope " << format_number(fit.slope) << "\n";
    fits.push_back(std::move(fit));
  }

  std::optional<DoublingFit> doubling;
  std::vector<InequalityRecord> records;
  const auto domains =
      cfg.sharpness.doubling_domains.empty() ? default_doubling_domains() : cfg.sharpness.doubling_domains;
  try {
    doubling = doubling_fit(domains, cfg.sharpness.doubling_k_max, opts);
    log << "doubling: log2 prefactor " << format_number(doubling->power) << " (printed "
        << format_number(doubling->printed_power) << ", scaling law " << format_number(doubling->scaling_power)
        << "), matches " << doubling->matches << ", r2 " << format_number(doubling->fit.r_squared) << "\n";
    for (const auto& p : doubling->points) {
      auto r = ratio_record("doubling", p.domain, p.k, opts.h, p.lhs, p.rhs, BudgetPolicy{opts.floor});
      r.theta_reference = "analytic";
      r.notes.emplace_back("printed_prefactor", std::pow(2.0, doubling->printed_power));
      r.notes.emplace_back("scaling_law_discrepancy", p.scaling_discrepancy);
      records.push_back(std::move(r));
    }
    Plot p{"doubling probe", "|lambda_2k(doubled) - lambda_2k(Theta)|", "|lambda_k(Omega) - lambda_k(B)|", true, true, {}};
    PlotSeries s{"measured", {}, {}, std::nullopt};
    for (const auto& pt : doubling->points) {
      s.x.push_back(pt.rhs.value);
      s.y.push_back(pt.lhs.value);
    }
    p.series.push_back(std::move(s));
    out.write("plots/doubling.svg", render_svg(p));
  } catch (const std::exception& e) {
    ++sum.failures;
    log << "FAILED doubling probe: " << e.what() << "\n";
  }

  out.stream("fits.csv", [&](std::ostream& o) { write_fits_csv(o, fits); });
  out.stream("records.csv", [&](std::ostream& o) { write_records_csv(o, records); });
  std::ostringstream js;
  write_fits_json(js, fits, doubling);
  json j = json::parse(js.str());
  j["skipped"] = skipped;
  out.write("records.json", j.dump(1) + "\n");
  for (auto& [f, p] : plots) out.write("plots/sharpness-" + std::string(family_name(f)) + ".svg", render_svg(p));
  return sum;
}

}  // namespace

RunSummary run(const RunConfig& cfg, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  Output out(cfg.out);
  RunSummary sum;
  switch (cfg.command) {
    case Command::eig: sum = run_eig(cfg, out, log); break;
    case Command::torsion: sum = run_torsion(cfg, out, log); break;
    case Command::asym: sum = run_asym(cfg, out, log); break;
    case Command::verify:
    case Command::sweep: sum = run_sweep(cfg, out, log); break;
    case Command::sharpness: sum = run_sharpness(cfg, out, log); break;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json ladder = json::array();
  for (double h : cfg.h_ladder) ladder.push_back(h);
  json manifest{{"command", command_name(cfg.command)},
                {"seed", cfg.seed},
                {"h_ladder", ladder},
                {"k_max", cfg.k_max},
                {"jobs", cfg.jobs},
                {"theta_reference", theta_source_name(cfg.theta)},
                {"domains", cfg.domains.size()},
                {"versions",
                 {{"speclab", kVersion},
                  {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)},
                  {"compiler", __VERSION__}}},
                {"elapsed_seconds", seconds},
                {"violations", sum.violations},
                {"failures", sum.failures},
                {"config", cfg.text}};
  out.write("run-manifest.json", manifest.dump(1) + "\n");
  sum.files = out.files;
  sum.exit_code = sum.violations > 0 || sum.failures > 0 ? 1 : 0;
  log << "violations " << sum.violations << ", failures " << sum.failures << ", " << format_number(seconds)
      << " s\n";
  return sum;
}

}  // namespace speclab
