#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "speclab/harness.hpp"
#include "speclab/sharpness.hpp"

namespace speclab {

enum class Command { eig, torsion, asym, verify, sweep, sharpness };
Command parse_command(const std::string& name);
std::string_view command_name(Command c);

struct SharpnessConfig {
  std::vector<Family> families{Family::volume_split, Family::ellipse_pair, Family::dumbbell_neck};
  std::vector<double> t_grid{0.02, 0.04, 0.08, 0.16};
  /// per-family overrides of t_grid
  std::map<Family, std::vector<double>> family_t_grids;
  /// closed-form volume-split grid; the analytic slope is a small-t limit
  std::vector<double> analytic_t_grid{0.001, 0.002, 0.004, 0.008};
  std::vector<DomainSpec> doubling_domains;
  int doubling_k_max = 2;
  double floor = 1e-3;
  double fit_tolerance = 0.1;

  const std::vector<double>& grid_for(Family f) const {
    auto it = family_t_grids.find(f);
    return it == family_t_grids.end() ? t_grid : it->second;
  }
};

struct RunConfig {
  Command command = Command::verify;
  /// strictly decreasing, each entry half the previous one
  std::vector<double> h_ladder{1.0 / 32.0, 1.0 / 64.0};
  int k_max = 6;
  std::uint64_t seed = 0x5eed;
  double eig_tol = 1e-8;
  double cg_tol = 1e-10;
  double budget_floor = 0.01;
  ThetaSource theta = ThetaSource::analytic;
  unsigned jobs = 0;
  std::string out = "speclab-out";
  std::vector<DomainSpec> domains;
  bool stability = false;  // sweep: rerun one ladder step finer and compare
  SharpnessConfig sharpness;
  /// the parsed text, echoed into the run manifest
  std::string text;
};

/// Throws ConfigError naming the field (and line, when known).
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

/// Harness options for the ladder step starting at h_ladder[step].
HarnessOptions harness_options(const RunConfig& cfg, std::size_t step = 0);
SharpnessOptions sharpness_options(const RunConfig& cfg);

}  // namespace speclab
