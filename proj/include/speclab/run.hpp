#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "speclab/config.hpp"

namespace speclab {

struct RunSummary {
  int exit_code = 0;  // 1 on any violated known-constant check or failed solve
  std::size_t violations = 0;
  std::size_t failures = 0;
  std::vector<std::string> files;  // written, relative to the output directory
};

/// Dispatches the configured command, writes the artifacts under cfg.out
/// and a one-screen summary to `log`.
RunSummary run(const RunConfig& cfg, std::ostream& log);

}  // namespace speclab
