#pragma once

#include <stdexcept>
#include <string>

namespace speclab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Empty domain, or a shape too small to be resolved by the grid.
class DegenerateDomainError : public Error {
 public:
  using Error::Error;
};

/// Set operation between domains living on different lattices.
class GridMismatchError : public Error {
 public:
  using Error::Error;
};

/// Geometric configuration violating its invariants (e.g. overlapping balls).
class InvalidConfigError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver stopped at its iteration limit. Carries the last
/// relative residual it reached.
class IterationLimitError : public Error {
 public:
  IterationLimitError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class DecompositionError : public Error {
 public:
  using Error::Error;
};

/// lambda_2 of a domain came out below lambda_2 of the two-ball reference by
/// more than the error budget; the discretization is biased.
class DiscretizationBiasError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Configuration file problem. `field` names the offending key, `line` is
/// 1-based (0 when unknown).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, int line, const std::string& message)
      : Error(format(field, line, message)), field_(field), line_(line) {}
  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& field, int line, const std::string& message) {
    std::string out = "config";
    if (line > 0) out += ":" + std::to_string(line);
    if (!field.empty()) out += ": field '" + field + "'";
    return out + ": " + message;
  }
  std::string field_;
  int line_;
};

}  // namespace speclab
