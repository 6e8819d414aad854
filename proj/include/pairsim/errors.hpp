#pragma once

#include <stdexcept>
#include <string>

namespace pairsim {

/// Invalid configuration or violated type invariant (CLI exit code 1).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An argument outside the validity domain of a model or operation.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Base for numerical failures: solver bracketing, spectral anomalies (CLI exit code 2).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoSolutionError : public NumericalError {
 public:
  NoSolutionError(const std::string& what, double f_lower, double f_upper)
      : NumericalError(what), f_lower_(f_lower), f_upper_(f_upper) {}

  double f_lower() const noexcept { return f_lower_; }
  double f_upper() const noexcept { return f_upper_; }

 private:
  double f_lower_;
  double f_upper_;
};

class SpectralAnomalyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace pairsim
