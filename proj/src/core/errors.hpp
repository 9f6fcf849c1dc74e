#pragma once

#include <stdexcept>
#include <string>

namespace lindml {

// Thrown when vector/matrix shapes disagree with a model or dataset.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown for arguments outside an operation's mathematical domain
// (non-finite inputs, nonpositive scales, ranks out of range, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Thrown on file read/write/parse failures.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when the solver cannot recover a finite loss after retries.
struct DivergenceError : std::runtime_error {
  DivergenceError(const std::string& what, long iteration)
      : std::runtime_error(what), iteration(iteration) {}
  long iteration;
};

// Thrown when a requested target cannot be met (e.g. noise calibration on
// degenerate data); carries the achievable bracket.
struct InfeasibleError : std::runtime_error {
  InfeasibleError(const std::string& what, double lo, double hi)
      : std::runtime_error(what), achieved_lo(lo), achieved_hi(hi) {}
  double achieved_lo;
  double achieved_hi;
};

}  // namespace lindml
