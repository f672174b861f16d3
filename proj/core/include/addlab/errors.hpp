#pragma once

#include <stdexcept>
#include <string>

namespace addlab {

// Error taxonomy mirrors the CLI exit codes: input_error -> 3,
// infeasible_error -> 2, check_failure -> 1.

struct input_error : std::runtime_error {
  explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Parameter selection or a precondition that depends on the problem scale
// could not be satisfied (e.g. no admissible truncation/smoothing pair).
struct infeasible_error : std::runtime_error {
  explicit infeasible_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation refused to produce a value it cannot stand behind
// (insufficient characteristic-function decay, aliasing risk, ...).
struct refusal_error : std::runtime_error {
  explicit refusal_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct check_failure : std::runtime_error {
  explicit check_failure(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace addlab
