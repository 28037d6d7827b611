#pragma once

#include <stdexcept>
#include <string>

namespace gm {

// Invalid parameters or configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A well-formed request that cannot be satisfied, e.g. no symbol rate meets
// the emission mask or a target error rate is outside the simulated grid
// (CLI exit code 3).
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gm
