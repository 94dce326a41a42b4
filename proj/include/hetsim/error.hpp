#pragma once

#include <stdexcept>
#include <string>

namespace hetsim {

/// Raised for malformed input files, schema violations and invalid
/// parameter values. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a structurally valid input cannot be simulated
/// (e.g. no enabled cores). The CLI maps this to exit code 2.
class SimulationError : public std::runtime_error {
 public:
  explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hetsim
