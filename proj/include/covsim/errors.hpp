#pragma once

#include <stdexcept>
#include <string>

namespace covsim {

/// Triangulation input whose (x, y) locations are all collinear.
struct DegenerateSamples : std::runtime_error {
  explicit DegenerateSamples(const std::string& what) : std::runtime_error(what) {}
};

/// Constraint repair could not reach a feasible configuration.
struct RepairFailure : std::runtime_error {
  explicit RepairFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Objective measurement callback failed.
struct ObjectiveFailure : std::runtime_error {
  explicit ObjectiveFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent configuration file.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace covsim
