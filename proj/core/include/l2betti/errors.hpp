#pragma once

#include <stdexcept>
#include <string>

namespace l2betti {

/// Bad input: rejected before any computation starts. CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Failure while computing: schedules, thresholds, missing cells. CLI exit code 2.
class ComputationError : public std::runtime_error {
public:
  explicit ComputationError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace l2betti
