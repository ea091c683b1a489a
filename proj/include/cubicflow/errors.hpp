#pragma once

#include <stdexcept>
#include <string>

namespace cubicflow {

// Bad or inconsistent input (exit code 2 in the CLI).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure failed to converge or hit a singularity (exit code 3).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Input violates the solvability constraints (exit code 4).
struct ConstraintError : std::runtime_error {
  explicit ConstraintError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cubicflow
