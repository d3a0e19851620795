#pragma once

#include <stdexcept>
#include <string>

namespace fastdiff {

// Rejected input: maps to exit code 2 in the command-line tool.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical failure during a solve: exit code 3.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fastdiff
