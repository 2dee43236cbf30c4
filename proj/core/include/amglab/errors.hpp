#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace amglab {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Incompatible operand shapes.
class DimensionError : public Error {
public:
  explicit DimensionError(const std::string& what) : Error(what) {}
};

/// A factorization hit a pivot below tolerance; carries the pivot index.
class SingularMatrixError : public Error {
public:
  SingularMatrixError(const std::string& what, std::size_t pivot)
      : Error(what + " (pivot index " + std::to_string(pivot) + ")"),
        pivot_index(pivot) {}
  std::size_t pivot_index;
};

/// The dense eigensolver failed its residual contract; carries what it achieved.
class EigenSolverError : public Error {
public:
  EigenSolverError(const std::string& what, double achieved)
      : Error(what + " (achieved residual " + std::to_string(achieved) + ")"),
        achieved_residual(achieved) {}
  double achieved_residual;
};

/// Invalid or inconsistent configuration / input data.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace amglab
