#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace porehom {

enum class ErrorKind {
  Geometry,
  Meshing,
  Tiling,
  Conformity,
  Solver,
  Numerical,
  Validation,
  Parse,
  Io,
  Usage,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a category so the CLI can
// print a one-line classified message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by the CG solver; keeps the last residual for diagnostics.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : Error(ErrorKind::Solver, what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

}  // namespace porehom
