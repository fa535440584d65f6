#pragma once

#include <stdexcept>
#include <string>

namespace nhqm {

// Expression text could not be parsed; carries the byte offset of the failure.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string msg, std::size_t position)
      : std::runtime_error(std::move(msg)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// A coefficient could not be evaluated at a grid node.
class AssemblyError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operator has a coefficient that the oscillator basis cannot integrate
// (negative powers of x); the grid representation handles those.
class UnsupportedInBasisError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Gram matrix is not Hermitian positive definite.
class MetricError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Diagonal transform vanishes at a grid node.
class SingularMapError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Eigenbasis too ill-conditioned for the requested construction.
class ConditioningError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense eigensolver failed to converge.
class EigenSolverError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nhqm
