#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace pseudospec {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Thrown when an input has incompatible or non-square dimensions.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a precondition on argument values is violated.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterative solver hits its iteration cap.
/// Carries whatever eigenvalues were recovered before the cap.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<Complex> partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const std::vector<Complex>& partial() const { return partial_; }

 private:
  std::vector<Complex> partial_;
};

/// Thrown when a resultant cannot be assembled (p > n).
class StructureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when the resultant hypothesis fails (no b_i of degree >= 1).
class HypothesisViolationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an eigenvalue of A lies outside the requested grid box.
class BoxError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an eigenvalue cannot be assigned to any grid component.
class CoverageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by path tracking if bisection underflows with the matched
/// displacement still above the cap. Indicates solver failure, not math.
class DiscontinuityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown on malformed input files.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_square(const ComplexMatrix& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw DimensionError(std::string(who) + ": expected a nonempty square matrix, got " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
}

inline void require_finite(const ComplexMatrix& a, const char* who) {
  if (!a.allFinite())
    throw PreconditionError(std::string(who) + ": matrix has non-finite entries");
}

}  // namespace pseudospec
