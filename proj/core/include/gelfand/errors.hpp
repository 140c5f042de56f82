#pragma once

#include <stdexcept>
#include <string>

namespace gelfand {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class MeshMismatch : public Error {
 public:
  using Error::Error;
};

/// A direct factorization failed. For the SPD Dirichlet operator this is an
/// internal anomaly, never a user error.
class SolverBreakdown : public Error {
 public:
  using Error::Error;
};

class LambdaOutOfRange : public Error {
 public:
  explicit LambdaOutOfRange(double lambda);
  double lambda() const noexcept { return lambda_; }

 private:
  double lambda_;
};

class NonConvergence : public Error {
 public:
  NonConvergence(int iterations, double last_residual);
  int iterations() const noexcept { return iterations_; }
  double last_residual() const noexcept { return last_residual_; }

 private:
  int iterations_;
  double last_residual_;
};

class NonFiniteField : public Error {
 public:
  using Error::Error;
};

class EigenNonConvergence : public Error {
 public:
  using Error::Error;
};

class DegenerateDensity : public Error {
 public:
  using Error::Error;
};

/// The linearized operator could not be inverted; along the branch this
/// would mean the first constrained eigenvalue vanished.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// Continuation could not advance: the adaptive step fell below the minimum.
class StepUnderflow : public Error {
 public:
  explicit StepUnderflow(double last_good_lambda);
  double last_good_lambda() const noexcept { return last_good_lambda_; }

 private:
  double last_good_lambda_;
};

class NoSignChange : public Error {
 public:
  using Error::Error;
};

class NonMonotoneEnergy : public Error {
 public:
  NonMonotoneEnergy(std::size_t index, double lambda);
  std::size_t index() const noexcept { return index_; }
  double lambda() const noexcept { return lambda_; }

 private:
  std::size_t index_;
  double lambda_;
};

}  // namespace gelfand
