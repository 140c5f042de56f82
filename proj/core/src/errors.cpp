#include "gelfand/errors.hpp"

#include <sstream>

namespace gelfand {

namespace {

std::string describe_lambda(double lambda) {
  std::ostringstream os;
  os.precision(17);
  os << "lambda = " << lambda << " is outside (-inf, 8*pi)";
  return os.str();
}

std::string describe_newton(int iterations, double residual) {
  std::ostringstream os;
  os << "Newton iteration did not converge after " << iterations
     << " iterations (last relative residual " << residual << ")";
  return os.str();
}

std::string describe_energy(std::size_t index, double lambda) {
  std::ostringstream os;
  os.precision(17);
  os << "energy is not strictly increasing at branch index " << index
     << " (lambda = " << lambda << ")";
  return os.str();
}

}  // namespace

LambdaOutOfRange::LambdaOutOfRange(double lambda)
    : Error(describe_lambda(lambda)), lambda_(lambda) {}

NonConvergence::NonConvergence(int iterations, double last_residual)
    : Error(describe_newton(iterations, last_residual)),
      iterations_(iterations),
      last_residual_(last_residual) {}

StepUnderflow::StepUnderflow(double last_good_lambda)
    : Error("continuation step underflow after lambda = " + std::to_string(last_good_lambda)),
      last_good_lambda_(last_good_lambda) {}

NonMonotoneEnergy::NonMonotoneEnergy(std::size_t index, double lambda)
    : Error(describe_energy(index, lambda)), index_(index), lambda_(lambda) {}

}  // namespace gelfand
