#pragma once

// Mean field problem
//
//   -Delta psi = exp(lambda psi) / int exp(lambda psi)   in Omega,  psi = 0 on the boundary,
//
// solved by damped Newton iteration and continued in lambda over (-inf, 8 pi).

#include "gelfand/branch_point.hpp"
#include "gelfand/grid.hpp"
#include "gelfand/linear.hpp"

#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace gelfand::mf {

inline constexpr double kCriticalLambda = 8.0 * std::numbers::pi;

struct Density {
  grid::Field rho;
  double mass_eu = 0.0;   ///< int exp(lambda psi)
  double log_mass = 0.0;  ///< log of mass_eu, free of overflow
};

/// rho = exp(lambda psi) / int exp(lambda psi), evaluated as
/// exp(lambda psi - max(lambda psi)) so that it never overflows.
Density density(const grid::Mesh& mesh, double lambda, const grid::Field& psi);

struct MeanFieldState {
  double lambda = 0.0;
  grid::Field psi;
  grid::Field rho;
  double mass_eu = 0.0;
  double log_mass = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;

  const grid::Mesh& mesh() const { return psi.mesh(); }
};

/// ||K psi - rho(psi)||_w / ||rho(psi)||_w.
double relative_residual(const grid::Mesh& mesh, double lambda, const grid::Field& psi);

struct NewtonOptions {
  double tolerance = 1e-10;
  int max_iterations = 40;
};

/// Throws LambdaOutOfRange for lambda >= 8 pi and NonConvergence when the
/// residual does not reach the tolerance.
MeanFieldState newton_solve(const grid::Mesh& mesh, double lambda, const grid::Field& psi_init,
                            const NewtonOptions& options = {});

/// The linearized operator L phi = -Delta phi - lambda rho (phi - <phi>),
/// the Frechet derivative of the discrete mean field residual. It is the
/// operator behind the Newton step and behind every lambda-derivative of
/// the branch (eta, z, w).
class LinearizedOperator {
 public:
  LinearizedOperator(const grid::Mesh& mesh, double lambda, const grid::Field& rho);
  explicit LinearizedOperator(const MeanFieldState& state);

  const grid::Mesh& mesh() const { return mesh_; }
  double lambda() const { return lambda_; }

  /// x with L x = f. Throws SingularSystem if L cannot be inverted.
  grid::Field solve(const grid::Field& f) const;
  grid::Field apply(const grid::Field& x) const;

 private:
  grid::Mesh mesh_;
  double lambda_;
  linalg::ShiftedSolver solver_;
};

/// eta = d psi / d lambda, solving L eta = rho (psi - <psi>).
grid::Field tangent(const MeanFieldState& state);

struct ContinuationConfig {
  double lambda_start = 0.0;
  double lambda_end = kCriticalLambda - 0.1;
  double initial_step = 0.2;
  double min_step = 1e-5;
  double max_step = 0.25;
  double growth = 1.5;
  /// Upward steps never exceed this fraction of the distance to 8 pi.
  double approach_fraction = 0.05;
  double newton_tolerance = 1e-10;
  int max_newton_iterations = 40;
  /// Upward continuation stops once the energy exceeds this value.
  double energy_cap = std::numeric_limits<double>::infinity();
  /// No lambda at or above 8 pi - ceiling_guard is ever requested.
  double ceiling_guard = 1e-3;

  /// Throws LambdaOutOfRange when lambda_end >= 8 pi - ceiling_guard, and
  /// InvalidSpec for other inconsistent settings.
  void validate() const;
};

enum class Termination { ReachedEnd, EnergyCap, StepUnderflow };

std::string to_string(Termination t);

struct Branch {
  std::vector<BranchPoint> points;    ///< lambda ascending
  std::vector<MeanFieldState> states;  ///< same order as points
  Termination termination = Termination::ReachedEnd;
  double last_good_lambda = 0.0;

  bool complete() const { return termination != Termination::StepUnderflow; }
  /// Throws StepUnderflow when continuation did not finish.
  void require_complete() const;
  std::size_t size() const { return points.size(); }
};

using PointBuilder = std::function<BranchPoint(const MeanFieldState&)>;

/// lambda, E, mu and mass only; spectral and z-columns left as NaN.
BranchPoint basic_point(const MeanFieldState& state);

/// Natural continuation in lambda from the lambda = 0 solution. Steps are
/// halved on Newton failure and grown by `growth` after easy convergence; the
/// predictor is the tangent psi + d lambda * eta. Every recorded state is
/// turned into a BranchPoint by `build`. A step underflow is reported in
/// the returned branch (termination = StepUnderflow), keeping the points
/// accepted so far.
Branch continue_branch(const grid::Mesh& mesh, const ContinuationConfig& cfg,
                       const PointBuilder& build = basic_point);

/// The branch state at a single lambda, reached by continuation from 0.
MeanFieldState state_at(const grid::Mesh& mesh, double lambda, ContinuationConfig cfg = {});

}  // namespace gelfand::mf
