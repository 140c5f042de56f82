#pragma once

// Quantities tracked along the branch and the identity checks built on
// them. With L the linearized operator at (lambda, psi) and f_0 = f - <f>
// the rho-centered part:
//
//   eta = d psi/d lambda      L eta = rho psi_0
//   z   = d(lambda psi)/d lambda = psi + lambda eta
//                             L z   = rho
//   w   = dz/d lambda         L w   = 2 rho z_0 + lambda rho (z_0^2)_0
//
// and g = 1 - lambda <z> obeys g' = a g + b with
//   a = -(2 lambda <z_0^2> + lambda <z^2> + <z>),  b = -lambda^2 <z^3>.

#include "gelfand/branch_point.hpp"
#include "gelfand/grid.hpp"
#include "gelfand/mfsolver.hpp"
#include "gelfand/spectrum.hpp"

#include <limits>
#include <string>
#include <vector>

namespace gelfand::diag {

/// <f g>, the rho-weighted integral.
double rho_inner(const grid::Field& rho, const grid::Field& f, const grid::Field& g);

struct EnergyForms {
  double mean_form = 0.0;      ///< (1/2) <psi>
  double gradient_form = 0.0;  ///< (1/2) int |grad psi|^2
  double green_form = 0.0;     ///< (1/2) int rho G[rho]
};

EnergyForms energy_forms(const mf::MeanFieldState& state);

/// (1/2) <psi>. Throws SolverBreakdown when the three energy forms disagree
/// beyond what the Newton residual explains.
double energy(const mf::MeanFieldState& state);

/// (1/(2 |Omega|^2)) int h with h the torsion function G[1].
double energy_zero(const grid::Mesh& mesh);

double mu_of(const mf::MeanFieldState& state);

grid::Field solve_eta(const mf::MeanFieldState& state);
grid::Field solve_z(const mf::MeanFieldState& state);
grid::Field solve_w(const mf::MeanFieldState& state, const grid::Field& z);

struct GCoefficients {
  double g = 0.0;
  double a = 0.0;
  double b = 0.0;
};

GCoefficients g_and_coeffs(const mf::MeanFieldState& state, const grid::Field& z);

/// J(u) = (1/2) int |grad u|^2 - lambda log int e^u.
double functional_value(const grid::Mesh& mesh, double lambda, const grid::Field& u);

struct PointOptions {
  bool spectral = true;  ///< compute sigma1 and nu1
  spectrum::EigenOptions eigen{};
};

/// Every column of a BranchPoint at one state.
BranchPoint make_branch_point(const mf::MeanFieldState& state, const PointOptions& options = {});

/// continue_branch with make_branch_point as the post-processor.
mf::Branch compute_branch(const grid::Mesh& mesh, const mf::ContinuationConfig& cfg,
                          const PointOptions& options = {});

// ---------------------------------------------------------------------------
// Verification

struct Check {
  std::string name;
  bool pass = true;
  double residual = 0.0;
  double tolerance = 0.0;
  /// lambda at which the residual is attained (NaN when not pointwise).
  double lambda_at = std::numeric_limits<double>::quiet_NaN();
  std::string note;
};

struct VerificationReport {
  std::vector<Check> checks;

  bool all_pass() const;
  const Check* find(const std::string& name) const;
};

struct VerifyOptions {
  double derivative_rtol = 1e-2;     ///< dE/dlambda against <eta>
  double identity_rtol = 1e-2;       ///< eta and w mean identities
  double fourier_rtol = 1e-2;        ///< sigma_j beta_j = alpha_j
  int fourier_modes = 5;
  int fourier_samples = 5;           ///< branch points at which the spectrum is computed
  double ode_rtol = 1e-2;            ///< relative to max |g'|
  double integrated_rtol = 1e-2;     ///< integrating-factor form of the g-ODE
  /// The integrating-factor sweep stops at the first step whose change of
  /// A = int a exceeds this (the trapezoid rule no longer resolves e^{-A}).
  double integrated_max_dA = 0.25;
  double mu_slope_rtol = 1e-2;       ///< g = mass * dmu/dlambda, relative to max(1, |g|)
  double max_principle_rtol = 1e-6;  ///< min z >= -tol ||z||_inf where g >= 0
  spectrum::EigenOptions eigen{};
};

/// Runs the identity and inequality suite on a branch with at least five
/// points. Scalars are taken from branch.points (so a perturbed point is
/// detected); fields are recomputed from branch.states.
VerificationReport verify_branch(const mf::Branch& branch, const VerifyOptions& options = {});

// ---------------------------------------------------------------------------
// Bending point and diagram

struct LambdaStar {
  double lambda = 0.0;
  double E = 0.0;
  double mu = 0.0;
  double g = 0.0;
  /// lambda_* in [4 pi - tol, 8 pi).
  bool in_interval = false;
};

struct LambdaStarOptions {
  double g_tolerance = 1e-8;
  double interval_tolerance = 1e-6;
  double newton_tolerance = 1e-10;
  /// Slack below 4 pi accepted by the interval check.
  double interval_slack = 1e-3;
};

/// Locates the sign change of g between consecutive branch points and
/// refines it by bisection with fresh Newton solves. Throws NoSignChange
/// when g does not change sign along the branch.
LambdaStar find_lambda_star(const mf::Branch& branch, const LambdaStarOptions& options = {});

struct DiagramPoint {
  double E = 0.0;
  double mu = 0.0;
  double lambda = 0.0;
};

/// The branch reindexed by energy. Throws NonMonotoneEnergy if E is not
/// strictly increasing along the branch.
std::vector<DiagramPoint> mu_infty_diagram(const mf::Branch& branch);

struct DiagramShape {
  int interior_maxima = 0;
  std::size_t argmax = 0;
  double E_star = 0.0;
  double mu_star = 0.0;
  /// mu interpolated at E_0 (NaN if E_0 is outside the computed range).
  double mu_at_E0 = std::numeric_limits<double>::quiet_NaN();
  bool increasing_before = false;
  bool decreasing_after = false;
  bool lambda_increasing = false;
};

DiagramShape analyze_diagram(const std::vector<DiagramPoint>& diagram, double E0);

// ---------------------------------------------------------------------------
// Domain kind

enum class Verdict { FirstKindEvidence, SecondKindEvidence, Inconclusive };

std::string to_string(Verdict v);

struct ResolutionRun {
  grid::MeshSpec spec;
  double E_last = 0.0;
  double lambda_last = 0.0;
  double growth_exponent = std::numeric_limits<double>::quiet_NaN();
  mf::Termination termination = mf::Termination::ReachedEnd;
  std::size_t points = 0;
};

/// Numerical evidence only, never a proof.
struct KindEvidence {
  Verdict verdict = Verdict::Inconclusive;
  double E_max = 0.0;
  std::vector<ResolutionRun> runs;  ///< base resolution first

  const ResolutionRun& base() const { return runs.front(); }
};

struct ClassifyConfig {
  mf::ContinuationConfig continuation{};
  /// Energy cap in units of E_0 when continuation.energy_cap is infinite.
  double emax_over_e0 = 5.0;
  /// Growth exponents at the two resolutions must agree to this relative gap.
  double growth_agreement = 0.3;
  /// Exponent below this (in units of 1/(8 pi)) counts as bounded energy.
  double bounded_growth = 0.25;
};

/// d E / d(-log(8 pi - lambda)) by least squares over the last decade of
/// 8 pi - lambda. NaN with fewer than three points in that window.
double growth_exponent(const std::vector<BranchPoint>& points);

/// Continues towards 8 pi - delta on the given mesh and on one at half the
/// resolution, and compares the energy behavior.
KindEvidence classify_domain(const grid::Mesh& mesh, const ClassifyConfig& cfg = {});

/// The spec at half the resolution (each count halved, at least 16).
grid::MeshSpec coarsened(const grid::MeshSpec& spec);

}  // namespace gelfand::diag
