#include "gelfand/diagnostics.hpp"

#include "gelfand/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gelfand::diag {

using grid::Field;
using grid::Mesh;
using mf::MeanFieldState;

double rho_inner(const Field& rho, const Field& f, const Field& g) {
  grid::require_same_mesh(rho, f);
  grid::require_same_mesh(rho, g);
  const auto& w = rho.mesh().weights();
  return (w.array() * rho.values().array() * f.values().array() * g.values().array()).sum();
}

EnergyForms energy_forms(const MeanFieldState& state) {
  const Mesh& mesh = state.mesh();
  EnergyForms forms;
  forms.mean_form = 0.5 * grid::inner(state.rho, state.psi);
  forms.gradient_form = 0.5 * state.psi.values().dot(mesh.stiffness() * state.psi.values());
  forms.green_form = 0.5 * grid::inner(state.rho, grid::solve_dirichlet(mesh, state.rho));
  return forms;
}

double energy(const MeanFieldState& state) {
  const EnergyForms forms = energy_forms(state);
  // The three forms coincide up to the Newton residual.
  const double tol = std::max(1e-8, 100.0 * state.residual_norm) * std::abs(forms.mean_form);
  if (std::abs(forms.gradient_form - forms.mean_form) > tol || std::abs(forms.green_form - forms.mean_form) > tol)
    throw SolverBreakdown("energy forms disagree at lambda = " + std::to_string(state.lambda));
  return forms.mean_form;
}

double energy_zero(const Mesh& mesh) {
  if (!mesh.carries_mean()) throw InvalidSpec("E_0 needs a rectangle or a mode-0 disk mesh");
  const Field h = grid::solve_dirichlet(mesh, Field::constant(mesh, 1.0));
  const double area = mesh.area();
  return grid::integrate(mesh, h) / (2.0 * area * area);
}

double mu_of(const MeanFieldState& state) { return state.lambda / state.mass_eu; }

Field solve_eta(const MeanFieldState& state) { return mf::tangent(state); }

Field solve_z(const MeanFieldState& state) {
  return mf::LinearizedOperator(state).solve(state.rho);
}

Field solve_w(const MeanFieldState& state, const Field& z) {
  grid::require_same_mesh(z, state.mesh());
  const Field z0 = spectrum::centered(state.rho, z);
  const Field sq0 = spectrum::centered(state.rho, z0 * z0);
  const Field rhs = state.rho * (2.0 * z0 + state.lambda * sq0);
  return mf::LinearizedOperator(state).solve(rhs);
}

GCoefficients g_and_coeffs(const MeanFieldState& state, const Field& z) {
  grid::require_same_mesh(z, state.mesh());
  const Field& rho = state.rho;
  const double lambda = state.lambda;
  const double mean = grid::inner(rho, z);
  const Field z0 = spectrum::centered(rho, z);
  const double z0_sq = rho_inner(rho, z0, z0);
  const double z_sq = rho_inner(rho, z, z);
  const double z_cube = rho_inner(rho, z * z, z);
  GCoefficients out;
  out.g = 1.0 - lambda * mean;
  out.a = -(2.0 * lambda * z0_sq + lambda * z_sq + mean);
  out.b = -lambda * lambda * z_cube;
  return out;
}

double functional_value(const Mesh& mesh, double lambda, const Field& u) {
  grid::require_same_mesh(u, mesh);
  const Eigen::VectorXd& v = u.values();
  const double top = v.maxCoeff();
  const double log_mass = top + std::log(mesh.weights().dot((v.array() - top).exp().matrix()));
  return 0.5 * v.dot(mesh.stiffness() * v) - lambda * log_mass;
}

BranchPoint make_branch_point(const MeanFieldState& state, const PointOptions& options) {
  BranchPoint p = mf::basic_point(state);
  p.E = energy(state);
  p.mu = mu_of(state);
  const Field z = solve_z(state);
  p.mean_z = grid::inner(state.rho, z);
  p.g = 1.0 - state.lambda * p.mean_z;
  p.min_z = z.min();
  if (options.spectral) {
    const Mesh& mesh = state.mesh();
    p.sigma1 = spectrum::constrained_spectrum(mesh, state.rho, state.lambda, 1, options.eigen).sigmas.front();
    p.nu1 = spectrum::nu1(mesh, state.rho, state.lambda, options.eigen);
  }
  return p;
}

mf::Branch compute_branch(const Mesh& mesh, const mf::ContinuationConfig& cfg, const PointOptions& options) {
  return mf::continue_branch(mesh, cfg,
                             [&options](const MeanFieldState& s) { return make_branch_point(s, options); });
}

// ---------------------------------------------------------------------------

LambdaStar find_lambda_star(const mf::Branch& branch, const LambdaStarOptions& options) {
  const auto& pts = branch.points;
  std::size_t bracket = pts.size();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i].g > 0.0 && pts[i + 1].g <= 0.0) {
      bracket = i;
      break;
    }
  }
  if (bracket == pts.size()) throw NoSignChange("g does not change sign along the branch");

  const MeanFieldState& base = branch.states.at(bracket);
  const Mesh& mesh = base.mesh();
  const Field eta = mf::tangent(base);
  const mf::NewtonOptions newton{options.newton_tolerance, 40};

  double lo = pts[bracket].lambda;
  double hi = pts[bracket + 1].lambda;
  auto evaluate = [&](double lambda) {
    MeanFieldState s = mf::newton_solve(mesh, lambda, base.psi + eta * (lambda - base.lambda), newton);
    const double g = 1.0 - lambda * grid::inner(s.rho, solve_z(s));
    return std::make_pair(std::move(s), g);
  };

  auto [state, g] = evaluate(0.5 * (lo + hi));
  while (std::abs(g) > options.g_tolerance && hi - lo > options.interval_tolerance) {
    if (g > 0.0)
      lo = state.lambda;
    else
      hi = state.lambda;
    std::tie(state, g) = evaluate(0.5 * (lo + hi));
  }

  LambdaStar out;
  out.lambda = state.lambda;
  out.E = energy(state);
  out.mu = mu_of(state);
  out.g = g;
  const double four_pi = 0.5 * mf::kCriticalLambda;
  out.in_interval = out.lambda >= four_pi * (1.0 - options.interval_slack) && out.lambda < mf::kCriticalLambda;
  return out;
}

std::vector<DiagramPoint> mu_infty_diagram(const mf::Branch& branch) {
  std::vector<DiagramPoint> out;
  out.reserve(branch.size());
  for (std::size_t i = 0; i < branch.size(); ++i) {
    const BranchPoint& p = branch.points[i];
    if (i > 0 && !(p.E > branch.points[i - 1].E)) throw NonMonotoneEnergy(i, p.lambda);
    out.push_back(DiagramPoint{p.E, p.mu, p.lambda});
  }
  return out;
}

DiagramShape analyze_diagram(const std::vector<DiagramPoint>& d, double E0) {
  DiagramShape shape;
  if (d.empty()) return shape;
  const std::size_t n = d.size();
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (d[i].mu > d[i - 1].mu && d[i].mu > d[i + 1].mu) ++shape.interior_maxima;
  shape.argmax = static_cast<std::size_t>(
      std::max_element(d.begin(), d.end(), [](const auto& a, const auto& b) { return a.mu < b.mu; }) - d.begin());
  shape.E_star = d[shape.argmax].E;
  shape.mu_star = d[shape.argmax].mu;

  shape.increasing_before = true;
  for (std::size_t i = 1; i <= shape.argmax; ++i)
    if (!(d[i].mu > d[i - 1].mu)) shape.increasing_before = false;
  shape.decreasing_after = true;
  for (std::size_t i = shape.argmax + 1; i < n; ++i)
    if (!(d[i].mu < d[i - 1].mu)) shape.decreasing_after = false;
  shape.lambda_increasing = true;
  for (std::size_t i = 1; i < n; ++i)
    if (!(d[i].lambda > d[i - 1].lambda)) shape.lambda_increasing = false;

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (d[i].E <= E0 && E0 <= d[i + 1].E) {
      const double t = (E0 - d[i].E) / (d[i + 1].E - d[i].E);
      shape.mu_at_E0 = d[i].mu + t * (d[i + 1].mu - d[i].mu);
      break;
    }
  }
  return shape;
}

}  // namespace gelfand::diag
