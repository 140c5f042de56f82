#include "gelfand/mfsolver.hpp"

#include "gelfand/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace gelfand::mf {

using grid::Field;
using grid::Mesh;

Density density(const Mesh& mesh, double lambda, const Field& psi) {
  grid::require_same_mesh(psi, mesh);
  if (!psi.all_finite()) throw NonFiniteField("psi has non-finite values");
  const Eigen::VectorXd exponent = lambda * psi.values();
  const double shift = exponent.maxCoeff();
  Eigen::VectorXd e = (exponent.array() - shift).exp().matrix();
  const double scaled_mass = mesh.weights().dot(e);
  Density d{Field(mesh, e / scaled_mass), 0.0, shift + std::log(scaled_mass)};
  d.mass_eu = std::exp(d.log_mass);
  return d;
}

namespace {

// Residual in stiffness form, S psi - W rho.
Eigen::VectorXd stiffness_residual(const Mesh& mesh, const Field& psi, const Field& rho) {
  return mesh.stiffness() * psi.values() - mesh.weights().cwiseProduct(rho.values());
}

double relative(const Mesh& mesh, const Eigen::VectorXd& res, const Field& rho) {
  // ||W^{-1} F||_W = sqrt(sum F_i^2 / w_i)
  const double num = std::sqrt(res.cwiseAbs2().cwiseQuotient(mesh.weights()).sum());
  return num / grid::norm(rho);
}

std::optional<Eigen::VectorXd> centering_term(const Mesh& mesh, const Eigen::VectorXd& mass) {
  if (!mesh.carries_mean()) return std::nullopt;
  return mass;
}

}  // namespace

double relative_residual(const Mesh& mesh, double lambda, const Field& psi) {
  const Density d = density(mesh, lambda, psi);
  return relative(mesh, stiffness_residual(mesh, psi, d.rho), d.rho);
}

LinearizedOperator::LinearizedOperator(const Mesh& mesh, double lambda, const Field& rho)
    : mesh_(mesh),
      lambda_(lambda),
      solver_(mesh, mesh.weights().cwiseProduct(rho.values()),
              centering_term(mesh, mesh.weights().cwiseProduct(rho.values())), lambda) {
  grid::require_same_mesh(rho, mesh);
}

LinearizedOperator::LinearizedOperator(const MeanFieldState& state)
    : LinearizedOperator(state.mesh(), state.lambda, state.rho) {}

Field LinearizedOperator::solve(const Field& f) const {
  grid::require_same_mesh(f, mesh_);
  return Field(mesh_, solver_.solve(mesh_.weights().cwiseProduct(f.values())));
}

Field LinearizedOperator::apply(const Field& x) const {
  grid::require_same_mesh(x, mesh_);
  return Field(mesh_, solver_.apply(x.values()).cwiseQuotient(mesh_.weights()));
}

MeanFieldState newton_solve(const Mesh& mesh, double lambda, const Field& psi_init,
                            const NewtonOptions& options) {
  if (!(lambda < kCriticalLambda) || !std::isfinite(lambda)) throw LambdaOutOfRange(lambda);
  if (!mesh.carries_mean())
    throw InvalidSpec("the mean field problem needs a rectangle or a mode-0 disk mesh");
  grid::require_same_mesh(psi_init, mesh);

  Field psi = psi_init;
  Density d = density(mesh, lambda, psi);
  Eigen::VectorXd res = stiffness_residual(mesh, psi, d.rho);
  double rel = relative(mesh, res, d.rho);

  for (int it = 0;; ++it) {
    if (rel <= options.tolerance) {
      return MeanFieldState{lambda, std::move(psi), std::move(d.rho), d.mass_eu, d.log_mass, rel, it};
    }
    if (it >= options.max_iterations) throw NonConvergence(it, rel);

    const LinearizedOperator jac(mesh, lambda, d.rho);
    Eigen::VectorXd step;
    try {
      step = -jac.solve(Field(mesh, res.cwiseQuotient(mesh.weights()))).values();
    } catch (const SingularSystem&) {
      throw NonConvergence(it, rel);
    }

    // Step halving on residual increase.
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 30; ++halving, t *= 0.5) {
      Field trial(mesh, psi.values() + t * step);
      if (!trial.all_finite()) continue;
      Density dt = density(mesh, lambda, trial);
      Eigen::VectorXd rt = stiffness_residual(mesh, trial, dt.rho);
      const double rel_t = relative(mesh, rt, dt.rho);
      if (rel_t < rel) {
        psi = std::move(trial);
        d = std::move(dt);
        res = std::move(rt);
        rel = rel_t;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Round-off floor: the full Newton correction is negligible.
      const double scale = 1.0 + psi.max_abs();
      if (step.cwiseAbs().maxCoeff() <= 1e-10 * scale && rel <= 1e3 * options.tolerance) {
        return MeanFieldState{lambda, std::move(psi), std::move(d.rho), d.mass_eu, d.log_mass, rel, it + 1};
      }
      throw NonConvergence(it + 1, rel);
    }
  }
}

Field tangent(const MeanFieldState& state) {
  const Mesh& mesh = state.mesh();
  const double mean_psi = grid::inner(state.rho, state.psi);
  Field centered = state.psi;
  if (mesh.carries_mean()) centered.values().array() -= mean_psi;
  return LinearizedOperator(state).solve(state.rho * centered);
}

void ContinuationConfig::validate() const {
  if (!(ceiling_guard > 0.0)) throw InvalidSpec("ceiling guard must be positive");
  if (!(lambda_end < kCriticalLambda - ceiling_guard)) throw LambdaOutOfRange(lambda_end);
  if (!(lambda_start <= lambda_end)) throw InvalidSpec("lambda_start must not exceed lambda_end");
  if (!std::isfinite(lambda_start)) throw InvalidSpec("lambda_start must be finite");
  if (!(min_step > 0.0)) throw InvalidSpec("min step must be positive");
  if (!(initial_step >= min_step)) throw InvalidSpec("initial step must be at least the min step");
  if (!(max_step >= initial_step)) throw InvalidSpec("max step must be at least the initial step");
  if (!(growth >= 1.0)) throw InvalidSpec("step growth factor must be >= 1");
  if (!(approach_fraction > 0.0 && approach_fraction <= 1.0))
    throw InvalidSpec("approach fraction must lie in (0, 1]");
  if (!(newton_tolerance > 0.0)) throw InvalidSpec("Newton tolerance must be positive");
  if (max_newton_iterations < 1) throw InvalidSpec("at least one Newton iteration is required");
  if (!(energy_cap > 0.0)) throw InvalidSpec("energy cap must be positive");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::ReachedEnd: return "reached_end";
    case Termination::EnergyCap: return "energy_cap";
    case Termination::StepUnderflow: return "step_underflow";
  }
  return "unknown";
}

void Branch::require_complete() const {
  if (!complete()) throw StepUnderflow(last_good_lambda);
}

BranchPoint basic_point(const MeanFieldState& state) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  BranchPoint p;
  p.lambda = state.lambda;
  p.E = 0.5 * grid::inner(state.rho, state.psi);
  p.mu = state.lambda / state.mass_eu;
  p.g = p.sigma1 = p.nu1 = p.mean_z = p.min_z = nan;
  p.mass_eu = state.mass_eu;
  p.newton_iters = state.iterations;
  return p;
}

namespace {

MeanFieldState origin_state(const Mesh& mesh, const NewtonOptions& opts) {
  const Field psi0 = grid::solve_dirichlet(mesh, Field::constant(mesh, 1.0 / mesh.area()));
  return newton_solve(mesh, 0.0, psi0, opts);
}

struct Walk {
  std::vector<MeanFieldState> states;  // excludes the starting state
  Termination termination = Termination::ReachedEnd;
};

// Continues from `from` towards `target`, stopping early on the energy cap
// (upward only) or on step underflow.
Walk walk(const MeanFieldState& from, double target, const ContinuationConfig& cfg) {
  const Mesh& mesh = from.mesh();
  const NewtonOptions opts{cfg.newton_tolerance, cfg.max_newton_iterations};
  const double direction = target > from.lambda ? 1.0 : -1.0;
  Walk out;
  if (target == from.lambda) return out;

  const MeanFieldState* current = &from;
  Field eta = tangent(from);
  double step = cfg.initial_step;
  while (current->lambda != target) {
    double h = std::min(step, cfg.max_step);
    if (direction > 0) h = std::min(h, cfg.approach_fraction * (kCriticalLambda - current->lambda));
    double next = current->lambda + direction * h;
    // Land exactly on the target, avoiding a sliver of a last step.
    if (direction * (target - next) < 0.25 * h) next = target;
    const double dl = next - current->lambda;

    std::optional<MeanFieldState> trial;
    try {
      trial = newton_solve(mesh, next, current->psi + eta * dl, opts);
    } catch (const NonConvergence&) {
    } catch (const SingularSystem&) {
    }
    if (!trial) {
      step = 0.5 * std::abs(dl);
      if (step < cfg.min_step) {
        out.termination = Termination::StepUnderflow;
        return out;
      }
      continue;
    }
    step = trial->iterations <= 4 ? std::min(std::abs(dl) * cfg.growth, cfg.max_step) : std::abs(dl);
    out.states.push_back(std::move(*trial));
    current = &out.states.back();
    eta = tangent(*current);
    if (direction > 0 && 0.5 * grid::inner(current->rho, current->psi) > cfg.energy_cap) {
      out.termination = Termination::EnergyCap;
      return out;
    }
  }
  return out;
}

}  // namespace

Branch continue_branch(const Mesh& mesh, const ContinuationConfig& cfg, const PointBuilder& build) {
  cfg.validate();
  const NewtonOptions opts{cfg.newton_tolerance, cfg.max_newton_iterations};
  Branch branch;

  MeanFieldState anchor = origin_state(mesh, opts);
  // Move the anchor into [lambda_start, lambda_end] without recording.
  for (const double bound : {cfg.lambda_start, cfg.lambda_end}) {
    const bool outside = (bound == cfg.lambda_start) ? bound > anchor.lambda : bound < anchor.lambda;
    if (!outside) continue;
    Walk w = walk(anchor, bound, cfg);
    if (w.termination != Termination::ReachedEnd) {
      branch.termination = w.termination == Termination::EnergyCap ? Termination::EnergyCap
                                                                   : Termination::StepUnderflow;
      branch.last_good_lambda = w.states.empty() ? anchor.lambda : w.states.back().lambda;
      return branch;
    }
    anchor = std::move(w.states.back());
  }

  Walk lower = walk(anchor, cfg.lambda_start, cfg);
  Walk upper;
  if (lower.termination == Termination::ReachedEnd) upper = walk(anchor, cfg.lambda_end, cfg);

  std::vector<MeanFieldState> ordered;
  ordered.reserve(lower.states.size() + upper.states.size() + 1);
  for (auto it = lower.states.rbegin(); it != lower.states.rend(); ++it) ordered.push_back(std::move(*it));
  ordered.push_back(std::move(anchor));
  for (auto& s : upper.states) ordered.push_back(std::move(s));

  if (lower.termination == Termination::StepUnderflow) {
    branch.termination = Termination::StepUnderflow;
    branch.last_good_lambda = ordered.front().lambda;
  } else {
    branch.termination = upper.termination;
    branch.last_good_lambda = ordered.back().lambda;
  }

  branch.points.reserve(ordered.size());
  for (const auto& s : ordered) branch.points.push_back(build(s));
  branch.states = std::move(ordered);
  return branch;
}

MeanFieldState state_at(const Mesh& mesh, double lambda, ContinuationConfig cfg) {
  cfg.lambda_start = std::min(0.0, lambda);
  cfg.lambda_end = std::max(0.0, lambda);
  cfg.energy_cap = std::numeric_limits<double>::infinity();
  cfg.validate();
  const NewtonOptions opts{cfg.newton_tolerance, cfg.max_newton_iterations};
  MeanFieldState origin = origin_state(mesh, opts);
  Walk w = walk(origin, lambda, cfg);
  if (w.termination != Termination::ReachedEnd)
    throw StepUnderflow(w.states.empty() ? 0.0 : w.states.back().lambda);
  return w.states.empty() ? origin : std::move(w.states.back());
}

}  // namespace gelfand::mf
