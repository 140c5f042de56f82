#include "gelfand/spectrum.hpp"

#include "gelfand/errors.hpp"
#include "gelfand/linear.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

namespace gelfand::spectrum {

using grid::Field;
using grid::Mesh;

namespace {

using VectorMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Symmetric pencil A x = theta B x with A positive definite and B positive
// semi-definite; solve_a applies A^{-1}.
struct Pencil {
  VectorMap apply_a;
  VectorMap apply_b;
  VectorMap solve_a;
};

struct Ritz {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // B-orthonormal columns
};

Eigen::MatrixXd columnwise(const VectorMap& f, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) out.col(c) = f(Eigen::VectorXd(x.col(c)));
  return out;
}

// Subspace iteration on A^{-1} B with Rayleigh-Ritz projection at every
// step; returns the `wanted` smallest Ritz pairs once their values settle.
Ritz smallest_pairs(const Pencil& pencil, Eigen::Index n, int wanted, const EigenOptions& opt) {
  const Eigen::Index block = std::min<Eigen::Index>(n, 2 * wanted + 4);
  if (wanted > block) throw EigenNonConvergence("more eigenpairs requested than unknowns");

  std::mt19937_64 rng(0x6a09e667f3bcc908ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(n, block);
  for (Eigen::Index c = 0; c < block; ++c)
    for (Eigen::Index r = 0; r < n; ++r) x(r, c) = normal(rng);

  Eigen::VectorXd previous = Eigen::VectorXd::Constant(block, std::numeric_limits<double>::infinity());
  double best = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    Eigen::MatrixXd y = columnwise(pencil.solve_a, columnwise(pencil.apply_b, x));
    Eigen::MatrixXd by = columnwise(pencil.apply_b, y);
    for (Eigen::Index c = 0; c < block; ++c) {
      const double bn = std::sqrt(std::max(y.col(c).dot(by.col(c)), 0.0));
      if (!(bn > 0.0)) throw EigenNonConvergence("iteration block lost rank");
      y.col(c) /= bn;
      by.col(c) /= bn;
    }
    const Eigen::MatrixXd ay = columnwise(pencil.apply_a, y);
    Eigen::MatrixXd a_hat = y.transpose() * ay;
    Eigen::MatrixXd b_hat = y.transpose() * by;
    a_hat = 0.5 * (a_hat + a_hat.transpose()).eval();
    b_hat = 0.5 * (b_hat + b_hat.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a_hat, b_hat);
    if (es.info() != Eigen::Success) throw EigenNonConvergence("Rayleigh-Ritz projection failed");
    const Eigen::VectorXd theta = es.eigenvalues();
    x = y * es.eigenvectors();

    double change = 0.0;
    for (int i = 0; i < wanted; ++i)
      change = std::max(change, std::abs(theta[i] - previous[i]) / std::max(std::abs(theta[i]), 1e-300));
    previous = theta;
    if (change > opt.tolerance) continue;

    // Settled values only pin the vectors to about the square root of the
    // tolerance; keep iterating until the eigen residuals are small too.
    double worst = 0.0;
    for (int i = 0; i < wanted; ++i) {
      const Eigen::VectorXd xi = x.col(i);
      const Eigen::VectorXd bx = pencil.apply_b(xi);
      const Eigen::VectorXd r = pencil.apply_a(xi) - theta[i] * bx;
      worst = std::max(worst, r.norm() / (std::abs(theta[i]) * bx.norm()));
    }
    if (worst <= opt.residual_tolerance) return Ritz{theta.head(wanted), x.leftCols(wanted)};
    // Round-off floor: the residual has stopped improving.
    stalled = (worst > 0.9 * best) ? stalled + 1 : 0;
    best = std::min(best, worst);
    if (stalled >= 3) return Ritz{theta.head(wanted), x.leftCols(wanted)};
  }
  throw EigenNonConvergence("subspace iteration did not converge");
}

void check_density(const Mesh& mesh, const Field& rho) {
  grid::require_same_mesh(rho, mesh);
  if (!(rho.values().minCoeff() > 0.0) || !rho.all_finite())
    throw DegenerateDensity("density must be positive and finite at every node");
  const double mass = mesh.weights().dot(rho.values());
  if (std::abs(mass - 1.0) > 1e-8) throw DegenerateDensity("density must integrate to one");
}

Eigen::VectorXd weighted_rho(const Mesh& mesh, const Field& rho) {
  return mesh.weights().cwiseProduct(rho.values());
}

// B x = m x - m (m . x) on meshes that carry a mean, m x otherwise.
VectorMap centered_mass(const Mesh& mesh, Eigen::VectorXd m) {
  const bool mean = mesh.carries_mean();
  return [m = std::move(m), mean](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd out = m.cwiseProduct(x);
    if (mean) out -= m.dot(x) * m;
    return out;
  };
}

VectorMap plain_mass(Eigen::VectorXd m) {
  return [m = std::move(m)](const Eigen::VectorXd& x) -> Eigen::VectorXd { return m.cwiseProduct(x); };
}

Pencil stiffness_pencil(const Mesh& mesh, VectorMap b) {
  return Pencil{[&mesh](const Eigen::VectorXd& x) -> Eigen::VectorXd { return mesh.stiffness() * x; },
                std::move(b),
                [&mesh](const Eigen::VectorXd& x) -> Eigen::VectorXd { return mesh.poisson().solve(x); }};
}

double relative_residual(const Mesh& mesh, const Pencil& p, const Eigen::VectorXd& x, double theta) {
  const Eigen::VectorXd bx = p.apply_b(x);
  const Eigen::VectorXd r = p.apply_a(x) - theta * bx;
  const auto& w = mesh.weights();
  const double num = std::sqrt(r.cwiseAbs2().cwiseQuotient(w).sum());
  const double den = std::abs(theta) * std::sqrt(bx.cwiseAbs2().cwiseQuotient(w).sum());
  return num / den;
}

// Fixes the sign so that the largest-magnitude entry is positive.
void orient(Eigen::VectorXd& v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v[imax] < 0.0) v = -v;
}

void assign_clusters(SpectrumResult& res, double tol) {
  const std::size_t n = res.sigmas.size();
  res.clusters.assign(n, 0);
  res.multiplicities.assign(n, 1);
  int id = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const double a = res.sigmas[i - 1];
    const double b = res.sigmas[i];
    if (std::abs(b - a) > tol * std::max(std::abs(a), std::abs(b))) ++id;
    res.clusters[i] = id;
  }
  for (std::size_t i = 0; i < n; ++i)
    res.multiplicities[i] =
        static_cast<int>(std::count(res.clusters.begin(), res.clusters.end(), res.clusters[i]));
}

void truncate(SpectrumResult& res, std::size_t k) {
  if (res.size() <= k) return;
  res.sigmas.resize(k);
  res.phis.erase(res.phis.begin() + static_cast<std::ptrdiff_t>(k), res.phis.end());
  res.residuals.resize(k);
  res.modes.resize(k);
  res.clusters.resize(k);
  res.multiplicities.resize(k);
}

}  // namespace

double rho_mean(const Field& rho, const Field& f) {
  grid::require_same_mesh(rho, f);
  if (!f.mesh().carries_mean()) return 0.0;
  return grid::inner(rho, f);
}

Field centered(const Field& rho, const Field& f) {
  Field out = f;
  out.values().array() -= rho_mean(rho, f);
  return out;
}

double constrained_quotient(const Field& phi, const Field& rho, double lambda) {
  const Mesh& mesh = phi.mesh();
  const double dirichlet = phi.values().dot(mesh.stiffness() * phi.values());
  const Field phi0 = centered(rho, phi);
  const double mass = grid::inner(rho * phi0, phi0);
  return (dirichlet - lambda * mass) / mass;
}

double hat_quotient(const Field& phi, const Field& rho, double lambda) {
  const Mesh& mesh = phi.mesh();
  const double dirichlet = phi.values().dot(mesh.stiffness() * phi.values());
  const double second = grid::inner(rho * phi, phi);
  const double mean = rho_mean(rho, phi);
  return (dirichlet - lambda * (second - mean * mean)) / second;
}

SpectrumResult mode_spectrum(const Mesh& mesh, const Field& rho, double lambda, int k, const EigenOptions& opt) {
  if (k < 1) throw InvalidSpec("at least one eigenvalue must be requested");
  check_density(mesh, rho);
  const bool paired = mesh.is_disk() && mesh.mode() > 0;
  const int distinct = paired ? (k + 1) / 2 : k;

  const Pencil pencil = stiffness_pencil(mesh, centered_mass(mesh, weighted_rho(mesh, rho)));
  const Ritz ritz = smallest_pairs(pencil, mesh.size(), distinct, opt);

  SpectrumResult res;
  for (int i = 0; i < distinct; ++i) {
    Eigen::VectorXd v = ritz.vectors.col(i);
    const double norm0 = std::sqrt(v.dot(pencil.apply_b(v)));
    v /= norm0;
    orient(v);
    const double theta = ritz.values[i];
    const double residual = relative_residual(mesh, pencil, v, theta);
    const int copies = paired ? 2 : 1;
    for (int c = 0; c < copies; ++c) {
      res.sigmas.push_back(theta - lambda);
      res.phis.emplace_back(mesh, v);
      res.residuals.push_back(residual);
      res.modes.push_back(mesh.mode());
    }
  }
  assign_clusters(res, opt.cluster_tolerance);
  truncate(res, static_cast<std::size_t>(k));
  return res;
}

SpectrumResult constrained_spectrum(const Mesh& mesh, const Field& rho, double lambda, int k,
                                    const EigenOptions& opt) {
  if (!(mesh.is_disk() && mesh.mode() == 0)) return mode_spectrum(mesh, rho, lambda, k, opt);
  if (k < 1) throw InvalidSpec("at least one eigenvalue must be requested");

  // For n >= 1 the smallest eigenvalue of mode n grows with n, so the k
  // smallest eigenvalues are found among modes 0..k.
  struct Entry {
    double sigma;
    int mode;
    int index;
    Field phi;
    double residual;
  };
  std::vector<Entry> entries;
  const int top = std::min(opt.mode_cap, k);
  for (int n = 0; n <= top; ++n) {
    const Mesh mode_mesh = mesh.with_mode(n);
    const SpectrumResult part = mode_spectrum(mode_mesh, rho.on(mode_mesh), lambda, k, opt);
    for (std::size_t i = 0; i < part.size(); ++i)
      entries.push_back(Entry{part.sigmas[i], n, static_cast<int>(i), part.phis[i], part.residuals[i]});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.sigma != b.sigma) return a.sigma < b.sigma;
    if (a.mode != b.mode) return a.mode < b.mode;
    return a.index < b.index;
  });

  SpectrumResult res;
  for (auto& e : entries) {
    res.sigmas.push_back(e.sigma);
    res.phis.push_back(std::move(e.phi));
    res.residuals.push_back(e.residual);
    res.modes.push_back(e.mode);
  }
  assign_clusters(res, opt.cluster_tolerance);
  truncate(res, static_cast<std::size_t>(k));
  return res;
}

double nu1(const Mesh& mesh, const Field& rho, double lambda, const EigenOptions& opt) {
  check_density(mesh, rho);
  const Pencil pencil = stiffness_pencil(mesh, plain_mass(weighted_rho(mesh, rho)));
  return smallest_pairs(pencil, mesh.size(), 1, opt).values[0] - lambda;
}

SigmaHat sigma_hat1(const Mesh& mesh, const Field& rho, double lambda, const EigenOptions& opt) {
  check_density(mesh, rho);
  const Eigen::VectorXd m = weighted_rho(mesh, rho);
  auto solver = std::make_shared<linalg::ShiftedSolver>(
      mesh, m, mesh.carries_mean() ? std::optional<Eigen::VectorXd>(m) : std::nullopt, lambda);
  const Pencil pencil{[solver](const Eigen::VectorXd& x) -> Eigen::VectorXd { return solver->apply(x); },
                      plain_mass(m),
                      [solver](const Eigen::VectorXd& x) -> Eigen::VectorXd { return solver->solve(x); }};
  const Ritz ritz = smallest_pairs(pencil, mesh.size(), 1, opt);
  Eigen::VectorXd v = ritz.vectors.col(0);
  v /= std::sqrt(v.dot(m.cwiseProduct(v)));
  orient(v);
  return SigmaHat{ritz.values[0], Field(mesh, v)};
}

}  // namespace gelfand::spectrum
