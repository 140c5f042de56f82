#include "gelfand/diagnostics.hpp"

#include "gelfand/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace gelfand::diag {

using grid::Field;
using grid::Mesh;
using mf::MeanFieldState;

bool VerificationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Fields and moments needed by the checks, one linearized solve per field.
struct PointFields {
  Field eta;
  Field z;
  double mean_eta = 0.0;
  double eta_identity_rhs = 0.0;  // <psi_0^2> + lambda <psi_0 eta_0>
  double mean_w = 0.0;
  double w_identity_rhs = 0.0;    // 2 <z_0^2> + lambda <z_0^3>
  double w_identity_scale = 0.0;
  GCoefficients coeffs;
};

PointFields fields_at(const MeanFieldState& s) {
  const mf::LinearizedOperator op(s);
  const Field& rho = s.rho;
  const Field psi0 = spectrum::centered(rho, s.psi);
  Field eta = op.solve(rho * psi0);
  Field z = op.solve(rho);
  const Field eta0 = spectrum::centered(rho, eta);
  const Field z0 = spectrum::centered(rho, z);
  const Field w = op.solve(rho * (2.0 * z0 + s.lambda * spectrum::centered(rho, z0 * z0)));

  PointFields out{eta, z, 0.0, 0.0, 0.0, 0.0, 0.0, {}};
  out.mean_eta = grid::inner(rho, eta);
  out.eta_identity_rhs = rho_inner(rho, psi0, psi0) + s.lambda * rho_inner(rho, psi0, eta0);
  out.mean_w = grid::inner(rho, w);
  const double z0_sq = rho_inner(rho, z0, z0);
  const double z0_cube = rho_inner(rho, z0 * z0, z0);
  out.w_identity_rhs = 2.0 * z0_sq + s.lambda * z0_cube;
  out.w_identity_scale = 2.0 * z0_sq + std::abs(s.lambda * z0_cube);
  out.coeffs = g_and_coeffs(s, z);
  return out;
}

// Second-order central difference on a non-uniform grid.
double central_difference(const std::vector<double>& x, const std::vector<double>& f, std::size_t i) {
  const double h1 = x[i] - x[i - 1];
  const double h2 = x[i + 1] - x[i];
  return -h2 / (h1 * (h1 + h2)) * f[i - 1] + (h2 - h1) / (h1 * h2) * f[i] + h1 / (h2 * (h1 + h2)) * f[i + 1];
}

// Tracks the worst residual of a pointwise check.
struct Worst {
  double value = 0.0;
  double lambda = kNaN;

  // A NaN residual sticks, so the check fails.
  void update(double v, double at) {
    if (std::isnan(value)) return;
    if (std::isnan(lambda) || std::isnan(v) || v > value) {
      value = v;
      lambda = at;
    }
  }
};

Check bounded(std::string name, const Worst& w, double tol, std::string note = {}) {
  return Check{std::move(name), w.value <= tol, w.value, tol, w.lambda, std::move(note)};
}

// For inequality checks: the residual is the worst margin, which must stay
// above the bound.
Check above(std::string name, double worst, double at, double bound, std::string note) {
  return Check{std::move(name), worst > bound, worst, bound, at, std::move(note)};
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::vector<std::size_t> sample_indices(std::size_t n, int count) {
  std::vector<std::size_t> idx;
  if (count <= 0 || n == 0) return idx;
  if (static_cast<std::size_t>(count) >= n) {
    for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
    return idx;
  }
  for (int k = 0; k < count; ++k) {
    const double t = (k + 0.5) / count;
    idx.push_back(static_cast<std::size_t>(t * static_cast<double>(n)));
  }
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

}  // namespace

VerificationReport verify_branch(const mf::Branch& branch, const VerifyOptions& opt) {
  const std::size_t n = branch.size();
  if (n < 5) throw InvalidSpec("verification needs a branch with at least five points");
  if (branch.states.size() != n) throw InvalidSpec("branch states and points differ in length");

  const auto& pts = branch.points;
  std::vector<double> lam(n), E(n), g(n), mu(n), mass(n);
  for (std::size_t i = 0; i < n; ++i) {
    lam[i] = pts[i].lambda;
    E[i] = pts[i].E;
    g[i] = pts[i].g;
    mu[i] = pts[i].mu;
    mass[i] = pts[i].mass_eu;
  }

  std::vector<PointFields> f;
  f.reserve(n);
  for (const auto& s : branch.states) f.push_back(fields_at(s));

  VerificationReport report;

  // Energy forms.
  {
    Worst w;
    for (std::size_t i = 0; i < n; ++i) {
      const EnergyForms e = energy_forms(branch.states[i]);
      const double d = std::max(std::abs(e.gradient_form - e.mean_form), std::abs(e.green_form - e.mean_form));
      w.update(d / std::abs(e.mean_form), lam[i]);
    }
    report.checks.push_back(bounded("energy_forms", w, 1e-8, "relative spread of the three energy forms"));
  }

  // dE/dlambda against <eta>, and its sign.
  std::vector<double> dE(n, kNaN);
  {
    Worst w;
    double min_slope = std::numeric_limits<double>::infinity();
    double min_at = kNaN;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      dE[i] = central_difference(lam, E, i);
      w.update(std::abs(dE[i] - f[i].mean_eta) / std::abs(f[i].mean_eta), lam[i]);
      if (dE[i] < min_slope) {
        min_slope = dE[i];
        min_at = lam[i];
      }
    }
    report.checks.push_back(bounded("dE_dlambda_vs_mean_eta", w, opt.derivative_rtol,
                                    "central-difference dE/dlambda against <eta>, relative"));
    report.checks.push_back(
        above("dE_dlambda_positive", min_slope, min_at, 0.0, "smallest central-difference dE/dlambda"));
  }

  // <eta> = <psi_0^2> + lambda <psi_0 eta_0>.
  {
    Worst w;
    for (std::size_t i = 0; i < n; ++i)
      w.update(std::abs(f[i].mean_eta - f[i].eta_identity_rhs) / std::abs(f[i].mean_eta), lam[i]);
    report.checks.push_back(bounded("eta_mean_identity", w, opt.identity_rtol, "relative"));
  }

  // g-ODE, pointwise and in integrating-factor form.
  {
    std::vector<double> dg(n, kNaN);
    double scale = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      dg[i] = central_difference(lam, g, i);
      scale = std::max(scale, std::abs(dg[i]));
    }
    Worst w;
    for (std::size_t i = 1; i + 1 < n; ++i)
      w.update(std::abs(dg[i] - (f[i].coeffs.a * g[i] + f[i].coeffs.b)) / scale, lam[i]);
    report.checks.push_back(bounded("g_ode", w, opt.ode_rtol, "|g' - (a g + b)| relative to max |g'|"));

    // e^{-A} g - g(ref) = int_ref e^{-A} b, A = int_ref a, by trapezoid
    // accumulation outward from the point closest to lambda = 0. Near 8 pi
    // a grows like (8 pi - lambda)^{-2} and the sampled steps no longer
    // resolve e^{-A}; the sweep stops once one step changes A by more than
    // opt.integrated_max_dA.
    std::size_t ref = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(lam[i]) < std::abs(lam[ref])) ref = i;
    Worst wi;
    double covered_lo = lam[ref];
    double covered_hi = lam[ref];
    auto sweep = [&](int dir) {
      double A = 0.0;
      double I = 0.0;
      double I_abs = 0.0;
      double prev_fac = 1.0;
      for (std::size_t i = ref; dir > 0 ? i + 1 < n : i > 0;) {
        const std::size_t j = dir > 0 ? i + 1 : i - 1;
        const double dt = lam[j] - lam[i];
        const double dA = 0.5 * dt * (f[i].coeffs.a + f[j].coeffs.a);
        if (std::abs(dA) > opt.integrated_max_dA) break;
        A += dA;
        const double fac = std::exp(-A);
        const double integrand_i = prev_fac * f[i].coeffs.b;
        const double integrand_j = fac * f[j].coeffs.b;
        I += 0.5 * dt * (integrand_i + integrand_j);
        I_abs += 0.5 * std::abs(dt) * (std::abs(integrand_i) + std::abs(integrand_j));
        const double lhs = fac * g[j] - g[ref];
        const double mag = std::abs(g[ref]) + I_abs + std::abs(fac * g[j]);
        wi.update(std::abs(lhs - I) / mag, lam[j]);
        covered_lo = std::min(covered_lo, lam[j]);
        covered_hi = std::max(covered_hi, lam[j]);
        prev_fac = fac;
        i = j;
      }
    };
    sweep(+1);
    sweep(-1);
    report.checks.push_back(bounded("g_ode_integrated", wi, opt.integrated_rtol,
                                    "integrating-factor form, relative to accumulated magnitude, over lambda in [" +
                                        format_number(covered_lo) + ", " + format_number(covered_hi) + "]"));
  }

  // <z> > 0.
  {
    double worst = std::numeric_limits<double>::infinity();
    double at = kNaN;
    for (std::size_t i = 0; i < n; ++i)
      if (pts[i].mean_z < worst) {
        worst = pts[i].mean_z;
        at = lam[i];
      }
    report.checks.push_back(above("mean_z_positive", worst, at, 0.0, "smallest <z>"));
  }

  // Integral maximum principle: g >= 0 implies z >= 0.
  {
    Worst w;
    for (std::size_t i = 0; i < n; ++i) {
      if (g[i] < 0.0) continue;
      const double zmax = f[i].z.max_abs();
      w.update(std::max(0.0, -f[i].z.min()) / zmax, lam[i]);
    }
    report.checks.push_back(bounded("max_principle", w, opt.max_principle_rtol,
                                    "max(0, -min z)/||z||_inf over points with g >= 0"));
  }

  // g > 0 below 4 pi, and a single sign change.
  {
    const double four_pi = 0.5 * mf::kCriticalLambda;
    double worst = std::numeric_limits<double>::infinity();
    double at = kNaN;
    for (std::size_t i = 0; i < n; ++i)
      if (lam[i] < four_pi && g[i] < worst) {
        worst = g[i];
        at = lam[i];
      }
    report.checks.push_back(above("g_positive_below_4pi", worst, at, 0.0, "smallest g with lambda < 4 pi"));

    int changes = 0;
    double where = kNaN;
    for (std::size_t i = 0; i + 1 < n; ++i)
      if ((g[i] > 0.0) != (g[i + 1] > 0.0)) {
        ++changes;
        where = lam[i + 1];
      }
    report.checks.push_back(Check{"g_sign_changes", changes <= 1, static_cast<double>(changes), 1.0, where,
                                  "number of sign changes of g"});
  }

  // sigma_j beta_j = alpha_j.
  {
    Worst w;
    for (const std::size_t i : sample_indices(n, opt.fourier_samples)) {
      const MeanFieldState& s = branch.states[i];
      const Mesh& mesh = s.mesh();
      // Disk modes n >= 1 are orthogonal to the radial psi and eta, so both
      // sides vanish there; the radial eigenpairs carry the identity.
      const spectrum::SpectrumResult sp =
          mesh.is_disk() ? spectrum::mode_spectrum(mesh, s.rho, s.lambda, opt.fourier_modes, opt.eigen)
                         : spectrum::constrained_spectrum(mesh, s.rho, s.lambda, opt.fourier_modes, opt.eigen);
      const Field psi0 = spectrum::centered(s.rho, s.psi);
      const Field eta0 = spectrum::centered(s.rho, f[i].eta);
      const double floor = 1e-8 * std::sqrt(rho_inner(s.rho, psi0, psi0));
      for (std::size_t j = 0; j < sp.size(); ++j) {
        const Field phi0 = spectrum::centered(s.rho, sp.phis[j]);
        const double alpha = rho_inner(s.rho, phi0, psi0);
        const double beta = rho_inner(s.rho, phi0, eta0);
        w.update(std::abs(sp.sigmas[j] * beta - alpha) / std::max(std::abs(alpha), floor), s.lambda);
      }
    }
    report.checks.push_back(bounded("fourier_identity", w, opt.fourier_rtol,
                                    "|sigma_j beta_j - alpha_j| / |alpha_j| for the leading eigenpairs"));
  }

  // <w> = 2 <z_0^2> + lambda <z_0^3>.
  {
    Worst w;
    for (std::size_t i = 0; i < n; ++i)
      w.update(std::abs(f[i].mean_w - f[i].w_identity_rhs) / f[i].w_identity_scale, lam[i]);
    report.checks.push_back(bounded("w_mean_identity", w, opt.identity_rtol, "relative"));
  }

  // g = mass * dmu/dlambda.
  {
    Worst w;
    for (std::size_t i = 1; i + 1 < n; ++i)
      w.update(std::abs(g[i] - mass[i] * central_difference(lam, mu, i)) / std::max(1.0, std::abs(g[i])), lam[i]);
    report.checks.push_back(bounded("g_vs_mass_dmu", w, opt.mu_slope_rtol,
                                    "|g - mass dmu/dlambda| / max(1, |g|)"));
  }

  // Spectral positivity when the branch carries spectral columns.
  if (std::none_of(pts.begin(), pts.end(), [](const BranchPoint& p) { return std::isnan(p.sigma1); })) {
    double worst = std::numeric_limits<double>::infinity();
    double at = kNaN;
    double worst_shift = std::numeric_limits<double>::infinity();
    double at_shift = kNaN;
    for (const auto& p : pts) {
      if (p.sigma1 < worst) {
        worst = p.sigma1;
        at = p.lambda;
      }
      if (p.lambda + p.sigma1 < worst_shift) {
        worst_shift = p.lambda + p.sigma1;
        at_shift = p.lambda;
      }
    }
    report.checks.push_back(above("sigma1_positive", worst, at, 0.0, "smallest sigma_1"));
    report.checks.push_back(above("lambda_plus_sigma1_positive", worst_shift, at_shift, 0.0,
                                  "smallest lambda + sigma_1"));
  }

  return report;
}

}  // namespace gelfand::diag
