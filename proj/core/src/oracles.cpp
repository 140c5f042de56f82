#include "gelfand/oracles.hpp"

#include "gelfand/bessel.hpp"
#include "gelfand/errors.hpp"

#include <cmath>
#include <numbers>

namespace gelfand::oracle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double k8Pi = 8.0 * kPi;

// S(eps) = sum_{k>=2} (-1)^k eps^{k-2} / (k(k-1)) and its derivative, so
// that c ln c - c + 1 = eps^2 S(eps) with eps = c - 1.
void series(double eps, double& s, double& ds) {
  s = 0.0;
  ds = 0.0;
  double p = 1.0;  // eps^{k-2}
  double q = 0.0;  // (k-2) eps^{k-3}
  for (int k = 2; k < 80; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const double denom = static_cast<double>(k) * (k - 1);
    s += sign * p / denom;
    ds += sign * q / denom;
    if (std::abs(p) < 1e-18 && k > 4) break;
    q = (k - 1) * p;
    p *= eps;
  }
}

constexpr double kSeriesRadius = 0.1;

// dE/dc.
double energy_slope(double c) {
  const double eps = c - 1.0;
  if (std::abs(eps) < kSeriesRadius) {
    double s = 0.0;
    double ds = 0.0;
    series(eps, s, ds);
    return (s + c * ds) / k8Pi;
  }
  const double n = c * c * std::log(c) - c * c + c;
  const double dn = 2.0 * c * std::log(c) - c + 1.0;
  return (dn * eps - 2.0 * n) / (k8Pi * eps * eps * eps);
}

LiouvilleRecord from_alpha(double alpha) {
  const double c = 1.0 + alpha;
  LiouvilleRecord rec;
  rec.alpha = alpha;
  rec.lambda = k8Pi * alpha / c;
  rec.mu = 8.0 * alpha / (c * c);
  rec.mass_eu = kPi * c;
  rec.E = energy_of_c(c);
  const double gap = k8Pi - rec.lambda;  // = 8 pi / c
  rec.g = (k8Pi - 2.0 * rec.lambda) / gap;
  rec.mean_z = 1.0 / gap;
  rec.dE_dlambda = energy_slope(c) * c * c / k8Pi;
  rec.dmu_dlambda = (k8Pi - 2.0 * rec.lambda) / (8.0 * kPi * kPi);
  rec.u = [alpha, c](double r) { return 2.0 * std::log(c / (1.0 + alpha * r * r)); };
  return rec;
}

}  // namespace

double energy_of_c(double c) {
  if (!(c > 0.0)) throw InvalidSpec("energy closed form needs c > 0");
  const double eps = c - 1.0;
  if (std::abs(eps) < kSeriesRadius) {
    double s = 0.0;
    double ds = 0.0;
    series(eps, s, ds);
    return c * s / k8Pi;
  }
  return c * (c * std::log(c) - c + 1.0) / (k8Pi * eps * eps);
}

LiouvilleRecord liouville_closed_form(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidSpec("Liouville parameter alpha must be positive");
  return from_alpha(alpha);
}

LiouvilleRecord disk_closed_form(double lambda) {
  if (!(lambda < k8Pi) || !std::isfinite(lambda)) throw LambdaOutOfRange(lambda);
  LiouvilleRecord rec = from_alpha(lambda / (k8Pi - lambda));
  rec.lambda = lambda;
  return rec;
}

double disk_e0() {
  const double integral_h = kPi / 8.0;
  return integral_h / (2.0 * kPi * kPi);
}

std::vector<AppendixEntry> appendix_eigenpairs(int n_max, int m_max) {
  if (n_max < 1 || m_max < 1) throw InvalidSpec("appendix table needs n_max, m_max >= 1");
  std::vector<AppendixEntry> out;
  for (int n = 1; n <= n_max; ++n) {
    for (int m = 1; m <= m_max; ++m) {
      AppendixEntry e;
      e.n = n;
      e.m = m;
      e.zero = spectrum::bessel_zero(n, m);
      e.sigma = e.zero * e.zero;
      const std::string idx = std::to_string(n) + "," + std::to_string(m);
      const std::string jn = "J_" + std::to_string(n) + "(mu_" + idx + " r)";
      if (n == 1) {
        e.multiplicity = 3;
        e.eigenfunctions = "J_0(mu_" + idx + " r) - J_0(mu_" + idx + "); cos(theta) " + jn + "; sin(theta) " + jn;
      } else {
        e.multiplicity = 2;
        e.eigenfunctions = "cos(" + std::to_string(n) + " theta) " + jn + "; sin(" + std::to_string(n) +
                           " theta) " + jn;
      }
      out.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace gelfand::oracle
