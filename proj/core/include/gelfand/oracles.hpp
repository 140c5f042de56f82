#pragma once

// Closed forms on the unit disk.
//
// The Liouville family u(r) = 2 ln((1+alpha)/(1+alpha r^2)) solves
// -Delta u = mu e^u with mu = 8 alpha/(1+alpha)^2. Along the mean field
// branch u = lambda psi, and with c = 1 + alpha
//
//   lambda = 8 pi alpha/(1+alpha)      mass = int e^u = pi c
//   E      = c (c ln c - c + 1) / (8 pi (c-1)^2)
//   g      = (8 pi - 2 lambda)/(8 pi - lambda)
//   <z>    = 1/(8 pi - lambda).
//
// The same formulas describe lambda < 0 through alpha in (-1, 0).

#include <functional>
#include <string>
#include <vector>

namespace gelfand::oracle {

struct LiouvilleRecord {
  double alpha = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  double mass_eu = 0.0;
  double E = 0.0;
  double g = 0.0;
  double mean_z = 0.0;
  /// dE/dlambda, differentiated in closed form.
  double dE_dlambda = 0.0;
  /// dmu/dlambda = (8 pi - 2 lambda)/(8 pi^2).
  double dmu_dlambda = 0.0;
  /// u(r) = lambda psi(r) on [0, 1].
  std::function<double(double)> u;
};

/// Throws InvalidSpec unless alpha > 0.
LiouvilleRecord liouville_closed_form(double alpha);

/// The record at a given lambda < 8 pi of either sign (alpha > -1).
/// Throws LambdaOutOfRange for lambda >= 8 pi.
LiouvilleRecord disk_closed_form(double lambda);

/// E as a function of c = 1 + alpha, with a series near c = 1.
double energy_of_c(double c);

/// E_0 of the unit disk: the torsion function h = (1 - r^2)/4 has
/// int h = pi/8, so E_0 = (pi/8)/(2 pi^2) = 1/(16 pi).
double disk_e0();

struct AppendixEntry {
  int n = 0;
  int m = 0;
  double zero = 0.0;   ///< m-th zero of J_n
  double sigma = 0.0;  ///< zero^2, eigenvalue of -Delta phi = sigma (phi - avg phi)
  int multiplicity = 0;
  std::string eigenfunctions;
};

/// sigma_{n,m} for 1 <= n <= n_max, 1 <= m <= m_max, ordered by (n, m).
/// The radial eigenfunctions J_0(mu_{1,m} r) - J_0(mu_{1,m}) share their
/// eigenvalue with the n = 1 pair, so n = 1 entries have multiplicity 3 and
/// there are no standalone n = 0 entries.
std::vector<AppendixEntry> appendix_eigenpairs(int n_max, int m_max);

}  // namespace gelfand::oracle
