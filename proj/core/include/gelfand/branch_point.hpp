#pragma once

namespace gelfand {

/// Scalars tracked at one accepted point of the solution branch.
struct BranchPoint {
  double lambda = 0.0;
  double E = 0.0;       ///< energy, half the rho-mean of psi
  double mu = 0.0;      ///< Gel'fand parameter lambda / mass_eu
  double g = 0.0;       ///< 1 - lambda <z>
  double sigma1 = 0.0;  ///< first constrained eigenvalue
  double nu1 = 0.0;     ///< first eigenvalue of -Delta - lambda rho
  double mean_z = 0.0;
  double min_z = 0.0;
  double mass_eu = 0.0;  ///< integral of exp(lambda psi)
  int newton_iters = 0;
};

}  // namespace gelfand
