#pragma once

// Spectrum of the linearized mean field operator
//
//   -Delta phi - lambda rho phi_0 = sigma rho phi_0,   phi_0 = phi - <phi>,
//
// posed as the pencil S phi = tau B phi with tau = lambda + sigma and
// B = P^T M_rho P the rho-weighted mass of the centered function. B has the
// constants in its kernel; the zero-Dirichlet space meets that kernel only
// at 0 in the continuum, and discretely the constant vector is simply an
// infinite eigenvalue that shift-invert maps to zero, so no deflation of
// constants is needed.
//
// On the disk the problem separates: mode 0 carries the constraint, while
// every mode n >= 1 has vanishing mean and reduces to -Delta_n phi =
// tau rho phi. Each angular mode is solved on its own radial mesh and the
// results are merged; modes n >= 1 contribute each eigenvalue twice
// (cos and sin).

#include "gelfand/bessel.hpp"
#include "gelfand/grid.hpp"

#include <vector>

namespace gelfand::spectrum {

struct EigenOptions {
  /// Relative change of the wanted Ritz values that ends the iteration.
  double tolerance = 1e-10;
  /// Relative eigen residual |A x - theta B x| / (|theta| |B x|) required of
  /// the wanted pairs once their values have settled.
  double residual_tolerance = 1e-10;
  int max_iterations = 400;
  /// Highest angular mode used when merging disk spectra.
  int mode_cap = 8;
  /// Entries whose relative gap is below this share a cluster.
  double cluster_tolerance = 1e-6;
};

struct SpectrumResult {
  std::vector<double> sigmas;        ///< ascending
  std::vector<grid::Field> phis;     ///< phi_k, normalized so <rho phi_{k,0}^2> = 1
  std::vector<double> residuals;     ///< relative residual of the eigen equation
  std::vector<int> modes;            ///< angular mode of the entry (0 on rectangles)
  std::vector<int> clusters;         ///< cluster index, 0-based, shared by near-equal sigmas
  std::vector<int> multiplicities;   ///< size of the entry's cluster

  std::size_t size() const { return sigmas.size(); }
};

/// The k smallest constrained eigenvalues. On a mode-0 disk mesh the modes
/// 0..min(mode_cap, k) are solved and merged; on any other mesh only the
/// mesh's own problem is solved. Throws DegenerateDensity when rho <= 0
/// somewhere and EigenNonConvergence when the iteration stalls.
SpectrumResult constrained_spectrum(const grid::Mesh& mesh, const grid::Field& rho, double lambda, int k,
                                    const EigenOptions& options = {});

/// Same problem restricted to the given mesh (one angular mode on the disk).
SpectrumResult mode_spectrum(const grid::Mesh& mesh, const grid::Field& rho, double lambda, int k,
                             const EigenOptions& options = {});

/// First eigenvalue of -Delta phi - lambda rho phi = nu rho phi.
double nu1(const grid::Mesh& mesh, const grid::Field& rho, double lambda, const EigenOptions& options = {});

struct SigmaHat {
  double value = 0.0;
  grid::Field minimizer;
};

/// Minimum over phi of
///   (int |grad phi|^2 - lambda int rho (phi^2 - <phi>^2)) / int rho phi^2.
/// The numerator is the quadratic form of the linearized operator, which is
/// positive definite while sigma_1 > 0; that is a precondition here.
SigmaHat sigma_hat1(const grid::Mesh& mesh, const grid::Field& rho, double lambda,
                    const EigenOptions& options = {});

/// (int |grad phi|^2 - lambda <phi_0^2>) / <phi_0^2>.
double constrained_quotient(const grid::Field& phi, const grid::Field& rho, double lambda);
/// The sigma-hat quotient above, for an arbitrary phi.
double hat_quotient(const grid::Field& phi, const grid::Field& rho, double lambda);

/// rho-mean of f on the mesh; zero on disk modes n >= 1.
double rho_mean(const grid::Field& rho, const grid::Field& f);
/// f - <f>.
grid::Field centered(const grid::Field& rho, const grid::Field& f);

}  // namespace gelfand::spectrum
