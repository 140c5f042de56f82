#pragma once

// Discrete domains, the Dirichlet Laplacian and quadrature.
//
// Both mesh kinds are cell centered: unknowns live at cell centers, the
// boundary sits on cell faces and zero Dirichlet data enters through the
// boundary-face flux (u_b - u_N)/(h/2) with u_b = 0. The operator is
// assembled as a symmetric stiffness matrix S, and the discrete -Delta is
// K = W^{-1} S where W is the diagonal of cell measures. K is therefore
// self-adjoint in the W-weighted inner product, and integration by parts,
//   <K f, g>_W = f^T S g = <f, K g>_W,
// holds exactly at the discrete level.
//
// DiskRadial(n, n_r) is the angular Fourier mode n of the unit disk: a field
// is the radial profile f(r) of f(r) cos(n theta). Cell measures are the
// exact annulus areas (2 pi r_i h on the uniform grid), so sum(w) == pi. Integration against these
// weights is the integral of the profile over the disk; for n >= 1 the
// angular factor makes every mean vanish (see Mesh::carries_mean).

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>

namespace gelfand::grid {

struct DiskRadial {
  int mode = 0;
  int n_r = 0;
  /// 0 for uniform cells r_i = (i - 1/2)/n_r. A positive value g places the
  /// cell faces at (e^{g s} - 1)/(e^g - 1), s = j/n_r, clustering cells near
  /// the axis where concentrated solutions need them.
  double grading = 0.0;
};

struct Rectangle {
  double a = 1.0;
  double b = 1.0;
  int n_x = 0;
  int n_y = 0;
};

using MeshSpec = std::variant<DiskRadial, Rectangle>;

/// Throws InvalidSpec with the reason when the spec is not admissible.
void validate(const MeshSpec& spec);

std::string describe(const MeshSpec& spec);

class SpdSolver;

class Mesh {
 public:
  const MeshSpec& spec() const;
  Eigen::Index size() const;

  bool is_disk() const;
  /// Angular mode of a disk mesh; 0 for rectangles.
  int mode() const;
  /// Whether constants have non-zero integral for fields on this mesh. False
  /// for disk modes n >= 1, where cos(n theta) integrates to zero, so every
  /// weighted mean of such a field is zero.
  bool carries_mean() const;

  /// |Omega|: pi for the disk, a*b for the rectangle.
  double area() const;
  /// Largest cell width.
  double spacing() const;

  const Eigen::VectorXd& weights() const;
  /// Symmetric positive definite S = W K.
  const Eigen::SparseMatrix<double>& stiffness() const;
  /// Cell-center coordinates. For the disk x = r and y = 0.
  Eigen::Vector2d point(Eigen::Index i) const;
  /// Radius of cell i (disk) or distance from the rectangle center.
  double radius(Eigen::Index i) const;

  /// Cached factorization of S.
  const SpdSolver& poisson() const;

  /// Disk mesh with the same radial nodes and a different angular mode.
  Mesh with_mode(int mode) const;
  /// True when both meshes share node layout and weights, so a field can be
  /// reinterpreted on the other one.
  bool same_nodes(const Mesh& other) const;

  friend bool operator==(const Mesh& lhs, const Mesh& rhs) { return lhs.impl_ == rhs.impl_; }

  struct Impl;

 private:
  explicit Mesh(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  friend Mesh build_mesh(const MeshSpec& spec);

  std::shared_ptr<const Impl> impl_;
};

Mesh build_mesh(const MeshSpec& spec);

/// One real value per cell of a mesh.
class Field {
 public:
  explicit Field(Mesh mesh);
  Field(Mesh mesh, Eigen::VectorXd values);

  static Field constant(const Mesh& mesh, double value);
  /// Samples f at every cell center; for the disk f receives (r, 0).
  static Field sample(const Mesh& mesh, const std::function<double(double, double)>& f);

  const Mesh& mesh() const { return mesh_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  Eigen::Index size() const { return values_.size(); }
  double operator[](Eigen::Index i) const { return values_[i]; }
  double& operator[](Eigen::Index i) { return values_[i]; }

  double min() const { return values_.minCoeff(); }
  double max() const { return values_.maxCoeff(); }
  double max_abs() const { return values_.cwiseAbs().maxCoeff(); }
  bool all_finite() const { return values_.allFinite(); }

  /// The same values on a mesh with identical nodes (e.g. another angular
  /// mode of the same radial grid).
  Field on(const Mesh& other) const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);

  friend Field operator+(Field lhs, const Field& rhs) { return lhs += rhs; }
  friend Field operator-(Field lhs, const Field& rhs) { return lhs -= rhs; }
  friend Field operator*(Field f, double s) { return f *= s; }
  friend Field operator*(double s, Field f) { return f *= s; }
  /// Pointwise product.
  friend Field operator*(const Field& lhs, const Field& rhs);

 private:
  Mesh mesh_;
  Eigen::VectorXd values_;
};

void require_same_mesh(const Field& f, const Mesh& mesh);
void require_same_mesh(const Field& f, const Field& g);

/// K f, the discrete -Delta with zero Dirichlet data.
Field apply_laplacian(const Mesh& mesh, const Field& f);
/// f with K f = rhs, i.e. the discrete Green operator G[rhs].
Field solve_dirichlet(const Mesh& mesh, const Field& rhs);
/// sum_i w_i f_i.
double integrate(const Mesh& mesh, const Field& f);

/// sum_i w_i f_i g_i.
double inner(const Field& f, const Field& g);
/// sqrt(sum_i w_i f_i^2).
double norm(const Field& f);

/// Direct solver for S x = b: tridiagonal elimination for radial meshes,
/// sparse LDL^T for rectangles.
class SpdSolver {
 public:
  explicit SpdSolver(const Eigen::SparseMatrix<double>& matrix, bool tridiagonal);
  ~SpdSolver();
  SpdSolver(SpdSolver&&) noexcept;
  SpdSolver& operator=(SpdSolver&&) noexcept;

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace gelfand::grid
