#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <memory>
#include <optional>

namespace gelfand::grid {
class Mesh;
}

namespace gelfand::linalg {

/// Direct solver for
///
///   A(s) = S - s * (diag(m) - q q^T),
///
/// with S the mesh stiffness. The rank-one term is optional. A(s) is
/// factored through the bordered system
///
///   [ S - s diag(m)   s q ] [x]   [b]
///   [      q^T       -1  ] [t] = [0],
///
/// which is non-singular exactly when A(s) is, even where S - s diag(m) is
/// singular on its own. Each solve performs one step of iterative refinement.
class ShiftedSolver {
 public:
  ShiftedSolver(const grid::Mesh& mesh, const Eigen::VectorXd& diagonal,
                std::optional<Eigen::VectorXd> rank_one, double shift);
  ~ShiftedSolver();
  ShiftedSolver(ShiftedSolver&&) noexcept;
  ShiftedSolver& operator=(ShiftedSolver&&) noexcept;

  Eigen::Index size() const;
  double shift() const;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  /// Throws SingularSystem when the factorization or the solve breaks down.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace gelfand::linalg
