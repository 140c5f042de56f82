#include "gelfand/linear.hpp"

#include "gelfand/errors.hpp"
#include "gelfand/grid.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include <vector>

namespace gelfand::linalg {

struct ShiftedSolver::State {
  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd diagonal;
  std::optional<Eigen::VectorXd> rank_one;
  double shift = 0.0;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

ShiftedSolver::ShiftedSolver(const grid::Mesh& mesh, const Eigen::VectorXd& diagonal,
                             std::optional<Eigen::VectorXd> rank_one, double shift)
    : state_(std::make_unique<State>()) {
  const Eigen::Index n = mesh.size();
  if (diagonal.size() != n || (rank_one && rank_one->size() != n))
    throw MeshMismatch("shifted operator coefficients do not match the mesh");
  state_->stiffness = mesh.stiffness();
  state_->diagonal = diagonal;
  state_->rank_one = std::move(rank_one);
  state_->shift = shift;

  const bool bordered = state_->rank_one.has_value();
  const Eigen::Index dim = bordered ? n + 1 : n;
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(state_->stiffness.nonZeros() + 3 * n + 1));
  for (int k = 0; k < state_->stiffness.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(state_->stiffness, k); it; ++it)
      entries.emplace_back(it.row(), it.col(), it.value());
  for (Eigen::Index i = 0; i < n; ++i) entries.emplace_back(i, i, -shift * diagonal[i]);
  if (bordered) {
    const auto& q = *state_->rank_one;
    for (Eigen::Index i = 0; i < n; ++i) {
      entries.emplace_back(i, n, shift * q[i]);
      entries.emplace_back(n, i, q[i]);
    }
    entries.emplace_back(n, n, -1.0);
  }
  Eigen::SparseMatrix<double> a(dim, dim);
  a.setFromTriplets(entries.begin(), entries.end());
  a.makeCompressed();
  state_->lu.analyzePattern(a);
  state_->lu.factorize(a);
  if (state_->lu.info() != Eigen::Success) throw SingularSystem("shifted operator is singular");
}

ShiftedSolver::~ShiftedSolver() = default;
ShiftedSolver::ShiftedSolver(ShiftedSolver&&) noexcept = default;
ShiftedSolver& ShiftedSolver::operator=(ShiftedSolver&&) noexcept = default;

Eigen::Index ShiftedSolver::size() const { return state_->diagonal.size(); }
double ShiftedSolver::shift() const { return state_->shift; }

Eigen::VectorXd ShiftedSolver::apply(const Eigen::VectorXd& x) const {
  const auto& st = *state_;
  Eigen::VectorXd y = st.stiffness * x - st.shift * st.diagonal.cwiseProduct(x);
  if (st.rank_one) y += st.shift * st.rank_one->dot(x) * (*st.rank_one);
  return y;
}

Eigen::VectorXd ShiftedSolver::solve(const Eigen::VectorXd& rhs) const {
  const auto& st = *state_;
  const Eigen::Index n = size();
  auto raw_solve = [&](const Eigen::VectorXd& b) -> Eigen::VectorXd {
    if (!st.rank_one) return st.lu.solve(b);
    Eigen::VectorXd ext(n + 1);
    ext.head(n) = b;
    ext[n] = 0.0;
    Eigen::VectorXd sol = st.lu.solve(ext);
    return sol.head(n);
  };
  Eigen::VectorXd x = raw_solve(rhs);
  x += raw_solve(rhs - apply(x));
  if (!x.allFinite()) throw SingularSystem("shifted operator solve produced non-finite values");
  return x;
}

}  // namespace gelfand::linalg
