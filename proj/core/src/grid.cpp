#include "gelfand/grid.hpp"

#include "gelfand/errors.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace gelfand::grid {

namespace {

constexpr int kMinNodes = 16;

using Triplet = Eigen::Triplet<double>;

}  // namespace

struct Mesh::Impl {
  MeshSpec spec;
  Eigen::VectorXd weights;
  Eigen::SparseMatrix<double> stiffness;
  std::vector<Eigen::Vector2d> points;
  double area = 0.0;
  double spacing = 0.0;
  std::unique_ptr<SpdSolver> poisson;
};

void validate(const MeshSpec& spec) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DiskRadial>) {
          if (s.mode < 0) throw InvalidSpec("disk mode must be non-negative");
          if (s.n_r < kMinNodes) throw InvalidSpec("disk needs n_r >= 16 radial cells");
          if (!(s.grading >= 0.0 && s.grading <= 20.0)) throw InvalidSpec("radial grading must lie in [0, 20]");
        } else {
          if (!(s.a > 0.0) || !(s.b > 0.0)) throw InvalidSpec("rectangle sides must be positive");
          if (!std::isfinite(s.a) || !std::isfinite(s.b))
            throw InvalidSpec("rectangle sides must be finite");
          if (s.a > s.b) throw InvalidSpec("rectangle must be given with a <= b");
          if (s.n_x < kMinNodes || s.n_y < kMinNodes)
            throw InvalidSpec("rectangle needs n_x, n_y >= 16 cells");
        }
      },
      spec);
}

std::string describe(const MeshSpec& spec) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DiskRadial>) {
          os << "disk(mode=" << s.mode << ", n_r=" << s.n_r;
          if (s.grading != 0.0) os << ", grading=" << s.grading;
          os << ")";
        } else {
          os << "rect(a=" << s.a << ", b=" << s.b << ", n_x=" << s.n_x << ", n_y=" << s.n_y << ")";
        }
      },
      spec);
  return os.str();
}

namespace {

// Radial position of the mapped coordinate s in [0, 1]; the identity for
// grading 0, exponential clustering towards the axis otherwise.
double radial_map(double s, double grading) {
  if (grading == 0.0) return s;
  return std::expm1(grading * s) / std::expm1(grading);
}

void assemble_disk(const DiskRadial& s, Mesh::Impl& m) {
  const int n = s.n_r;
  const double two_pi = 2.0 * std::numbers::pi;
  const double mode_sq = static_cast<double>(s.mode) * s.mode;

  std::vector<double> face(static_cast<std::size_t>(n) + 1);
  std::vector<double> node(static_cast<std::size_t>(n));
  for (int j = 0; j <= n; ++j) face[j] = radial_map(static_cast<double>(j) / n, s.grading);
  face[n] = 1.0;
  for (int i = 0; i < n; ++i) node[i] = radial_map((i + 0.5) / n, s.grading);

  m.weights.resize(n);
  m.points.resize(n);
  m.spacing = 0.0;
  std::vector<Triplet> entries;
  entries.reserve(3 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double r = node[i];
    const double r_in = face[i];       // zero at the axis
    const double r_out = face[i + 1];
    m.weights[i] = std::numbers::pi * (r_out * r_out - r_in * r_in);
    m.points[i] = {r, 0.0};
    m.spacing = std::max(m.spacing, r_out - r_in);

    double diag = (i > 0) ? two_pi * r_in / (r - node[i - 1]) : 0.0;
    if (i + 1 < n) {
      const double c = two_pi * r_out / (node[i + 1] - r);
      diag += c;
      entries.emplace_back(i, i + 1, -c);
      entries.emplace_back(i + 1, i, -c);
    } else {
      // boundary face at r = 1
      diag += two_pi * r_out / (r_out - r);
    }
    diag += mode_sq / (r * r) * m.weights[i];
    entries.emplace_back(i, i, diag);
  }
  m.stiffness.resize(n, n);
  m.stiffness.setFromTriplets(entries.begin(), entries.end());
  m.area = std::numbers::pi;
  m.poisson = std::make_unique<SpdSolver>(m.stiffness, true);
}

void assemble_rectangle(const Rectangle& s, Mesh::Impl& m) {
  const int nx = s.n_x;
  const int ny = s.n_y;
  const double hx = s.a / nx;
  const double hy = s.b / ny;
  const double cx = hy / hx;  // coupling across an x-face
  const double cy = hx / hy;  // coupling across a y-face
  const Eigen::Index n = static_cast<Eigen::Index>(nx) * ny;
  auto index = [nx](int i, int j) { return static_cast<Eigen::Index>(j) * nx + i; };

  m.weights = Eigen::VectorXd::Constant(n, hx * hy);
  m.points.resize(static_cast<std::size_t>(n));
  std::vector<Triplet> entries;
  entries.reserve(5 * static_cast<std::size_t>(n));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Eigen::Index k = index(i, j);
      m.points[static_cast<std::size_t>(k)] = {(i + 0.5) * hx, (j + 0.5) * hy};
      double diag = 0.0;
      auto couple = [&](int ii, int jj, double c) {
        if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) {
          diag += 2.0 * c;  // boundary face
        } else {
          diag += c;
          entries.emplace_back(k, index(ii, jj), -c);
        }
      };
      couple(i - 1, j, cx);
      couple(i + 1, j, cx);
      couple(i, j - 1, cy);
      couple(i, j + 1, cy);
      entries.emplace_back(k, k, diag);
    }
  }
  m.stiffness.resize(n, n);
  m.stiffness.setFromTriplets(entries.begin(), entries.end());
  m.area = s.a * s.b;
  m.spacing = std::max(hx, hy);
  m.poisson = std::make_unique<SpdSolver>(m.stiffness, false);
}

}  // namespace

Mesh build_mesh(const MeshSpec& spec) {
  validate(spec);
  auto impl = std::make_shared<Mesh::Impl>();
  impl->spec = spec;
  std::visit(
      [&impl](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DiskRadial>) {
          assemble_disk(s, *impl);
        } else {
          assemble_rectangle(s, *impl);
        }
      },
      spec);
  return Mesh(std::move(impl));
}

const MeshSpec& Mesh::spec() const { return impl_->spec; }
Eigen::Index Mesh::size() const { return impl_->weights.size(); }
bool Mesh::is_disk() const { return std::holds_alternative<DiskRadial>(impl_->spec); }
int Mesh::mode() const { return is_disk() ? std::get<DiskRadial>(impl_->spec).mode : 0; }
bool Mesh::carries_mean() const { return mode() == 0; }
double Mesh::area() const { return impl_->area; }
double Mesh::spacing() const { return impl_->spacing; }
const Eigen::VectorXd& Mesh::weights() const { return impl_->weights; }
const Eigen::SparseMatrix<double>& Mesh::stiffness() const { return impl_->stiffness; }
Eigen::Vector2d Mesh::point(Eigen::Index i) const { return impl_->points[static_cast<std::size_t>(i)]; }
const SpdSolver& Mesh::poisson() const { return *impl_->poisson; }

double Mesh::radius(Eigen::Index i) const {
  const Eigen::Vector2d p = point(i);
  if (is_disk()) return p.x();
  const auto& r = std::get<Rectangle>(impl_->spec);
  return std::hypot(p.x() - 0.5 * r.a, p.y() - 0.5 * r.b);
}

Mesh Mesh::with_mode(int mode) const {
  if (!is_disk()) throw InvalidSpec("angular modes exist only for disk meshes");
  auto s = std::get<DiskRadial>(impl_->spec);
  if (s.mode == mode) return *this;
  s.mode = mode;
  return build_mesh(s);
}

bool Mesh::same_nodes(const Mesh& other) const {
  if (impl_ == other.impl_) return true;
  if (is_disk() != other.is_disk()) return false;
  if (is_disk()) {
    const auto& a = std::get<DiskRadial>(spec());
    const auto& b = std::get<DiskRadial>(other.spec());
    return a.n_r == b.n_r && a.grading == b.grading;
  }
  const auto& a = std::get<Rectangle>(spec());
  const auto& b = std::get<Rectangle>(other.spec());
  return a.a == b.a && a.b == b.b && a.n_x == b.n_x && a.n_y == b.n_y;
}

// ---------------------------------------------------------------------------
// Field

Field::Field(Mesh mesh) : mesh_(std::move(mesh)), values_(Eigen::VectorXd::Zero(mesh_.size())) {}

Field::Field(Mesh mesh, Eigen::VectorXd values) : mesh_(std::move(mesh)), values_(std::move(values)) {
  if (values_.size() != mesh_.size()) throw MeshMismatch("field length differs from mesh size");
}

Field Field::constant(const Mesh& mesh, double value) {
  return Field(mesh, Eigen::VectorXd::Constant(mesh.size(), value));
}

Field Field::sample(const Mesh& mesh, const std::function<double(double, double)>& f) {
  Eigen::VectorXd v(mesh.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const Eigen::Vector2d p = mesh.point(i);
    v[i] = f(p.x(), p.y());
  }
  return Field(mesh, std::move(v));
}

Field Field::on(const Mesh& other) const {
  if (!mesh_.same_nodes(other)) throw MeshMismatch("target mesh has a different node layout");
  return Field(other, values_);
}

Field& Field::operator+=(const Field& other) {
  require_same_mesh(*this, other);
  values_ += other.values_;
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_mesh(*this, other);
  values_ -= other.values_;
  return *this;
}

Field& Field::operator*=(double s) {
  values_ *= s;
  return *this;
}

Field operator*(const Field& lhs, const Field& rhs) {
  require_same_mesh(lhs, rhs);
  return Field(lhs.mesh(), lhs.values().cwiseProduct(rhs.values()));
}

void require_same_mesh(const Field& f, const Mesh& mesh) {
  if (!(f.mesh() == mesh)) throw MeshMismatch("field belongs to a different mesh");
}

void require_same_mesh(const Field& f, const Field& g) {
  if (!(f.mesh() == g.mesh())) throw MeshMismatch("fields belong to different meshes");
}

// ---------------------------------------------------------------------------
// Operators

Field apply_laplacian(const Mesh& mesh, const Field& f) {
  require_same_mesh(f, mesh);
  Eigen::VectorXd s = mesh.stiffness() * f.values();
  return Field(mesh, s.cwiseQuotient(mesh.weights()));
}

Field solve_dirichlet(const Mesh& mesh, const Field& rhs) {
  require_same_mesh(rhs, mesh);
  return Field(mesh, mesh.poisson().solve(Eigen::VectorXd(mesh.weights().cwiseProduct(rhs.values()))));
}

double integrate(const Mesh& mesh, const Field& f) {
  require_same_mesh(f, mesh);
  return mesh.weights().dot(f.values());
}

double inner(const Field& f, const Field& g) {
  require_same_mesh(f, g);
  return f.values().dot(f.mesh().weights().cwiseProduct(g.values()));
}

double norm(const Field& f) { return std::sqrt(inner(f, f)); }

// ---------------------------------------------------------------------------
// SpdSolver

struct SpdSolver::State {
  bool tridiagonal = false;
  // Cholesky-free elimination of a symmetric tridiagonal matrix: pivots d_i
  // and multipliers l_i of S = L D L^T.
  Eigen::VectorXd pivot;
  Eigen::VectorXd lower;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

SpdSolver::SpdSolver(const Eigen::SparseMatrix<double>& matrix, bool tridiagonal)
    : state_(std::make_unique<State>()) {
  state_->tridiagonal = tridiagonal;
  const Eigen::Index n = matrix.rows();
  if (tridiagonal) {
    state_->pivot.resize(n);
    state_->lower = Eigen::VectorXd::Zero(n);
    double prev_pivot = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double d = matrix.coeff(i, i);
      if (i > 0) {
        const double off = matrix.coeff(i, i - 1);
        state_->lower[i] = off / prev_pivot;
        d -= state_->lower[i] * off;
      }
      if (!(d > 0.0)) throw SolverBreakdown("non-positive pivot in tridiagonal elimination");
      state_->pivot[i] = d;
      prev_pivot = d;
    }
  } else {
    state_->ldlt.compute(matrix);
    if (state_->ldlt.info() != Eigen::Success) throw SolverBreakdown("sparse LDL^T factorization failed");
  }
}

SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& rhs) const {
  if (!state_->tridiagonal) return state_->ldlt.solve(rhs);
  const Eigen::Index n = rhs.size();
  const auto& l = state_->lower;
  const auto& d = state_->pivot;
  Eigen::VectorXd x = rhs;
  for (Eigen::Index i = 1; i < n; ++i) x[i] -= l[i] * x[i - 1];
  for (Eigen::Index i = 0; i < n; ++i) x[i] /= d[i];
  for (Eigen::Index i = n - 2; i >= 0; --i) x[i] -= l[i + 1] * x[i + 1];
  return x;
}

Eigen::MatrixXd SpdSolver::solve(const Eigen::MatrixXd& rhs) const {
  Eigen::MatrixXd out(rhs.rows(), rhs.cols());
  for (Eigen::Index c = 0; c < rhs.cols(); ++c) out.col(c) = solve(Eigen::VectorXd(rhs.col(c)));
  return out;
}

}  // namespace gelfand::grid
