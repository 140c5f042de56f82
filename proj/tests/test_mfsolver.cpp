#include "gelfand/errors.hpp"
#include "gelfand/mfsolver.hpp"
#include "gelfand/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace gelfand;
using grid::Field;

namespace {

constexpr double pi = std::numbers::pi;

const grid::Mesh& disk() {
  static const auto mesh = grid::build_mesh(grid::DiskRadial{0, 512});
  return mesh;
}

const grid::Mesh& square() {
  static const auto mesh = grid::build_mesh(grid::Rectangle{1.0, 1.0, 32, 32});
  return mesh;
}

double profile_error(const mf::MeanFieldState& s) {
  const auto rec = oracle::disk_closed_form(s.lambda);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < s.psi.size(); ++i)
    worst = std::max(worst, std::abs(s.lambda * s.psi[i] - rec.u(s.mesh().radius(i))));
  return worst / rec.u(0.0);
}

}  // namespace

TEST(MeanField, LambdaZeroIsScaledTorsion) {
  const auto s = mf::newton_solve(disk(), 0.0, Field::constant(disk(), 0.0));
  const Field h = grid::solve_dirichlet(disk(), Field::constant(disk(), 1.0 / pi));
  EXPECT_LT((s.psi - h).max_abs(), 1e-12);
  EXPECT_LE(s.residual_norm, 1e-10);
}

TEST(MeanField, DiskMatchesLiouville) {
  for (const double lambda : {-5.0, 4.0 * pi, 20.0}) {
    const auto s = mf::state_at(disk(), lambda);
    EXPECT_NEAR(s.lambda, lambda, 1e-14);
    EXPECT_LT(profile_error(s), 2e-4) << lambda;
    EXPECT_NEAR(s.mass_eu, oracle::disk_closed_form(lambda).mass_eu, 1e-4 * s.mass_eu) << lambda;
  }
}

TEST(MeanField, ResidualBelowTolerance) {
  const auto s = mf::state_at(square(), 15.0);
  EXPECT_LE(mf::relative_residual(square(), s.lambda, s.psi), 1e-10);
  EXPECT_NEAR(s.residual_norm, mf::relative_residual(square(), s.lambda, s.psi), 1e-14);
}

TEST(MeanField, RejectsLambdaAtCritical) {
  const Field zero = Field::constant(disk(), 0.0);
  EXPECT_THROW(mf::newton_solve(disk(), 8.0 * pi, zero), LambdaOutOfRange);
  EXPECT_THROW(mf::newton_solve(disk(), 30.0, zero), LambdaOutOfRange);
  EXPECT_THROW(mf::newton_solve(disk(), std::nan(""), zero), LambdaOutOfRange);
}

TEST(MeanField, NonConvergenceReported) {
  const Field zero = Field::constant(disk(), 0.0);
  try {
    mf::newton_solve(disk(), 24.0, zero, mf::NewtonOptions{1e-10, 2});
    FAIL() << "expected NonConvergence";
  } catch (const NonConvergence& e) {
    EXPECT_LE(e.iterations(), 2);
    EXPECT_GT(e.last_residual(), 1e-10);
  }
}

TEST(MeanField, DensityNeverOverflows) {
  const Field psi = Field::sample(disk(), [](double r, double) { return 1e3 * (1.0 - r); });
  const auto d = mf::density(disk(), 20.0, psi);
  EXPECT_TRUE(d.rho.all_finite());
  EXPECT_NEAR(grid::integrate(disk(), d.rho), 1.0, 1e-12);
  EXPECT_TRUE(std::isinf(d.mass_eu) || d.mass_eu > 1e300);
  EXPECT_GT(d.log_mass, 700.0);
}

TEST(MeanField, LinearizedOperatorRoundTrip) {
  const auto s = mf::state_at(square(), 10.0);
  const mf::LinearizedOperator op(s);
  const Field f = Field::sample(square(), [](double x, double y) { return x - y * y + 0.2; });
  EXPECT_LT((op.apply(op.solve(f)) - f).max_abs(), 1e-10 * f.max_abs());
}

TEST(MeanField, TangentMatchesFiniteDifference) {
  const double lambda = 10.0;
  const double h = 1e-4;
  const auto s = mf::state_at(disk(), lambda);
  const Field eta = mf::tangent(s);
  const auto sp = mf::newton_solve(disk(), lambda + h, s.psi + eta * h);
  const auto sm = mf::newton_solve(disk(), lambda - h, s.psi - eta * h);
  const Field fd = (sp.psi - sm.psi) * (0.5 / h);
  EXPECT_LT((fd - eta).max_abs(), 1e-6 * eta.max_abs());
}

// The branch is the unique solution for lambda < 8 pi on the disk: Newton
// started from scattered guesses lands on the same state.
TEST(MeanField, UniquenessProbe) {
  const double lambda = 10.0;
  const auto base = mf::state_at(disk(), lambda);
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> amp(0.5, 1.5);
  std::uniform_real_distribution<double> freq(0.5, 4.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double a = amp(rng), k = freq(rng);
    const Field guess =
        base.psi * a + Field::sample(disk(), [&](double r, double) { return 0.05 * (1.0 - r * r) * std::cos(k * r); });
    const auto s = mf::newton_solve(disk(), lambda, guess);
    EXPECT_LT((s.psi - base.psi).max_abs(), 1e-8 * base.psi.max_abs()) << trial;
  }
}

TEST(MeanField, SquareSolutionSymmetric) {
  const auto s = mf::state_at(square(), 18.0);
  const int n = 32;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double v = s.psi[j * n + i];
      EXPECT_NEAR(v, s.psi[i * n + j], 1e-10);
      EXPECT_NEAR(v, s.psi[j * n + (n - 1 - i)], 1e-10);
      EXPECT_NEAR(v, s.psi[(n - 1 - j) * n + i], 1e-10);
    }
  }
}

TEST(Continuation, AscendingAndCapped) {
  mf::ContinuationConfig cfg;
  cfg.lambda_start = -5.0;
  cfg.lambda_end = 8.0 * pi - 0.1;
  cfg.energy_cap = 0.06;
  const auto b = mf::continue_branch(disk(), cfg);
  ASSERT_GT(b.size(), 10u);
  EXPECT_EQ(b.termination, mf::Termination::EnergyCap);
  EXPECT_TRUE(b.complete());
  EXPECT_NEAR(b.points.front().lambda, -5.0, 1e-14);
  for (std::size_t i = 1; i < b.size(); ++i) {
    EXPECT_GT(b.points[i].lambda, b.points[i - 1].lambda);
    EXPECT_DOUBLE_EQ(b.points[i].lambda, b.states[i].lambda);
  }
  EXPECT_GE(b.points.back().E, 0.06);
  EXPECT_LT(b.points[b.size() - 2].E, 0.06);
}

TEST(Continuation, ReachesEnd) {
  mf::ContinuationConfig cfg;
  cfg.lambda_end = 20.0;
  const auto b = mf::continue_branch(square(), cfg);
  EXPECT_EQ(b.termination, mf::Termination::ReachedEnd);
  EXPECT_NEAR(b.points.back().lambda, 20.0, 1e-14);
  EXPECT_NO_THROW(b.require_complete());
}

TEST(Continuation, StepUnderflowKeepsPoints) {
  mf::ContinuationConfig cfg;
  cfg.lambda_end = 8.0 * pi - 0.01;
  const auto coarse = grid::build_mesh(grid::DiskRadial{0, 16});
  const auto b = mf::continue_branch(coarse, cfg);
  ASSERT_EQ(b.termination, mf::Termination::StepUnderflow);
  EXPECT_FALSE(b.points.empty());
  EXPECT_DOUBLE_EQ(b.last_good_lambda, b.points.back().lambda);
  EXPECT_THROW(b.require_complete(), StepUnderflow);
}

TEST(Continuation, ConfigValidation) {
  mf::ContinuationConfig cfg;
  cfg.lambda_end = 8.0 * pi;
  EXPECT_THROW(cfg.validate(), LambdaOutOfRange);
  cfg.lambda_end = 10.0;
  cfg.lambda_start = 11.0;
  EXPECT_THROW(cfg.validate(), InvalidSpec);
  cfg.lambda_start = 0.0;
  cfg.min_step = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidSpec);
  cfg.min_step = 1e-5;
  cfg.energy_cap = -1.0;
  EXPECT_THROW(cfg.validate(), InvalidSpec);
  EXPECT_THROW(mf::continue_branch(disk(), cfg), InvalidSpec);
}

TEST(Continuation, RejectsModeMeshes) {
  const auto m1 = grid::build_mesh(grid::DiskRadial{1, 32});
  EXPECT_THROW(mf::newton_solve(m1, 1.0, Field::constant(m1, 0.0)), InvalidSpec);
}
