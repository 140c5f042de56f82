#include "gelfand/diagnostics.hpp"
#include "gelfand/errors.hpp"
#include "gelfand/oracles.hpp"

#include "support/reference.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace gelfand;
using grid::Field;
using ref::pi;

namespace {

const grid::Mesh& disk() {
  static const auto mesh = grid::build_mesh(grid::DiskRadial{0, 1024});
  return mesh;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const mf::Branch& disk_branch() {
  static const mf::Branch b = [] {
    mf::ContinuationConfig cfg;
    cfg.lambda_start = -5.0;
    cfg.lambda_end = 22.0;
    return diag::compute_branch(grid::build_mesh(grid::DiskRadial{0, 512}), cfg);
  }();
  return b;
}

}  // namespace

TEST(Diagnostics, DiskAgainstClosedForms) {
  for (const double lambda : {-8.0, 2.0 * pi, 4.0 * pi, 6.0 * pi, 23.0}) {
    const auto s = mf::state_at(disk(), lambda);
    const auto p = diag::make_branch_point(s, {false, {}});
    const auto rec = oracle::disk_closed_form(lambda);
    EXPECT_LT(rel(p.E, rec.E), 1e-3) << lambda;
    EXPECT_LT(rel(p.mu, ref::mu_of_lambda(lambda)), 1e-3) << lambda;
    EXPECT_LT(rel(p.mean_z, rec.mean_z), 1e-3) << lambda;
    EXPECT_LT(std::abs(p.g - rec.g), 1e-3 * std::max(1.0, std::abs(rec.g))) << lambda;
  }
}

TEST(Diagnostics, EnergyFormsAgree) {
  const auto s = mf::state_at(grid::build_mesh(grid::Rectangle{1.0, 1.0, 32, 32}), 17.0);
  const auto f = diag::energy_forms(s);
  EXPECT_NEAR(f.gradient_form, f.mean_form, 1e-9 * f.mean_form);
  EXPECT_NEAR(f.green_form, f.mean_form, 1e-9 * f.mean_form);
  EXPECT_DOUBLE_EQ(diag::energy(s), f.mean_form);
}

TEST(Diagnostics, CorruptedStateRejected) {
  auto s = mf::state_at(disk(), 10.0);
  s.psi[10] += 1e-3;
  EXPECT_THROW(diag::energy(s), SolverBreakdown);
}

TEST(Diagnostics, EnergyZeroConverges) {
  const double e1 = diag::energy_zero(grid::build_mesh(grid::DiskRadial{0, 128}));
  const double e2 = diag::energy_zero(grid::build_mesh(grid::DiskRadial{0, 256}));
  const double exact = 1.0 / (16.0 * pi);
  EXPECT_NEAR(std::log2(std::abs(e1 - exact) / std::abs(e2 - exact)), 2.0, 0.1);
  EXPECT_THROW(diag::energy_zero(grid::build_mesh(grid::DiskRadial{1, 32})), InvalidSpec);
}

TEST(Diagnostics, ZAndWMatchFiniteDifferences) {
  const double lambda = 9.0;
  const double h = 1e-3;
  const auto s = mf::state_at(disk(), lambda);
  const Field z = diag::solve_z(s);
  const Field w = diag::solve_w(s, z);
  const Field eta = diag::solve_eta(s);
  auto at = [&](double l) { return mf::newton_solve(disk(), l, s.psi + eta * (l - lambda)); };
  const auto sp = at(lambda + h);
  const auto sm = at(lambda - h);
  const Field zfd = (sp.psi * sp.lambda - sm.psi * sm.lambda) * (0.5 / h);
  EXPECT_LT((zfd - z).max_abs(), 1e-5 * z.max_abs());
  const Field wfd = (diag::solve_z(sp) - diag::solve_z(sm)) * (0.5 / h);
  EXPECT_LT((wfd - w).max_abs(), 1e-4 * w.max_abs());
  EXPECT_LT((z - (s.psi + eta * lambda)).max_abs(), 1e-10 * z.max_abs());
}

TEST(Diagnostics, GOdeCoefficients) {
  const double lambda = 15.0;
  const double h = 1e-3;
  const auto s = mf::state_at(disk(), lambda);
  const auto c = diag::g_and_coeffs(s, diag::solve_z(s));
  const Field eta = diag::solve_eta(s);
  auto g_at = [&](double l) {
    const auto t = mf::newton_solve(disk(), l, s.psi + eta * (l - lambda));
    return diag::g_and_coeffs(t, diag::solve_z(t)).g;
  };
  const double slope = (g_at(lambda + h) - g_at(lambda - h)) / (2.0 * h);
  EXPECT_NEAR(slope, c.a * c.g + c.b, 1e-5 * std::abs(slope));
  EXPECT_NEAR(c.g, oracle::disk_closed_form(lambda).g, 1e-3);
}

TEST(Diagnostics, WMeanIdentity) {
  for (const double lambda : {2.0 * pi, 4.0 * pi, 6.0 * pi}) {
    const auto s = mf::state_at(disk(), lambda);
    const Field z = diag::solve_z(s);
    const Field w = diag::solve_w(s, z);
    const Field z0 = spectrum::centered(s.rho, z);
    const double lhs = grid::inner(s.rho, w);
    const double rhs = 2.0 * diag::rho_inner(s.rho, z0, z0) + lambda * diag::rho_inner(s.rho, z0 * z0, z0);
    EXPECT_NEAR(lhs, rhs, 1e-8 * std::abs(rhs)) << lambda;
  }
}

TEST(Diagnostics, FunctionalCriticalAndConvex) {
  const auto mesh = grid::build_mesh(grid::DiskRadial{0, 256});
  const Field v = Field::sample(mesh, [](double r, double) { return (1.0 - r * r) * (1.0 + r); });
  for (const double lambda : {-5.0, 10.0, 20.0}) {
    const auto s = mf::state_at(mesh, lambda);
    const Field u = s.psi * lambda;
    const double eps = 1e-4;
    const double jp = diag::functional_value(mesh, lambda, u + v * eps);
    const double jm = diag::functional_value(mesh, lambda, u - v * eps);
    const double j0 = diag::functional_value(mesh, lambda, u);
    EXPECT_NEAR((jp - jm) / (2.0 * eps), 0.0, 1e-6) << lambda;
    EXPECT_GT(jp + jm - 2.0 * j0, 0.0) << lambda;
  }
}

TEST(Diagnostics, VerifyDiskBranch) {
  const auto report = diag::verify_branch(disk_branch());
  for (const auto& c : report.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.residual << " " << c.note;
  EXPECT_TRUE(report.all_pass());
  ASSERT_NE(report.find("fourier_identity"), nullptr);
  EXPECT_EQ(report.find("no_such_check"), nullptr);
}

TEST(Diagnostics, VerifyDetectsCorruptedEnergy) {
  mf::Branch b = disk_branch();
  b.points[b.size() / 2].E *= 1.05;
  const auto report = diag::verify_branch(b);
  EXPECT_FALSE(report.all_pass());
  EXPECT_FALSE(report.find("dE_dlambda_vs_mean_eta")->pass);
  EXPECT_THROW(diag::mu_infty_diagram(b), NonMonotoneEnergy);
}

TEST(Diagnostics, VerifyNeedsFivePoints) {
  mf::Branch b = disk_branch();
  b.points.resize(4);
  b.states.erase(b.states.begin() + 4, b.states.end());
  EXPECT_THROW(diag::verify_branch(b), InvalidSpec);
}

TEST(Diagnostics, LambdaStarOnDisk) {
  const auto star = diag::find_lambda_star(disk_branch());
  EXPECT_NEAR(star.lambda, 4.0 * pi, 2e-3 * 4.0 * pi);
  EXPECT_NEAR(star.mu, 2.0, 2e-3);
  EXPECT_NEAR(star.E, (2.0 * std::log(2.0) - 1.0) / (4.0 * pi), 1e-4);
  EXPECT_TRUE(star.in_interval);
  EXPECT_LE(std::abs(star.g), 1e-6);
}

TEST(Diagnostics, NoSignChangeOnTruncatedBranch) {
  mf::Branch b = disk_branch();
  while (b.points.back().lambda > 10.0) {
    b.points.pop_back();
    b.states.pop_back();
  }
  EXPECT_THROW(diag::find_lambda_star(b), NoSignChange);
}

TEST(Diagnostics, DiagramShapeOnDisk) {
  const auto d = diag::mu_infty_diagram(disk_branch());
  const auto shape = diag::analyze_diagram(d, diag::energy_zero(disk_branch().states.front().mesh()));
  EXPECT_EQ(shape.interior_maxima, 1);
  EXPECT_TRUE(shape.increasing_before);
  EXPECT_TRUE(shape.decreasing_after);
  EXPECT_TRUE(shape.lambda_increasing);
  EXPECT_NEAR(shape.mu_at_E0, 0.0, 1e-6);
  EXPECT_NEAR(shape.mu_star, 2.0, 1e-2);
}

TEST(Diagnostics, AnalyzeSyntheticDiagram) {
  std::vector<diag::DiagramPoint> d;
  for (int i = 0; i <= 20; ++i) {
    const double e = 1.0 + 0.1 * i;
    d.push_back({e, 1.0 - (e - 2.0) * (e - 2.0), static_cast<double>(i)});
  }
  const auto shape = diag::analyze_diagram(d, 1.55);
  EXPECT_EQ(shape.interior_maxima, 1);
  EXPECT_EQ(shape.argmax, 10u);
  EXPECT_NEAR(shape.mu_at_E0, 1.0 - 0.45 * 0.45, 5e-3);
  d[3].mu += 1.0;
  EXPECT_EQ(diag::analyze_diagram(d, 1.55).interior_maxima, 2);
  EXPECT_TRUE(std::isnan(diag::analyze_diagram(d, 10.0).mu_at_E0));
}

TEST(Diagnostics, SpectralColumnsPositive) {
  for (const auto& p : disk_branch().points) {
    EXPECT_GT(p.sigma1, 0.0) << p.lambda;
    EXPECT_GT(p.lambda + p.sigma1, 0.0) << p.lambda;
    EXPECT_GT(p.mean_z, 0.0) << p.lambda;
  }
}
