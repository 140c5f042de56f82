#include "gelfand/diagnostics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace gelfand;

TEST(Classify, GrowthExponentOfSyntheticLaw) {
  std::vector<BranchPoint> pts;
  for (double gap = 5.0; gap > 1e-3; gap *= 0.8) {
    BranchPoint p;
    p.lambda = mf::kCriticalLambda - gap;
    p.E = 0.7 * -std::log(gap) + 0.1;
    pts.push_back(p);
  }
  EXPECT_NEAR(diag::growth_exponent(pts), 0.7, 1e-12);
  pts.resize(2);
  EXPECT_TRUE(std::isnan(diag::growth_exponent(pts)));
}

TEST(Classify, Coarsened) {
  const auto d = std::get<grid::DiskRadial>(diag::coarsened(grid::DiskRadial{0, 100, 3.0}));
  EXPECT_EQ(d.n_r, 50);
  EXPECT_EQ(d.grading, 3.0);
  const auto r = std::get<grid::Rectangle>(diag::coarsened(grid::Rectangle{0.5, 1.0, 20, 64}));
  EXPECT_EQ(r.n_x, 16);
  EXPECT_EQ(r.n_y, 32);
}

TEST(Classify, DiskIsFirstKind) {
  const auto ev = diag::classify_domain(grid::build_mesh(grid::DiskRadial{0, 512}));
  EXPECT_EQ(ev.verdict, diag::Verdict::FirstKindEvidence);
  ASSERT_EQ(ev.runs.size(), 2u);
  EXPECT_EQ(ev.base().termination, mf::Termination::EnergyCap);
  EXPECT_NEAR(ev.E_max, 5.0 / (16.0 * std::numbers::pi), 1e-4);
}

TEST(Classify, SquareIsFirstKind) {
  const auto ev = diag::classify_domain(grid::build_mesh(grid::Rectangle{1.0, 1.0, 40, 40}));
  EXPECT_EQ(ev.verdict, diag::Verdict::FirstKindEvidence);
}

TEST(Classify, ThinRectangleIsSecondKind) {
  const auto ev = diag::classify_domain(grid::build_mesh(grid::Rectangle{0.1, 1.0, 16, 48}));
  EXPECT_EQ(ev.verdict, diag::Verdict::SecondKindEvidence);
  EXPECT_LT(ev.base().E_last, ev.E_max);
}

TEST(Classify, VerdictNames) {
  EXPECT_EQ(diag::to_string(diag::Verdict::FirstKindEvidence), "FirstKindEvidence");
  EXPECT_EQ(diag::to_string(diag::Verdict::SecondKindEvidence), "SecondKindEvidence");
  EXPECT_EQ(diag::to_string(diag::Verdict::Inconclusive), "Inconclusive");
}
