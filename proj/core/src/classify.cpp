#include "gelfand/diagnostics.hpp"

#include "gelfand/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gelfand::diag {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::FirstKindEvidence: return "FirstKindEvidence";
    case Verdict::SecondKindEvidence: return "SecondKindEvidence";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

grid::MeshSpec coarsened(const grid::MeshSpec& spec) {
  auto half = [](int n) { return std::max(16, n / 2); };
  if (const auto* d = std::get_if<grid::DiskRadial>(&spec)) return grid::DiskRadial{d->mode, half(d->n_r), d->grading};
  const auto& r = std::get<grid::Rectangle>(spec);
  return grid::Rectangle{r.a, r.b, half(r.n_x), half(r.n_y)};
}

double growth_exponent(const std::vector<BranchPoint>& points) {
  if (points.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double gap_last = mf::kCriticalLambda - points.back().lambda;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (const auto& p : points) {
    const double gap = mf::kCriticalLambda - p.lambda;
    if (p.lambda <= 0.0 || gap > 10.0 * gap_last) continue;
    const double x = -std::log(gap);
    sx += x;
    sy += p.E;
    sxx += x * x;
    sxy += x * p.E;
    ++count;
  }
  if (count < 3) return std::numeric_limits<double>::quiet_NaN();
  const double denom = count * sxx - sx * sx;
  if (!(denom > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return (count * sxy - sx * sy) / denom;
}

KindEvidence classify_domain(const grid::Mesh& mesh, const ClassifyConfig& cfg) {
  mf::ContinuationConfig cont = cfg.continuation;
  cont.lambda_start = 0.0;
  cont.lambda_end = mf::kCriticalLambda - 2.0 * cont.ceiling_guard;

  KindEvidence out;
  out.E_max = std::isfinite(cont.energy_cap) ? cont.energy_cap : cfg.emax_over_e0 * energy_zero(mesh);
  cont.energy_cap = out.E_max;

  for (const grid::Mesh& m : {mesh, grid::build_mesh(coarsened(mesh.spec()))}) {
    const mf::Branch b = mf::continue_branch(m, cont);
    ResolutionRun run;
    run.spec = m.spec();
    run.termination = b.termination;
    run.points = b.size();
    if (!b.points.empty()) {
      run.E_last = b.points.back().E;
      run.lambda_last = b.points.back().lambda;
    }
    run.growth_exponent = growth_exponent(b.points);
    out.runs.push_back(run);
  }

  const double unit = 1.0 / mf::kCriticalLambda;
  const auto& r = out.runs;
  const bool both_capped = std::all_of(r.begin(), r.end(), [](const ResolutionRun& x) {
    return x.termination == mf::Termination::EnergyCap;
  });
  const double s0 = r[0].growth_exponent;
  const double s1 = r[1].growth_exponent;
  const bool consistent = std::isfinite(s0) && std::isfinite(s1) && s0 > 0.0 && s1 > 0.0 &&
                          std::abs(s0 - s1) <= cfg.growth_agreement * std::max(s0, s1);
  const bool both_bounded = std::all_of(r.begin(), r.end(), [&](const ResolutionRun& x) {
    return x.termination == mf::Termination::ReachedEnd && x.E_last < out.E_max &&
           std::isfinite(x.growth_exponent) && x.growth_exponent < cfg.bounded_growth * unit;
  });

  if (both_capped && consistent)
    out.verdict = Verdict::FirstKindEvidence;
  else if (both_bounded)
    out.verdict = Verdict::SecondKindEvidence;
  else
    out.verdict = Verdict::Inconclusive;
  return out;
}

}  // namespace gelfand::diag
