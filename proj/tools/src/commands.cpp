#include "commands.hpp"

#include "output.hpp"

#include "gelfand/diagnostics.hpp"
#include "gelfand/errors.hpp"
#include "gelfand/oracles.hpp"
#include "gelfand/spectrum.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <ostream>
#include <thread>

namespace gelfand::cli {

namespace fs = std::filesystem;

namespace {

fs::path output_dir(const RunConfig& cfg) {
  fs::path dir(cfg.out);
  fs::create_directories(dir);
  return dir;
}

mf::ContinuationConfig continuation(const RunConfig& cfg, const grid::Mesh& mesh) {
  mf::ContinuationConfig c;
  c.lambda_start = cfg.lmin;
  c.lambda_end = cfg.lmax;
  c.initial_step = cfg.step;
  c.max_step = std::max(c.max_step, cfg.step);
  if (!std::isnan(cfg.emax))
    c.energy_cap = cfg.emax;
  else if (!mesh.is_disk())
    c.energy_cap = 5.0 * diag::energy_zero(mesh);
  c.validate();
  return c;
}

std::string incomplete_note(const mf::Branch& b) {
  if (b.complete()) return {};
  return "continuation stopped at lambda=" + format_real(b.last_good_lambda, 12);
}

Table branch_table(const mf::Branch& b) {
  Table t{{"lambda", "E", "mu", "g", "sigma1", "nu1", "mean_z", "min_z", "mass_eu", "newton_iters"}, {}};
  for (const BranchPoint& p : b.points)
    t.rows.push_back({p.lambda, p.E, p.mu, p.g, p.sigma1, p.nu1, p.mean_z, p.min_z, p.mass_eu,
                      static_cast<long long>(p.newton_iters)});
  return t;
}

Table diagram_table(const std::vector<diag::DiagramPoint>& d) {
  Table t{{"E", "mu", "lambda"}, {}};
  for (const auto& p : d) t.rows.push_back({p.E, p.mu, p.lambda});
  return t;
}

const char* kPlotScript = R"(# gnuplot script for branch.csv and diagram.csv
set datafile separator ','
set key off
set grid
set terminal pngcairo size 1200,500
set output 'branch.png'
set multiplot layout 1,2
set title 'mu against E'
set xlabel 'E'
set ylabel 'mu'
plot 'diagram.csv' using 1:2 skip 1 with linespoints pt 7 ps 0.4
set title 'mu against lambda'
set xlabel 'lambda'
set ylabel 'mu'
plot 'branch.csv' using 1:3 skip 1 with linespoints pt 7 ps 0.4
unset multiplot
)";

// Writes branch and diagram files. Returns false when the energy is not
// increasing and no diagram could be formed.
bool write_branch_files(const fs::path& dir, const RunConfig& cfg, const mf::Branch& b, std::ostream& err) {
  const std::string note = incomplete_note(b);
  write_table(dir, "branch", branch_table(b), cfg.format, cfg.precision, note);
  bool ok = true;
  try {
    write_table(dir, "diagram", diagram_table(diag::mu_infty_diagram(b)), cfg.format, cfg.precision, note);
  } catch (const NonMonotoneEnergy& e) {
    err << "error: " << e.what() << "\n";
    ok = false;
  }
  if (cfg.format == "csv") write_text(dir / "plot.gp", kPlotScript);
  return ok;
}

nlohmann::ordered_json check_json(const diag::Check& c, int precision) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["pass"] = c.pass;
  j["residual"] = json_number(c.residual, precision);
  j["tolerance"] = json_number(c.tolerance, precision);
  if (std::isfinite(c.lambda_at)) j["lambda_at"] = json_number(c.lambda_at, precision);
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

diag::Check flag_check(std::string name, bool pass, std::string note = {}) {
  diag::Check c;
  c.name = std::move(name);
  c.pass = pass;
  c.note = std::move(note);
  return c;
}

}  // namespace

int cmd_branch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const grid::MeshSpec spec = mesh_spec(cfg);
  const grid::Mesh mesh = grid::build_mesh(spec);
  const mf::ContinuationConfig cont = continuation(cfg, mesh);
  const fs::path dir = output_dir(cfg);

  const mf::Branch b = diag::compute_branch(mesh, cont);
  const bool diagram_ok = write_branch_files(dir, cfg, b, err);
  out << grid::describe(spec) << ": " << b.size() << " points, lambda in [" << format_real(b.points.front().lambda, 6)
      << ", " << format_real(b.points.back().lambda, 6) << "], termination " << mf::to_string(b.termination) << "\n";
  if (!b.complete()) {
    err << "error: continuation failed after lambda = " << format_real(b.last_good_lambda, 12) << "\n";
    return kContinuationFailed;
  }
  return diagram_ok ? kOk : kContinuationFailed;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const grid::MeshSpec spec = mesh_spec(cfg);
  const grid::Mesh mesh = grid::build_mesh(spec);
  const mf::ContinuationConfig cont = continuation(cfg, mesh);
  const fs::path dir = output_dir(cfg);

  const mf::Branch b = diag::compute_branch(mesh, cont);
  write_branch_files(dir, cfg, b, err);

  diag::VerificationReport report = diag::verify_branch(b);
  report.checks.insert(report.checks.begin(),
                       flag_check("continuation_complete", b.complete(), mf::to_string(b.termination)));

  const double nan = std::numeric_limits<double>::quiet_NaN();
  diag::LambdaStar star{nan, nan, nan, nan, false};
  try {
    star = diag::find_lambda_star(b);
    report.checks.push_back(flag_check("lambda_star_in_interval", star.in_interval, "4 pi <= lambda_* < 8 pi"));
  } catch (const NoSignChange& e) {
    report.checks.push_back(flag_check("lambda_star_in_interval", false, e.what()));
  }

  const std::string trend = "trend over the computed range";
  try {
    const auto d = diag::mu_infty_diagram(b);
    const auto shape = diag::analyze_diagram(d, diag::energy_zero(mesh));
    report.checks.push_back(flag_check("diagram_one_interior_maximum", shape.interior_maxima == 1,
                                       std::to_string(shape.interior_maxima) + " interior maxima"));
    diag::Check at_e0 = flag_check("diagram_mu_at_E0", false);
    at_e0.residual = std::abs(shape.mu_at_E0);
    at_e0.tolerance = 1e-6 * std::max(1.0, shape.mu_star);
    at_e0.pass = at_e0.residual <= at_e0.tolerance;
    report.checks.push_back(at_e0);
    report.checks.push_back(flag_check("diagram_mu_decreasing_tail", shape.decreasing_after, trend));
    report.checks.push_back(flag_check("diagram_mu_increasing_head", shape.increasing_before, trend));
    report.checks.push_back(flag_check("diagram_lambda_increasing", shape.lambda_increasing));
  } catch (const NonMonotoneEnergy& e) {
    report.checks.push_back(flag_check("diagram_energy_increasing", false, e.what()));
  }

  nlohmann::ordered_json doc;
  auto checks = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) checks.push_back(check_json(c, cfg.precision));
  doc["checks"] = std::move(checks);
  doc["lambda_star"] = json_number(star.lambda, cfg.precision);
  doc["E_star"] = json_number(star.E, cfg.precision);
  doc["mu_star"] = json_number(star.mu, cfg.precision);
  doc["domain"] = grid::describe(spec);
  doc["resolution"] = resolution(spec);
  doc["lambda_range"] = {json_number(b.points.front().lambda, cfg.precision),
                         json_number(b.points.back().lambda, cfg.precision)};
  doc["points"] = b.size();
  doc["termination"] = mf::to_string(b.termination);
  doc["all_pass"] = report.all_pass();
  write_text(dir / "report.json", doc.dump(2) + "\n");

  for (const auto& c : report.checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name;
    if (c.tolerance > 0.0) out << " residual=" << format_real(c.residual, 4) << " tol=" << format_real(c.tolerance, 2);
    out << "\n";
  }
  out << "lambda_*=" << format_real(star.lambda, cfg.precision) << " E_*=" << format_real(star.E, cfg.precision)
      << " mu_*=" << format_real(star.mu, cfg.precision) << "\n";
  return report.all_pass() ? kOk : kCheckFailed;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const grid::MeshSpec spec = mesh_spec(cfg);
  const grid::Mesh mesh = grid::build_mesh(spec);
  if (!(cfg.lambda < mf::kCriticalLambda)) throw LambdaOutOfRange(cfg.lambda);
  if (cfg.k < 1) throw InvalidSpec("--k must be at least 1");
  const fs::path dir = output_dir(cfg);

  grid::Field rho = grid::Field::constant(mesh, 1.0 / mesh.area());
  if (!cfg.uniform) {
    mf::ContinuationConfig cont;
    cont.initial_step = cfg.step;
    rho = mf::state_at(mesh, cfg.lambda, cont).rho;
  }
  const spectrum::SpectrumResult res = spectrum::constrained_spectrum(mesh, rho, cfg.lambda, cfg.k);

  const bool bessel = cfg.uniform && mesh.is_disk() && cfg.lambda == 0.0;
  Table t{{"index", "sigma", "mode", "multiplicity", "residual"}, {}};
  if (bessel) t.columns.push_back("bessel_sigma");
  // Mode 0 carries the radial members of the n = 1 triples; mode n >= 1
  // appears twice per zero.
  std::map<int, int> seen;
  for (std::size_t i = 0; i < res.size(); ++i) {
    std::vector<Cell> row{static_cast<long long>(i + 1), res.sigmas[i], static_cast<long long>(res.modes[i]),
                          static_cast<long long>(res.multiplicities[i]), res.residuals[i]};
    if (bessel) {
      const int mode = res.modes[i];
      const int count = seen[mode]++;
      const int m = mode == 0 ? count + 1 : count / 2 + 1;
      const double zero = spectrum::bessel_zero(mode == 0 ? 1 : mode, m);
      row.emplace_back(mesh.area() * zero * zero);
    }
    t.rows.push_back(std::move(row));
  }
  write_table(dir, "spectrum", t, cfg.format, cfg.precision);
  out << grid::describe(spec) << ", lambda=" << format_real(cfg.lambda, 6) << (cfg.uniform ? ", uniform rho" : "")
      << "\n";
  for (std::size_t i = 0; i < res.size(); ++i)
    out << "  sigma_" << i + 1 << " = " << format_real(res.sigmas[i], cfg.precision) << "  mode " << res.modes[i]
        << "  multiplicity " << res.multiplicities[i] << "\n";
  return kOk;
}

int cmd_classify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  struct Job {
    double ratio;
    grid::MeshSpec spec;
  };
  std::vector<Job> jobs;
  if (!cfg.rect_sweep.empty()) {
    for (const double r : cfg.rect_sweep) {
      if (!(r > 0.0)) throw InvalidSpec("--rect-sweep ratios must be positive");
      const int nx = std::max(16, static_cast<int>(std::lround(cfg.n * r)));
      jobs.push_back({r, grid::Rectangle{r, 1.0, nx, cfg.n}});
    }
    std::sort(jobs.begin(), jobs.end(), [](const Job& x, const Job& y) { return x.ratio < y.ratio; });
  } else {
    const grid::MeshSpec spec = mesh_spec(cfg);
    jobs.push_back({cfg.disk ? 1.0 : cfg.a / cfg.b, spec});
  }
  for (const auto& j : jobs) grid::validate(j.spec);
  const fs::path dir = output_dir(cfg);

  diag::ClassifyConfig cc;
  cc.continuation.initial_step = cfg.step;
  if (!std::isnan(cfg.emax)) cc.continuation.energy_cap = cfg.emax;

  std::vector<diag::KindEvidence> results(jobs.size());
  std::vector<std::string> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = diag::classify_domain(grid::build_mesh(jobs[i].spec), cc);
      } catch (const Error& e) {
        failures[i] = e.what();
      }
    }
  };
  const unsigned workers = std::min<unsigned>(sweep_threads(), static_cast<unsigned>(jobs.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }

  Table t{{"ratio", "verdict", "E_last", "lambda_last", "growth_exponent"}, {}};
  int code = kOk;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!failures[i].empty()) {
      err << "error: " << grid::describe(jobs[i].spec) << ": " << failures[i] << "\n";
      code = kContinuationFailed;
      continue;
    }
    const auto& base = results[i].base();
    t.rows.push_back({jobs[i].ratio, diag::to_string(results[i].verdict), base.E_last, base.lambda_last,
                      base.growth_exponent});
    out << grid::describe(jobs[i].spec) << ": " << diag::to_string(results[i].verdict) << "\n";
  }
  for (std::size_t i = 0; i + 1 < jobs.size(); ++i) {
    if (failures[i].empty() && failures[i + 1].empty() && results[i].verdict != results[i + 1].verdict)
      out << "transition between ratio " << format_real(jobs[i].ratio, 6) << " and "
          << format_real(jobs[i + 1].ratio, 6) << "\n";
  }
  write_table(dir, "classify", t, cfg.format, cfg.precision, code == kOk ? "" : "some domains failed");
  return code;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const fs::path dir = output_dir(cfg);
  std::vector<double> alphas = cfg.alpha;
  if (alphas.empty()) alphas = {0.25, 0.5, 1.0, 2.0, 3.0, 4.0};

  Table t{{"alpha", "lambda", "mu", "mass_eu", "E", "g", "mean_z"}, {}};
  for (const double a : alphas) {
    const auto r = oracle::liouville_closed_form(a);
    t.rows.push_back({r.alpha, r.lambda, r.mu, r.mass_eu, r.E, r.g, r.mean_z});
  }
  write_table(dir, "oracle", t, cfg.format, cfg.precision);

  Table app{{"n", "m", "zero", "sigma", "multiplicity", "eigenfunctions"}, {}};
  for (const auto& e : oracle::appendix_eigenpairs(cfg.n_max, cfg.m_max))
    app.rows.push_back({static_cast<long long>(e.n), static_cast<long long>(e.m), e.zero, e.sigma,
                        static_cast<long long>(e.multiplicity), e.eigenfunctions});
  write_table(dir, "appendix", app, cfg.format, cfg.precision);

  out << "E_0(unit disk) = " << format_real(oracle::disk_e0(), cfg.precision) << "\n";
  return kOk;
}

}  // namespace gelfand::cli
