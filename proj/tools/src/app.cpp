#include "commands.hpp"

#include "gelfand/cli.hpp"
#include "gelfand/errors.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace gelfand::cli {

namespace {

const std::set<std::string> kFlagKeys{"disk", "uniform"};

bool truthy(const std::string& v) { return v.empty() || v == "true" || v == "1" || v == "yes" || v == "on"; }

// Appends the config file entries that the command line does not already set.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::string path;
  std::set<std::string> given;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) continue;
    const std::string key = a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2);
    given.insert(key);
    if (key == "config") {
      if (a.find('=') != std::string::npos)
        path = a.substr(a.find('=') + 1);
      else if (i + 1 < args.size())
        path = args[i + 1];
    }
  }
  if (path.empty()) return args;

  std::vector<std::string> merged = args;
  for (const auto& [key, value] : read_config_file(path)) {
    if (given.count(key) || key == "config") continue;
    if (kFlagKeys.count(key)) {
      if (truthy(value)) merged.push_back("--" + key);
      continue;
    }
    merged.push_back("--" + key);
    std::istringstream words(value);
    for (std::string w; words >> w;) merged.push_back(w);
  }
  return merged;
}

struct Options {
  RunConfig cfg;
  std::vector<double> rect;
  std::string config;
};

void add_domain(CLI::App* sc, Options& o) {
  sc->add_flag("--disk", o.cfg.disk, "unit disk");
  sc->add_option("--rect", o.rect, "rectangle with sides a b")->expected(2);
  sc->add_option("--nr", o.cfg.nr, "radial cells on the disk")->check(CLI::PositiveNumber);
  sc->add_option("--n", o.cfg.n, "cells along the first rectangle side")->check(CLI::PositiveNumber);
  sc->add_option("--grading", o.cfg.grading, "radial grading exponent (0 = uniform)");
}

void add_branch_range(CLI::App* sc, Options& o) {
  sc->add_option("--lmin", o.cfg.lmin, "lowest lambda");
  sc->add_option("--lmax", o.cfg.lmax, "highest lambda, below 8 pi");
  sc->add_option("--emax", o.cfg.emax, "energy cap (default 5 E_0 on rectangles)");
}

void add_common(CLI::App* sc, Options& o) {
  sc->add_option("--step", o.cfg.step, "initial continuation step")->check(CLI::PositiveNumber);
  sc->add_option("--out", o.cfg.out, "output directory");
  sc->add_option("--format", o.cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sc->add_option("--precision", o.cfg.precision, "significant digits")->check(CLI::Range(1, 17));
  sc->add_option("--config", o.config, "key = value file; flags take precedence");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Mean field branches, spectra and identity checks"};
  app.name("gelfand");
  app.require_subcommand(1, 1);

  auto* branch = app.add_subcommand("branch", "continue the branch and write branch.csv, diagram.csv, plot.gp");
  add_domain(branch, o);
  add_branch_range(branch, o);
  add_common(branch, o);

  auto* verify = app.add_subcommand("verify", "branch plus the identity suite; writes report.json");
  add_domain(verify, o);
  add_branch_range(verify, o);
  add_common(verify, o);

  auto* spec = app.add_subcommand("spectrum", "constrained eigenvalues; writes spectrum.csv");
  add_domain(spec, o);
  add_common(spec, o);
  spec->add_option("--lambda", o.cfg.lambda, "branch parameter");
  spec->add_flag("--uniform", o.cfg.uniform, "rho = 1/|Omega|");
  spec->add_option("--k", o.cfg.k, "number of eigenvalues")->check(CLI::PositiveNumber);

  auto* classify = app.add_subcommand("classify", "first/second kind evidence; writes classify.csv");
  add_domain(classify, o);
  add_common(classify, o);
  classify->add_option("--emax", o.cfg.emax, "energy cap (default 5 E_0)");
  classify->add_option("--rect-sweep", o.cfg.rect_sweep, "aspect ratios a/b with b = 1")->delimiter(',');

  auto* orc = app.add_subcommand("oracle", "closed-form disk table; writes oracle.csv and appendix.csv");
  add_common(orc, o);
  orc->add_option("--alpha", o.cfg.alpha, "Liouville parameters")->delimiter(',');
  orc->add_option("--n-max", o.cfg.n_max, "highest Bessel order in appendix.csv")->check(CLI::PositiveNumber);
  orc->add_option("--m-max", o.cfg.m_max, "zeros per order in appendix.csv")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> merged = merge_config(args);
    std::reverse(merged.begin(), merged.end());
    app.parse(merged);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  if (o.rect.size() == 2) {
    o.cfg.rect = true;
    o.cfg.a = o.rect[0];
    o.cfg.b = o.rect[1];
  }

  using Command = int (*)(const RunConfig&, std::ostream&, std::ostream&);
  const std::pair<CLI::App*, Command> commands[] = {
      {branch, cmd_branch}, {verify, cmd_verify}, {spec, cmd_spectrum}, {classify, cmd_classify}, {orc, cmd_oracle}};

  try {
    for (const auto& [sc, cmd] : commands)
      if (sc->parsed()) return cmd(o.cfg, out, err);
  } catch (const LambdaOutOfRange& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidSpec& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kContinuationFailed;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace gelfand::cli
