#pragma once

// Command-line front end. Every command is callable in-process through run(),
// which never calls exit() and reports through the returned exit code.

#include "gelfand/grid.hpp"
#include "gelfand/mfsolver.hpp"

#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace gelfand::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kUsage = 2,
  kContinuationFailed = 3,
};

struct RunConfig {
  bool disk = false;
  bool rect = false;
  double a = 1.0;
  double b = 1.0;
  int nr = 1024;
  int n = 64;
  double grading = 0.0;

  double lmin = -10.0;
  double lmax = mf::kCriticalLambda - 0.1;
  /// Absolute energy cap. NaN selects the default: 5 E_0 on rectangles,
  /// none on the disk.
  double emax = std::numeric_limits<double>::quiet_NaN();
  double step = 0.2;

  std::string out = ".";
  std::string format = "csv";
  int precision = 12;

  double lambda = 0.0;
  bool uniform = false;
  int k = 6;
  std::vector<double> rect_sweep;
  std::vector<double> alpha;
  int n_max = 3;
  int m_max = 3;
};

/// Rectangle cells are kept square: n cells along a, round(n b / a) along b.
grid::MeshSpec mesh_spec(const RunConfig& cfg);
std::string resolution(const grid::MeshSpec& spec);

/// `%.{p-1}e` with p significant digits, independent of the C locale.
/// Non-finite values print as nan, inf, -inf.
std::string format_real(double v, int precision);

/// key = value lines; '#' starts a comment. Throws InvalidSpec on a
/// malformed line or an unreadable file.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

/// Worker count for sweeps: GELFAND_THREADS if set to a positive integer,
/// otherwise the hardware concurrency (at least 1).
unsigned sweep_threads();

/// args excludes the program name: {"branch", "--disk", ...}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gelfand::cli
