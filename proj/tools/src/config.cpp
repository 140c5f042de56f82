#include "gelfand/cli.hpp"
#include "gelfand/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace gelfand::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

grid::MeshSpec mesh_spec(const RunConfig& cfg) {
  if (cfg.disk == cfg.rect) throw InvalidSpec("choose exactly one of --disk and --rect");
  if (cfg.disk) return grid::DiskRadial{0, cfg.nr, cfg.grading};
  if (!(cfg.a > 0.0) || !(cfg.b > 0.0)) throw InvalidSpec("rectangle sides must be positive");
  const int ny = std::max(1, static_cast<int>(std::lround(cfg.n * cfg.b / cfg.a)));
  return grid::Rectangle{cfg.a, cfg.b, cfg.n, ny};
}

std::string resolution(const grid::MeshSpec& spec) {
  if (const auto* d = std::get_if<grid::DiskRadial>(&spec)) return "n_r=" + std::to_string(d->n_r);
  const auto& r = std::get<grid::Rectangle>(spec);
  return std::to_string(r.n_x) + "x" + std::to_string(r.n_y);
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidSpec("cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidSpec(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty()) throw InvalidSpec(path + ":" + std::to_string(lineno) + ": empty key");
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

unsigned sweep_threads() {
  if (const char* env = std::getenv("GELFAND_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace gelfand::cli
