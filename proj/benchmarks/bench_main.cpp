#include "gelfand/diagnostics.hpp"
#include "gelfand/mfsolver.hpp"
#include "gelfand/spectrum.hpp"

#include <benchmark/benchmark.h>

using namespace gelfand;

namespace {

grid::Mesh disk(int n_r) { return grid::build_mesh(grid::DiskRadial{0, n_r}); }

void BM_NewtonDisk(benchmark::State& st) {
  const auto mesh = disk(static_cast<int>(st.range(0)));
  const auto seed = mf::state_at(mesh, 12.0);
  for (auto _ : st) benchmark::DoNotOptimize(mf::newton_solve(mesh, 12.5, seed.psi));
}
BENCHMARK(BM_NewtonDisk)->Arg(256)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_NewtonSquare(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const auto mesh = grid::build_mesh(grid::Rectangle{1.0, 1.0, n, n});
  const auto seed = mf::state_at(mesh, 12.0);
  for (auto _ : st) benchmark::DoNotOptimize(mf::newton_solve(mesh, 12.5, seed.psi));
}
BENCHMARK(BM_NewtonSquare)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SpectrumUniformDisk(benchmark::State& st) {
  const auto mesh = disk(static_cast<int>(st.range(0)));
  const grid::Field rho = grid::Field::constant(mesh, 1.0 / mesh.area());
  for (auto _ : st) benchmark::DoNotOptimize(spectrum::constrained_spectrum(mesh, rho, 0.0, 6));
}
BENCHMARK(BM_SpectrumUniformDisk)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_SpectrumSquare(benchmark::State& st) {
  const auto mesh = grid::build_mesh(grid::Rectangle{1.0, 1.0, 48, 48});
  const auto s = mf::state_at(mesh, 15.0);
  for (auto _ : st) benchmark::DoNotOptimize(spectrum::constrained_spectrum(mesh, s.rho, s.lambda, 3));
}
BENCHMARK(BM_SpectrumSquare)->Unit(benchmark::kMillisecond);

void BM_DiskBranch(benchmark::State& st) {
  const auto mesh = disk(static_cast<int>(st.range(0)));
  mf::ContinuationConfig cfg;
  cfg.lambda_start = -10.0;
  cfg.lambda_end = 25.0;
  for (auto _ : st) benchmark::DoNotOptimize(diag::compute_branch(mesh, cfg));
}
BENCHMARK(BM_DiskBranch)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
