#include <benchmark/benchmark.h>

#include <random>

#include "eulerlab/grid.hpp"
#include "eulerlab/kernels.hpp"
#include "eulerlab/mask.hpp"
#include "eulerlab/parallel.hpp"

using namespace eulerlab;

namespace {

ScalarField random_field(int n) {
  const Grid2 g = make_grid(0.0, 0.0, 1.0 / n, n, n);
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ScalarField f(g);
  for (double& v : f.values) v = dist(rng);
  return f;
}

VectorField2 random_vector(int n) {
  const ScalarField a = random_field(n);
  VectorField2 u(a.grid);
  for (std::size_t k = 0; k < a.values.size(); ++k) u[k] = {a[k], -a[k]};
  return u;
}

void BM_LaplacianSerial(benchmark::State& state) {
  const ScalarField f = random_field(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::laplacian(f));
}

void BM_LaplacianParallel(benchmark::State& state) {
  const ScalarField f = random_field(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(laplacian(f));
}

void BM_AdvectSerial(benchmark::State& state) {
  const VectorField2 u = random_vector(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::advect(u, u));
}

void BM_AdvectParallel(benchmark::State& state) {
  const VectorField2 u = random_vector(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(advect(u, u));
}

void BM_CurlSerial(benchmark::State& state) {
  const VectorField2 u = random_vector(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::curl(u));
}

void BM_CurlParallel(benchmark::State& state) {
  const VectorField2 u = random_vector(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(curl(u));
}

void BM_AnnulusMask(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  const Grid2 g = covering_grid(-2.3, 2.3, -2.3, 2.3, h);
  const ScalarField level = annulus_level(g, {0.0, 0.0}, 1.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(mask_from_level(level));
}

}  // namespace

BENCHMARK(BM_LaplacianSerial)->Arg(256)->Arg(512);
BENCHMARK(BM_LaplacianParallel)->Arg(256)->Arg(512);
BENCHMARK(BM_AdvectSerial)->Arg(256)->Arg(512);
BENCHMARK(BM_AdvectParallel)->Arg(256)->Arg(512);
BENCHMARK(BM_CurlSerial)->Arg(256)->Arg(512);
BENCHMARK(BM_CurlParallel)->Arg(256)->Arg(512);
BENCHMARK(BM_AnnulusMask)->Arg(32)->Arg(64);

int main(int argc, char** argv) {
  init_threads_from_env();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
