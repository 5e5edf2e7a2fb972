#include <random>

#include <benchmark/benchmark.h>

#include "slowvary/problems/problem.hpp"
#include "slowvary/verify/spectral_pde.hpp"

using namespace slowvary::verify;

namespace {

std::vector<cplx> random_grid(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<cplx> v(n);
  for (auto& x : v) x = {d(rng), d(rng)};
  return v;
}

Backend backend(const benchmark::State& st) { return st.range(1) ? Backend::OpenMP : Backend::Serial; }

void BM_Rk4Combine(benchmark::State& st) {
  const auto& k = kernels(backend(st));
  const std::size_t n = st.range(0);
  auto y = random_grid(n, 1), k1 = random_grid(n, 2), k2 = random_grid(n, 3), k3 = random_grid(n, 4), k4 = random_grid(n, 5);
  for (auto _ : st) {
    k.rk4_combine(y, k1, k2, k3, k4, 1e-6);
    benchmark::DoNotOptimize(y.data());
  }
  st.SetItemsProcessed(st.iterations() * n);
}

void BM_Accumulate(benchmark::State& st) {
  const auto& k = kernels(backend(st));
  const std::size_t n = st.range(0);
  auto u = random_grid(n, 1), ux = random_grid(n, 2);
  Leaves leaves{u, ux};
  GridPoly poly{{{cplx(-2, 0), {{0, 1}, {1, 1}}}, {cplx(0.5, 0), {{0, 3}}}, {cplx(-0.5, 0), {{1, 2}}}}};
  std::vector<cplx> out(n);
  for (auto _ : st) {
    k.accumulate(poly, leaves, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * n);
}

void BM_L2Distance(benchmark::State& st) {
  const auto& k = kernels(backend(st));
  const std::size_t n = st.range(0);
  auto a = random_grid(n, 1), b = random_grid(n, 2);
  for (auto _ : st) benchmark::DoNotOptimize(k.l2_distance(a, b, 0.1));
  st.SetItemsProcessed(st.iterations() * n);
}

void BM_SimulateNonlinearHeatExchanger(benchmark::State& st) {
  auto he = slowvary::problems::builtin("heat-exchanger-nonlinear");
  SimConfig cfg;
  cfg.grid = static_cast<int>(st.range(0));
  cfg.tmax = 1;
  cfg.ic.seed = 1;
  cfg.backend = backend(st);
  for (auto _ : st) benchmark::DoNotOptimize(simulate_full(he, cfg));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (long n : {1 << 10, 1 << 14, 1 << 18})
    for (long omp : {0, 1}) b->Args({n, omp});
  b->ArgNames({"n", "omp"});
}

}  // namespace

BENCHMARK(BM_Rk4Combine)->Apply(sizes);
BENCHMARK(BM_Accumulate)->Apply(sizes);
BENCHMARK(BM_L2Distance)->Apply(sizes);
BENCHMARK(BM_SimulateNonlinearHeatExchanger)->ArgsProduct({{256, 1024}, {0, 1}})->ArgNames({"grid", "omp"});

BENCHMARK_MAIN();
