// Serial reference kernels against their OpenMP counterparts. Both produce
// bitwise-identical results, so only the timings differ.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "greenlab/assembly.hpp"
#include "greenlab/sparse.hpp"

using namespace greenlab;

namespace {

BoxGrid bench_grid(const benchmark::State& state) {
  return build_grid(3, 1.0, static_cast<int>(state.range(0)));
}

std::vector<double> random_vector(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

void BM_AssembleSerial(benchmark::State& state) {
  const auto field = make_field(3, Family::scalar_trig);
  const BoxGrid g = bench_grid(state);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_serial(field, g));
}

void BM_AssembleParallel(benchmark::State& state) {
  const auto field = make_field(3, Family::scalar_trig);
  const BoxGrid g = bench_grid(state);
  for (auto _ : state) benchmark::DoNotOptimize(assemble(field, g));
}

void BM_MatvecSerial(benchmark::State& state) {
  const auto k = assemble(make_field(3, Family::scalar_trig), bench_grid(state));
  const auto x = random_vector(static_cast<std::size_t>(k.rows));
  std::vector<double> y(x.size());
  for (auto _ : state) {
    kernels::matvec_serial(k, x, y);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * k.nnz());
}

void BM_MatvecParallel(benchmark::State& state) {
  const auto k = assemble(make_field(3, Family::scalar_trig), bench_grid(state));
  const auto x = random_vector(static_cast<std::size_t>(k.rows));
  std::vector<double> y(x.size());
  for (auto _ : state) {
    kernels::matvec(k, x, y);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * k.nnz());
}

void BM_DotSerial(benchmark::State& state) {
  const auto a = random_vector(static_cast<std::size_t>(state.range(0))), b = random_vector(a.size());
  for (auto _ : state) benchmark::DoNotOptimize(kernels::dot_serial(a, b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DotParallel(benchmark::State& state) {
  const auto a = random_vector(static_cast<std::size_t>(state.range(0))), b = random_vector(a.size());
  for (auto _ : state) benchmark::DoNotOptimize(kernels::dot(a, b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_AssembleSerial)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleParallel)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MatvecSerial)->Arg(33)->Arg(65)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MatvecParallel)->Arg(33)->Arg(65)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DotSerial)->Arg(1 << 16)->Arg(1 << 22);
BENCHMARK(BM_DotParallel)->Arg(1 << 16)->Arg(1 << 22);

BENCHMARK_MAIN();
