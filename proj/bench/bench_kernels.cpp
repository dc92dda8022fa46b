// Serial reference vs OpenMP kernels on the two headline network shapes.
//
//   kacdp_bench --benchmark_filter=Gradient
//
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>

#include "kacdp/kernels.hpp"

namespace {

using kacdp::KanNetwork;
using kacdp::Labels;
using kacdp::Matrix;

struct Problem {
  KanNetwork net;
  Matrix x;
  Labels y;
};

// state.range(0): 0 = [10,1] grid 80, 1 = [10,4,1] grid 30; range(1): rows
Problem make_problem(const benchmark::State& state) {
  Problem p;
  p.net = state.range(0) == 0 ? kacdp::init_network({10, 1}, 80, 4, 42) : kacdp::init_network({10, 4, 1}, 30, 4, 42);
  const auto n = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  p.x = Matrix(n, 10);
  for (double& v : p.x.values) v = u(rng);
  p.y.resize(n);
  for (auto& v : p.y) v = u(rng) > 0.8 ? 1 : 0;
  return p;
}

void label(benchmark::State& state) {
  state.SetLabel(state.range(0) == 0 ? "[10,1] G80" : "[10,4,1] G30");
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

void BM_GradientSerial(benchmark::State& state) {
  const Problem p = make_problem(state);
  for (auto _ : state) benchmark::DoNotOptimize(kacdp::serial::loss_and_gradient(p.net, p.x, p.y));
  label(state);
}

void BM_GradientOmp(benchmark::State& state) {
  const Problem p = make_problem(state);
  for (auto _ : state) benchmark::DoNotOptimize(kacdp::omp::loss_and_gradient(p.net, p.x, p.y));
  label(state);
}

void BM_LogitsSerial(benchmark::State& state) {
  const Problem p = make_problem(state);
  for (auto _ : state) benchmark::DoNotOptimize(kacdp::serial::batch_logits(p.net, p.x));
  label(state);
}

void BM_LogitsOmp(benchmark::State& state) {
  const Problem p = make_problem(state);
  for (auto _ : state) benchmark::DoNotOptimize(kacdp::omp::batch_logits(p.net, p.x));
  label(state);
}

void BM_MomentsSerial(benchmark::State& state) {
  const Problem p = make_problem(state);
  for (auto _ : state) benchmark::DoNotOptimize(kacdp::serial::edge_moments(p.net, p.x));
  label(state);
}

void BM_MomentsOmp(benchmark::State& state) {
  const Problem p = make_problem(state);
  for (auto _ : state) benchmark::DoNotOptimize(kacdp::omp::edge_moments(p.net, p.x));
  label(state);
}

void shapes(benchmark::internal::Benchmark* b) {
  for (int net : {0, 1})
    for (int rows : {4096, 32768}) b->Args({net, rows});
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_GradientSerial)->Apply(shapes);
BENCHMARK(BM_GradientOmp)->Apply(shapes);
BENCHMARK(BM_LogitsSerial)->Apply(shapes);
BENCHMARK(BM_LogitsOmp)->Apply(shapes);
BENCHMARK(BM_MomentsSerial)->Apply(shapes);
BENCHMARK(BM_MomentsOmp)->Apply(shapes);

BENCHMARK_MAIN();
