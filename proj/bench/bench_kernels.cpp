// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "fwbb/kernels.hpp"

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

void BM_MatmulSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_vector(n * n, 1), b = random_vector(n * n, 2);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    fwbb::kernels::serial::matmul(a, b, c, n);
    benchmark::DoNotOptimize(c.data());
  }
}

void BM_MatmulParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_vector(n * n, 1), b = random_vector(n * n, 2);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    fwbb::kernels::matmul(a, b, c, n);
    benchmark::DoNotOptimize(c.data());
  }
}

void BM_InformationSerial(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const std::size_t n = 32;
  const auto a = random_vector(m * n, 3), w = random_vector(m, 4);
  std::vector<double> x(n * n);
  for (auto _ : state) {
    fwbb::kernels::serial::information_matrix(a, w, m, n, x);
    benchmark::DoNotOptimize(x.data());
  }
}

void BM_InformationParallel(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const std::size_t n = 32;
  const auto a = random_vector(m * n, 3), w = random_vector(m, 4);
  std::vector<double> x(n * n);
  for (auto _ : state) {
    fwbb::kernels::information_matrix(a, w, m, n, x);
    benchmark::DoNotOptimize(x.data());
  }
}

std::vector<std::vector<double>> random_vertices(std::size_t count, std::size_t n) {
  std::vector<std::vector<double>> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(random_vector(n, static_cast<unsigned>(10 + k)));
  return out;
}

void BM_ScoresSerial(benchmark::State& state) {
  const auto verts = random_vertices(static_cast<std::size_t>(state.range(0)), 4096);
  const auto d = random_vector(4096, 5);
  std::vector<double> out(verts.size());
  for (auto _ : state) {
    fwbb::kernels::serial::vertex_scores(verts, d, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_ScoresParallel(benchmark::State& state) {
  const auto verts = random_vertices(static_cast<std::size_t>(state.range(0)), 4096);
  const auto d = random_vector(4096, 5);
  std::vector<double> out(verts.size());
  for (auto _ : state) {
    fwbb::kernels::vertex_scores(verts, d, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_MatmulSerial)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_MatmulParallel)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_InformationSerial)->Arg(64)->Arg(1024)->Arg(16384);
BENCHMARK(BM_InformationParallel)->Arg(64)->Arg(1024)->Arg(16384);
BENCHMARK(BM_ScoresSerial)->Arg(8)->Arg(64)->Arg(512);
BENCHMARK(BM_ScoresParallel)->Arg(8)->Arg(64)->Arg(512);

BENCHMARK_MAIN();
