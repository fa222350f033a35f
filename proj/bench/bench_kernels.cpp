// Serial reference vs OpenMP for each hot kernel, on identical inputs.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "zenolab/kernels.hpp"

using namespace zenolab;
using kernels::complex;

namespace {

std::vector<double> uniform(std::size_t n, double lo, double hi, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

std::vector<complex> noise(std::size_t n, unsigned seed) {
  const auto re = uniform(n, -1.0, 1.0, seed);
  const auto im = uniform(n, -1.0, 1.0, seed + 1);
  std::vector<complex> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = {re[i], im[i]};
  return z;
}

Backend backend_of(const benchmark::State& state) { return state.range(1) ? Backend::OpenMP : Backend::Serial; }

void label(benchmark::State& state) { state.SetLabel(state.range(1) ? "openmp" : "serial"); }

void BM_FieldStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> freq(n);
  for (std::size_t i = 0; i < n; ++i) freq[i] = -50.0 + 100.0 * static_cast<double>(i) / static_cast<double>(n - 1);
  const kernels::FieldCoefficients c{1.0, std::sqrt(8.0 / (2.0 * M_PI)), freq[1] - freq[0], freq};
  complex x = 1.0, y = 0.0;
  std::vector<complex> z(n), work;
  for (auto _ : state) {
    kernels::field_rk4_step(backend_of(state), c, x, y, z, 1e-3, work);
    benchmark::DoNotOptimize(z.data());
  }
  label(state);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ModeNorm(benchmark::State& state) {
  const auto z = noise(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::mode_norm2(backend_of(state), z, 1e-2));
  label(state);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FourierSum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto node = uniform(n, 0.0, 1.0, 5);
  const auto weight = uniform(n, 0.0, 1.0, 6);
  const auto times = uniform(512, 0.0, 1000.0, 7);
  std::vector<complex> out(times.size());
  for (auto _ : state) {
    kernels::fourier_sum(backend_of(state), node, weight, times, out);
    benchmark::DoNotOptimize(out.data());
  }
  label(state);
  state.SetItemsProcessed(state.iterations() * state.range(0) * 512);
}

void BM_MemoryConvolution(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto freq = uniform(n, -50.0, 50.0, 9);
  const auto y = noise(2001, 10);
  const auto w = uniform(2001, 0.0, 1.0, 11);
  std::vector<complex> out(n);
  for (auto _ : state) {
    kernels::memory_convolution(backend_of(state), freq, y, w, 1e-3, out);
    benchmark::DoNotOptimize(out.data());
  }
  label(state);
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2001);
}

void BM_SecularRoots(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> level(n), coupling(n, 0.1 / std::sqrt(static_cast<double>(n)));
  for (std::size_t i = 0; i < n; ++i) level[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  std::vector<double> root(n + 1), weight(n + 1);
  for (auto _ : state) {
    kernels::secular_roots(backend_of(state), 0.5, level, coupling, root, weight);
    benchmark::DoNotOptimize(root.data());
  }
  label(state);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_FieldStep)->ArgsProduct({{4096, 16384}, {0, 1}});
BENCHMARK(BM_ModeNorm)->ArgsProduct({{16384, 262144}, {0, 1}});
BENCHMARK(BM_FourierSum)->ArgsProduct({{1024, 8192}, {0, 1}});
BENCHMARK(BM_MemoryConvolution)->ArgsProduct({{512, 2048}, {0, 1}});
BENCHMARK(BM_SecularRoots)->ArgsProduct({{1000, 4000}, {0, 1}});

BENCHMARK_MAIN();
