#include <benchmark/benchmark.h>

#include <vector>

#include "qmm/formats.hpp"
#include "qmm/lattice.hpp"
#include "qmm/rng.hpp"
#include "qmm/rotate.hpp"
#include "qmm/sic.hpp"

namespace {

std::vector<double> gaussian_vec(std::size_t n, std::uint64_t seed) {
  qmm::Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.next_gaussian();
  return v;
}

void BM_HadamardRotate(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  qmm::Rng rng(1);
  auto v = gaussian_vec(n, 2);
  auto signs = qmm::random_signs(n, rng);
  for (auto _ : state) {
    auto r = qmm::hadamard_rotate(v, signs);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}
BENCHMARK(BM_HadamardRotate)->Arg(1024)->Arg(4096);

void BM_AbsmaxInt8(benchmark::State& state) {
  auto v = gaussian_vec(4096, 3);
  for (auto _ : state) {
    auto q = qmm::absmax_int_quantize(v, qmm::IntFormat{8});
    benchmark::DoNotOptimize(q);
  }
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_AbsmaxInt8);

void BM_E8Nearest(benchmark::State& state) {
  auto v = gaussian_vec(8, 4);
  for (auto _ : state) {
    auto p = qmm::nearest_e8(v);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_E8Nearest);

void BM_NestQuantChunked(benchmark::State& state) {
  auto v = gaussian_vec(4096, 5);
  for (auto _ : state) {
    auto r = qmm::nestquant(v, 16, 16);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_NestQuantChunked);

void BM_SicQuantize(benchmark::State& state) {
  std::size_t n = 64, a = 64;
  qmm::Rng rng(6);
  qmm::Matrix u(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    u(i, i) = 1.0 + rng.next_double();
    for (std::size_t j = i + 1; j < n; ++j) u(i, j) = 0.2 * rng.next_gaussian();
  }
  qmm::Matrix w(n, a);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < a; ++j) w(i, j) = rng.next_gaussian();
  auto spacings = qmm::watersic_spacings(u, 0.25);
  for (auto _ : state) {
    auto r = qmm::sic_quantize(w, u, spacings);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_SicQuantize);

}  // namespace
