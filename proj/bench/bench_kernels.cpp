#include <numeric>
#include <random>

#include <benchmark/benchmark.h>

#include "synthmet/kernels.hpp"

namespace {

using synthmet::RowMatrix;

RowMatrix random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  RowMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

template <auto Fn>
void BM_distances(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 24, 1);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(pts));
  state.SetComplexityN(state.range(0));
}

template <auto Fn>
void BM_closest(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 24, 2);
  const auto d = synthmet::serial::pairwise_sq_distances(pts);
  std::vector<char> active(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(d, active));
}

template <auto Fn>
void BM_gradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  synthmet::Network net(6, 16, 2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (double& p : net.params) p = u(rng);
  const auto x = random_points(n, 6, 4);
  const auto y = random_points(n, 2, 5);
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<double> grad(net.params.size());
  for (auto _ : state) benchmark::DoNotOptimize(Fn(net, x, y, rows, grad));
}

template <auto Fn>
void BM_psychro(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> t(0.0, 40.0), rh(1.0, 100.0);
  std::vector<double> tv(n), rv(n);
  for (std::size_t i = 0; i < n; ++i) tv[i] = t(rng), rv[i] = rh(rng);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(tv, rv, 101325.0));
}

}  // namespace

BENCHMARK(BM_distances<synthmet::serial::pairwise_sq_distances>)->Name("distances/serial")->Arg(365)->Arg(1460);
BENCHMARK(BM_distances<synthmet::parallel::pairwise_sq_distances>)->Name("distances/parallel")->Arg(365)->Arg(1460);
BENCHMARK(BM_closest<synthmet::serial::closest_active_pair>)->Name("closest/serial")->Arg(365)->Arg(1460);
BENCHMARK(BM_closest<synthmet::parallel::closest_active_pair>)->Name("closest/parallel")->Arg(365)->Arg(1460);
BENCHMARK(BM_gradient<synthmet::serial::mlp_gradient>)->Name("mlp_gradient/serial")->Arg(1024)->Arg(8760);
BENCHMARK(BM_gradient<synthmet::parallel::mlp_gradient>)->Name("mlp_gradient/parallel")->Arg(1024)->Arg(8760);
BENCHMARK(BM_psychro<synthmet::serial::psychro_columns>)->Name("psychro/serial")->Arg(8760)->Arg(87600);
BENCHMARK(BM_psychro<synthmet::parallel::psychro_columns>)->Name("psychro/parallel")->Arg(8760)->Arg(87600);

BENCHMARK_MAIN();
