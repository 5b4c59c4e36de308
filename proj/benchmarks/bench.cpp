#include <benchmark/benchmark.h>

#include <random>

#include "lgeo/covariance.hpp"
#include "lgeo/marchenko_pastur.hpp"
#include "lgeo/observables.hpp"

namespace {

lgeo::ActivationMatrix gaussian(std::size_t T, std::size_t d) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  lgeo::ActivationMatrix X{lgeo::Matrix(T, d), 0, "bench"};
  for (auto& v : X.data.reshaped()) v = g(rng);
  return X;
}

void BM_Covariance(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto X = gaussian(4 * d, d);
  for (auto _ : state) benchmark::DoNotOptimize(lgeo::estimate_covariance(X));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Covariance)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_Eigendecompose(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto C = lgeo::estimate_covariance(gaussian(4 * d, d));
  for (auto _ : state) benchmark::DoNotOptimize(lgeo::eigendecompose(C));
}
BENCHMARK(BM_Eigendecompose)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

// T << d: the Gram path against the full covariance path.
void BM_GramSpectrum(benchmark::State& state) {
  const auto X = gaussian(static_cast<std::size_t>(state.range(0)), 2048);
  for (auto _ : state) benchmark::DoNotOptimize(lgeo::gram_spectrum(X));
}
BENCHMARK(BM_GramSpectrum)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_CovarianceSpectrumOff(benchmark::State& state) {
  const auto X = gaussian(static_cast<std::size_t>(state.range(0)), 2048);
  for (auto _ : state) benchmark::DoNotOptimize(lgeo::covariance_spectrum(X, lgeo::GramMode::Off));
}
BENCHMARK(BM_CovarianceSpectrumOff)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Omega(benchmark::State& state) {
  const auto X = gaussian(1, static_cast<std::size_t>(state.range(0)));
  const std::vector<double> h(X.data.data(), X.data.data() + X.data.size());
  for (auto _ : state) benchmark::DoNotOptimize(lgeo::omega(h));
}
BENCHMARK(BM_Omega)->Arg(4096);

void BM_MPCdf(benchmark::State& state) {
  const lgeo::rmt::MPModel m(1.0, 0.25);
  double x = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lgeo::rmt::mp_cdf(x, m));
    x = x < 2.2 ? x + 0.01 : 0.3;
  }
}
BENCHMARK(BM_MPCdf);

}  // namespace

BENCHMARK_MAIN();
