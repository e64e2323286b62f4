#include <random>

#include <benchmark/benchmark.h>

#include "balnet/correlation.hpp"
#include "balnet/experiment.hpp"
#include "balnet/svn.hpp"
#include "balnet/synth.hpp"

namespace {

// Binarized bipolar market, N assets over T days.
balnet::BinaryPanel market(std::size_t n, std::size_t t) {
  balnet::SynthSpec spec;
  spec.n_assets = n;
  spec.n_days = t + 1;
  return balnet::binarize(balnet::log_returns(balnet::generate(spec)));
}

void BM_PhiMatrix(benchmark::State& state) {
  const auto b = market(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(balnet::phi_matrix(b));
}
BENCHMARK(BM_PhiMatrix)->Args({150, 100})->Args({150, 1000})->Args({500, 250});

void BM_BuildSvn(benchmark::State& state) {
  const auto b = market(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  const auto pol = state.range(2) ? balnet::Polarity::kNegative : balnet::Polarity::kPositive;
  for (auto _ : state) benchmark::DoNotOptimize(balnet::build_svn(b, 0.1, pol));
}
BENCHMARK(BM_BuildSvn)->Args({150, 100, 0})->Args({150, 100, 1})->Args({150, 1000, 0});

void BM_LinkPvalue(benchmark::State& state) {
  const auto T = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(balnet::link_pvalue(T / 3, T / 2, T / 2, T));
}
BENCHMARK(BM_LinkPvalue)->Arg(100)->Arg(2000);

void BM_BuildDataset(benchmark::State& state) {
  balnet::SynthSpec spec;
  spec.n_assets = 150;
  spec.n_days = 2 * static_cast<std::size_t>(state.range(0)) + 1;
  const auto r = balnet::log_returns(balnet::generate(spec));
  const auto T = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        balnet::build_dataset(r, balnet::WindowRef{T - 1, T}, balnet::WindowRef{2 * T - 1, T}, {}));
  }
}
BENCHMARK(BM_BuildDataset)->Arg(50)->Arg(155);

}  // namespace
