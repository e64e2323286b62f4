#include <random>

#include <benchmark/benchmark.h>

#include "balnet/balance.hpp"

namespace {

balnet::SignedMatrix random_signed(Eigen::Index n) {
  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.5);
  balnet::SignedMatrix s;
  s.assets.resize(static_cast<std::size_t>(n));
  s.values = Eigen::MatrixXi::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) s.values(i, j) = s.values(j, i) = coin(rng) ? 1 : -1;
  return s;
}

void BM_Hamiltonian(benchmark::State& state) {
  const auto s = random_signed(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(balnet::hamiltonian(s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Hamiltonian)->RangeMultiplier(2)->Range(32, 512)->Complexity(benchmark::oNCubed);

void BM_DeltaMatrix(benchmark::State& state) {
  const auto s = random_signed(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(balnet::delta_matrix(s));
}
BENCHMARK(BM_DeltaMatrix)->RangeMultiplier(2)->Range(32, 512);

void BM_SpectralDiag(benchmark::State& state) {
  const auto n = state.range(0);
  balnet::CorrMatrix c;
  c.assets.resize(static_cast<std::size_t>(n));
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(2 * n, n);
  c.values = x.transpose() * x;
  const Eigen::VectorXd d = c.values.diagonal().cwiseSqrt().cwiseInverse();
  c.values = d.asDiagonal() * c.values * d.asDiagonal();
  for (auto _ : state) benchmark::DoNotOptimize(balnet::spectral_diag(c));
}
BENCHMARK(BM_SpectralDiag)->Arg(150)->Arg(400);

}  // namespace
