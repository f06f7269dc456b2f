// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "cvcap/capacity.hpp"
#include "cvcap/montecarlo.hpp"

using namespace cvcap;

namespace {

Matrix random_valid(const SymplecticSpace& space, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.25);
  const int dim = space.dim();
  Matrix q(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j <= i; ++j) q(j, i) = q(i, j) = normal(rng);
  // exp(Delta q) is symplectic; conjugating a thermal diagonal keeps the
  // matrix a valid covariance.
  Matrix generator = space.form() * q;
  Matrix s_mat = Matrix::Identity(dim, dim);
  Matrix term = Matrix::Identity(dim, dim);
  for (int k = 1; k <= 16; ++k) {
    term = term * generator / k;
    s_mat += term;
  }
  return s_mat * (1.2 * Matrix::Identity(dim, dim)) * s_mat.transpose();
}

void BM_SymplecticBasis(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const SymplecticSpace space(s);
  const CovarianceMatrix alpha(random_valid(space, 7));
  for (auto _ : state) {
    benchmark::DoNotOptimize(symplectic_basis(alpha, space));
  }
}
BENCHMARK(BM_SymplecticBasis)->DenseRange(1, 5);

void BM_ComplexStructure(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const SymplecticSpace space(s);
  const CovarianceMatrix beta(random_valid(space, 11));
  for (auto _ : state) {
    benchmark::DoNotOptimize(complex_structure(beta, space));
  }
}
BENCHMARK(BM_ComplexStructure)->DenseRange(1, 5);

void BM_CapacityClosedForm(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const SymplecticSpace space(s);
  const int dim = space.dim();
  const Matrix beta = random_valid(space, 13);
  const GaussianMeasurement m(Matrix::Identity(dim, dim), CovarianceMatrix(beta));
  const EnergyConstraint constraint(0.5 * Matrix::Identity(dim, dim),
                                    10.0 * dim);
  for (auto _ : state) {
    benchmark::DoNotOptimize(capacity(constraint, m, space));
  }
}
BENCHMARK(BM_CapacityClosedForm)->DenseRange(1, 4);

void BM_CapacityBarrierFallback(benchmark::State& state) {
  const SymplecticSpace space(1);
  Matrix beta = Matrix::Zero(2, 2);
  beta(0, 0) = 1.0;
  beta(1, 1) = 0.25;
  const GaussianMeasurement m(Matrix::Identity(2, 2), CovarianceMatrix(beta));
  const EnergyConstraint constraint(0.5 * Matrix::Identity(2, 2), 0.55);
  for (auto _ : state) {
    benchmark::DoNotOptimize(capacity(constraint, m, space));
  }
}
BENCHMARK(BM_CapacityBarrierFallback);

void BM_SimulateEnsemble(benchmark::State& state) {
  const SymplecticSpace space(1);
  const GaussianMeasurement m(Matrix::Identity(2, 2),
                              CovarianceMatrix(0.5 * Matrix::Identity(2, 2)));
  const GaussianCoherentEnsemble ensemble(
      CovarianceMatrix(0.5 * Matrix::Identity(2, 2)), Matrix::Identity(2, 2));
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_ensemble(ensemble, m, space, n, 5));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SimulateEnsemble)->RangeMultiplier(10)->Range(1000, 100000);

void BM_MiPlugin(benchmark::State& state) {
  const SymplecticSpace space(1);
  const GaussianMeasurement m(Matrix::Identity(2, 2),
                              CovarianceMatrix(0.5 * Matrix::Identity(2, 2)));
  const GaussianCoherentEnsemble ensemble(
      CovarianceMatrix(0.5 * Matrix::Identity(2, 2)), Matrix::Identity(2, 2));
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const ChannelSamples samples = simulate_ensemble(ensemble, m, space, n, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mi_plugin(samples));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_MiPlugin)->RangeMultiplier(10)->Range(1000, 100000);

}  // namespace

BENCHMARK_MAIN();
