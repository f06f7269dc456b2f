// SPDX-License-Identifier: Apache-2.0

#ifndef CVCAP_MONTECARLO_HPP
#define CVCAP_MONTECARLO_HPP

#include <cstdint>
#include <vector>

#include "cvcap/gaussian.hpp"
#include "cvcap/symplectic.hpp"

namespace cvcap {

/// Ensemble of displaced copies of one pure Gaussian state, with the
/// displacement drawn from a centered Gaussian.
class GaussianCoherentEnsemble {
 public:
  GaussianCoherentEnsemble(CovarianceMatrix coherent_covariance,
                           Matrix mean_covariance);

  const CovarianceMatrix& coherent_covariance() const { return coherent_; }
  const Matrix& mean_covariance() const { return mean_covariance_; }
  int dim() const { return coherent_.dim(); }

 private:
  CovarianceMatrix coherent_;
  Matrix mean_covariance_;
};

/// Finite mixture of Gaussian states. Weights must be positive and sum
/// to one within 1e-12.
class DiscreteEnsemble {
 public:
  struct Entry {
    double weight;
    GaussianState state;
  };

  explicit DiscreteEnsemble(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  int dim() const { return entries_.front().state.dim(); }

 private:
  std::vector<Entry> entries_;
};

/// Paired channel inputs and outcomes, in canonical (K = I) outcome
/// coordinates. Inputs are the state means; for discrete ensembles the
/// drawn component indices are kept alongside. Reproducible from the seed.
struct ChannelSamples {
  Matrix inputs;                   // n x 2s
  Matrix outputs;                  // n x 2s
  std::vector<int> input_indices;  // empty unless the ensemble is discrete
  std::uint64_t seed = 0;
};

/// Simulates the measurement channel on the ensemble: displacement
/// z ~ N(0, mean_covariance), outcome ~ N(z, coherent_covariance + beta),
/// independently per sample. Deterministic per seed.
ChannelSamples simulate_ensemble(const GaussianCoherentEnsemble& ensemble,
                                 const GaussianMeasurement& m,
                                 const SymplecticSpace& space, std::size_t n,
                                 std::uint64_t seed);

/// Discrete variant: component index drawn from the weights, outcome from
/// that state's outcome distribution.
ChannelSamples simulate_ensemble(const DiscreteEnsemble& ensemble,
                                 const GaussianMeasurement& m,
                                 const SymplecticSpace& space, std::size_t n,
                                 std::uint64_t seed);

/// Gaussian plug-in estimate of the mutual information in nats:
/// (1/2) log( det S_out / det S_noise ) from the fitted output covariance
/// and the fitted covariance of the residuals (output - input).
/// Requires n >= 2s + 2 samples.
double mi_plugin(const ChannelSamples& samples);

struct MiEstimate {
  double estimate;   // nats, full-sample estimator
  double std_error;  // nats, spread of block estimates
  int blocks;
};

/// Plug-in estimate with a standard error from block splitting.
MiEstimate mi_plugin_with_stderr(const ChannelSamples& samples, int blocks = 10);

/// Discrete mutual information between the component index and the binned
/// outcome, in nats. Outcomes are clipped to a per-axis box of the sample
/// mean plus/minus five standard deviations; empty bins contribute zero.
double mi_binned(const ChannelSamples& samples, int bins_per_axis);

MiEstimate mi_binned_with_stderr(const ChannelSamples& samples,
                                 int bins_per_axis, int blocks = 10);

struct EntropyDecomposition {
  double lhs;  // differential entropy of N(0, sigma)
  double rhs;  // -KL(p || p_H) + theta E_p[H_c] + log m
  double gap;  // |lhs - rhs|
};

/// Checks the exact entropy decomposition against the Gibbs density
/// p_H = m^{-1} exp(-theta H_c) for the quadratic form
/// H_c(z) = (1/2) z' hc_matrix z, with every term in closed form.
EntropyDecomposition entropy_decomposition_check(const Matrix& sigma,
                                                 const Matrix& hc_matrix,
                                                 double theta);

}  // namespace cvcap

#endif  // CVCAP_MONTECARLO_HPP
