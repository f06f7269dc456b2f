// SPDX-License-Identifier: Apache-2.0

#ifndef CVCAP_GAUSSIAN_HPP
#define CVCAP_GAUSSIAN_HPP

#include <cstdint>

#include "cvcap/symplectic.hpp"

namespace cvcap {

/// Gaussian state given by its first moments and covariance matrix.
/// The constructor rejects covariances violating the uncertainty relation.
class GaussianState {
 public:
  GaussianState(Vector mean, CovarianceMatrix covariance);

  const Vector& mean() const { return mean_; }
  const CovarianceMatrix& covariance() const { return covariance_; }
  int dim() const { return covariance_.dim(); }

 private:
  Vector mean_;
  CovarianceMatrix covariance_;
};

/// Gaussian observable described by an invertible outcome-relabeling
/// matrix K and the quantum noise covariance beta.
class GaussianMeasurement {
 public:
  GaussianMeasurement(Matrix k_matrix, CovarianceMatrix beta);

  const Matrix& k_matrix() const { return k_; }
  const CovarianceMatrix& beta() const { return beta_; }
  int dim() const { return beta_.dim(); }

 private:
  Matrix k_;
  CovarianceMatrix beta_;
};

/// Gaussian distribution of measurement outcomes.
struct OutcomeDistribution {
  Vector mean;
  Matrix covariance;  // positive definite
};

struct CanonicalMeasurement {
  GaussianMeasurement canonical;  // K = I, same noise covariance
  Matrix outcome_map;             // raw outcome z corresponds to outcome_map * z
};

/// Reduces a measurement to K = I. A raw outcome z of the original
/// observable corresponds to the canonical outcome u = outcome_map * z.
CanonicalMeasurement canonicalize_measurement(const GaussianMeasurement& m,
                                              const SymplecticSpace& space);

/// Outcome distribution of a Gaussian state under a Gaussian measurement:
/// N(mean, alpha + beta) in canonical coordinates, pulled back through
/// K^{-1} when K differs from the identity.
OutcomeDistribution outcome_distribution(const GaussianState& state,
                                         const GaussianMeasurement& m,
                                         const SymplecticSpace& space);

/// Differential entropy of a nondegenerate Gaussian with covariance sigma
/// in nats, Lebesgue reference measure: (1/2) log det sigma + (d/2) log(2 pi e).
double gaussian_differential_entropy(const Matrix& sigma);

/// Draws n i.i.d. outcomes (rows) from outcome_distribution(state, m).
/// Deterministic: identical (inputs, seed) yield bit-identical samples.
/// Covariance is applied through its Cholesky factor to a counter-based
/// normal stream.
Matrix sample_outcomes(const GaussianState& state, const GaussianMeasurement& m,
                       const SymplecticSpace& space, std::size_t n,
                       std::uint64_t seed);

}  // namespace cvcap

#endif  // CVCAP_GAUSSIAN_HPP
