// SPDX-License-Identifier: Apache-2.0

#include "cvcap/gaussian.hpp"

#include <cmath>

#include "cvcap/rng.hpp"

namespace cvcap {

namespace {

void require_quantum_valid(const CovarianceMatrix& cov, const char* what) {
  SymplecticSpace space(cov.modes());
  if (!symplectic_spectrum(cov, space).valid) {
    throw InvalidInput(std::string(what) +
                       ": covariance violates the uncertainty relation");
  }
}

double logdet_pd(const Matrix& sigma, const char* what) {
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw InvalidInput(std::string(what) + ": matrix is not positive definite");
  }
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace

GaussianState::GaussianState(Vector mean, CovarianceMatrix covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
  if (mean_.size() != covariance_.dim()) {
    throw InvalidInput("state mean and covariance dimensions differ");
  }
  require_quantum_valid(covariance_, "gaussian state");
}

GaussianMeasurement::GaussianMeasurement(Matrix k_matrix, CovarianceMatrix beta)
    : k_(std::move(k_matrix)), beta_(std::move(beta)) {
  if (k_.rows() != beta_.dim() || k_.cols() != beta_.dim()) {
    throw InvalidInput("measurement K matrix has wrong dimensions");
  }
  Eigen::FullPivLU<Matrix> lu(k_);
  if (!lu.isInvertible()) {
    throw InvalidInput("measurement K matrix is singular");
  }
  require_quantum_valid(beta_, "measurement noise");
}

CanonicalMeasurement canonicalize_measurement(const GaussianMeasurement& m,
                                              const SymplecticSpace& space) {
  if (m.dim() != space.dim()) {
    throw InvalidInput("canonicalize: dimension mismatch");
  }
  const int dim = space.dim();
  return CanonicalMeasurement{
      GaussianMeasurement(Matrix::Identity(dim, dim), m.beta()), m.k_matrix()};
}

OutcomeDistribution outcome_distribution(const GaussianState& state,
                                         const GaussianMeasurement& m,
                                         const SymplecticSpace& space) {
  if (state.dim() != space.dim() || m.dim() != space.dim()) {
    throw InvalidInput("outcome distribution: dimension mismatch");
  }
  const Matrix sum = state.covariance().matrix() + m.beta().matrix();
  if (m.k_matrix().isIdentity(1e-14)) {
    return OutcomeDistribution{state.mean(), sum};
  }
  const Matrix k_inv = m.k_matrix().inverse();
  return OutcomeDistribution{k_inv * state.mean(),
                             k_inv * sum * k_inv.transpose()};
}

double gaussian_differential_entropy(const Matrix& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) {
    throw InvalidInput("entropy: matrix must be square");
  }
  if ((sigma - sigma.transpose()).norm() >
      tol::kSymmetry * std::max(sigma.norm(), 1.0)) {
    throw InvalidInput("entropy: matrix must be symmetric");
  }
  const double d = static_cast<double>(sigma.rows());
  constexpr double log_two_pi = 1.8378770664093454835606594728112;
  return 0.5 * logdet_pd(sigma, "entropy") + 0.5 * d * (log_two_pi + 1.0);
}

Matrix sample_outcomes(const GaussianState& state, const GaussianMeasurement& m,
                       const SymplecticSpace& space, std::size_t n,
                       std::uint64_t seed) {
  if (n == 0) {
    throw InvalidInput("sample count must be positive");
  }
  const OutcomeDistribution dist = outcome_distribution(state, m, space);
  Eigen::LLT<Matrix> llt(dist.covariance);
  if (llt.info() != Eigen::Success) {
    throw InvalidInput("sampling: outcome covariance is not positive definite");
  }
  const Matrix chol = llt.matrixL();
  const int dim = space.dim();

  NormalStream stream(seed, 0);
  Matrix samples(static_cast<Eigen::Index>(n), dim);
  Vector draw(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < dim; ++c) {
      draw(c) = stream.normal(static_cast<std::uint64_t>(i) * dim + c);
    }
    samples.row(i) = (dist.mean + chol * draw).transpose();
  }
  return samples;
}

}  // namespace cvcap
