// SPDX-License-Identifier: Apache-2.0

#ifndef CVCAP_CAPACITY_HPP
#define CVCAP_CAPACITY_HPP

#include <optional>

#include "cvcap/gaussian.hpp"
#include "cvcap/symplectic.hpp"

namespace cvcap {

/// Linear energy constraint Sp(epsilon * alpha) <= energy on input
/// covariances, with positive definite weight matrix epsilon.
class EnergyConstraint {
 public:
  EnergyConstraint(Matrix epsilon, double energy);

  const Matrix& epsilon() const { return epsilon_; }
  double energy() const { return energy_; }
  int dim() const { return static_cast<int>(epsilon_.rows()); }

 private:
  Matrix epsilon_;
  double energy_;
};

struct GroundState {
  double e_min;                 // minimum of Sp(epsilon * alpha) over valid alpha
  CovarianceMatrix covariance;  // pure covariance attaining it
};

/// Minimum mean energy over quantum-valid covariances. The minimizer is
/// (1/2) S S' built from the basis adapted to epsilon; the minimum equals
/// the sum of the symplectic eigenvalues of epsilon.
GroundState min_energy(const Matrix& epsilon, const SymplecticSpace& space);

/// Maximizer of det(alpha + beta) over quantum-valid alpha subject to
/// Sp(epsilon * alpha) <= energy. Closed form
///   alpha = epsilon^{-1} (E + Sp(epsilon beta)) / (2s) - beta
/// whenever that candidate is a valid covariance; otherwise an interior
/// point maximization over the feasible set.
CovarianceMatrix optimal_input_covariance(const EnergyConstraint& constraint,
                                          const CovarianceMatrix& beta,
                                          const SymplecticSpace& space);

/// True iff alpha - (1/2) * form * J_beta is positive semidefinite
/// (minimum eigenvalue >= -1e-9 * |alpha|).
bool threshold_check(const CovarianceMatrix& alpha, const CovarianceMatrix& beta,
                     const SymplecticSpace& space);

/// Smallest energy at which the closed-form maximizer satisfies the
/// threshold condition, located by bisection. The flag is monotone in the
/// energy because the candidate is affine and increasing in it.
double threshold_energy(const Matrix& epsilon, const CovarianceMatrix& beta,
                        const SymplecticSpace& space);

/// Capacity-achieving ensemble: displaced squeezed-vacuum states with
/// covariance (1/2) * form * J_beta, displacement drawn from a centered
/// Gaussian with covariance alpha_opt minus that squeezed vacuum.
struct OptimalEnsemble {
  CovarianceMatrix coherent_covariance;
  Matrix mean_covariance;  // PSD exactly when the threshold holds
};

/// Builds the ensemble; requires threshold_check(alpha_opt, beta) true.
OptimalEnsemble optimal_ensemble(const CovarianceMatrix& alpha_opt,
                                 const CovarianceMatrix& beta,
                                 const SymplecticSpace& space);

enum class CapacityStatus { kExact, kUpperBoundOnly };

struct CapacityResult {
  CovarianceMatrix alpha_opt;
  bool threshold_ok;
  double capacity_nats;
  double capacity_bits;
  CapacityStatus status;  // kExact iff threshold_ok
  std::optional<OptimalEnsemble> ensemble;  // absent when no achieving
                                            // ensemble exists
  double logdet_output;      // log det(alpha_opt + beta)
  double logdet_min_output;  // log det(beta + (1/2) form J_beta)
};

/// Energy-constrained classical capacity of the Gaussian measurement
/// channel. The outcome-relabeling component K drops out. When the
/// threshold condition holds the value is exact and the achieving
/// ensemble is attached; otherwise the same expression is an upper bound
/// and is flagged as such. Energy within 1e-12 of the minimum is the
/// degenerate point-mass case with capacity exactly zero.
CapacityResult capacity(const EnergyConstraint& constraint,
                        const GaussianMeasurement& m,
                        const SymplecticSpace& space);

struct HeterodyneCapacity {
  double capacity_nats;
  double threshold_bound;  // minimal energy for the formula to apply
};

/// Single-mode closed form for diagonal noise diag(beta1, beta2) and
/// energy weight (1/2) I:
///   C = log((2E + beta1 + beta2) / (2 sqrt(beta1 beta2) + 1)),
/// valid for beta1 beta2 >= 1/4 and
///   E >= (1/2)(max{sqrt(beta1/beta2), sqrt(beta2/beta1)} + |beta2 - beta1|).
/// Rejects sub-uncertainty noise and energies below the bound.
HeterodyneCapacity heterodyne_closed_form(double beta1, double beta2,
                                          double energy);

namespace detail {

/// Interior-point maximization of log det(alpha + beta) over quantum-valid
/// alpha with Sp(epsilon alpha) <= energy: logarithmic barrier on the
/// Hermitian constraint alpha + (i/2) form >= 0 and on the trace slack.
/// Throws ConvergenceFailure at the iteration cap (1e4).
CovarianceMatrix maximize_logdet_barrier(const Matrix& epsilon, double energy,
                                         const CovarianceMatrix& beta,
                                         const SymplecticSpace& space);

}  // namespace detail

}  // namespace cvcap

#endif  // CVCAP_CAPACITY_HPP
