// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "cvcap/capacity.hpp"
#include "test_support.hpp"

using namespace cvcap;
using cvcap::testing::random_positive_definite;
using cvcap::testing::random_valid_covariance;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

GaussianMeasurement measurement(const Matrix& beta) {
  return GaussianMeasurement(Matrix::Identity(beta.rows(), beta.cols()),
                             CovarianceMatrix(beta));
}

// Single-mode diagonal oracle for the constrained determinant maximum
// when the water-filling point violates the uncertainty relation: both
// the trace constraint a1 + a2 = 2E and the purity boundary a1 a2 = 1/4
// are active, and the larger variance goes to the quieter quadrature.
Matrix diagonal_boundary_oracle(double beta1, double beta2, double energy) {
  const double sum = 2.0 * energy;
  const double disc = std::sqrt(sum * sum - 1.0);
  const double lo = 0.5 * (sum - disc);
  const double hi = 0.5 * (sum + disc);
  const double det_a = (beta1 + lo) * (beta2 + hi);
  const double det_b = (beta1 + hi) * (beta2 + lo);
  return det_a >= det_b ? diag2(lo, hi) : diag2(hi, lo);
}

}  // namespace

TEST_CASE("energy constraint: validation") {
  CHECK_THROWS_AS(EnergyConstraint(diag2(1.0, -0.25), 1.0), InvalidInput);
  CHECK_THROWS_AS(EnergyConstraint(Matrix::Identity(3, 3), 1.0), InvalidInput);
  CHECK_THROWS_AS(EnergyConstraint(Matrix::Identity(2, 2), 0.0), InvalidInput);
  CHECK_THROWS_AS(EnergyConstraint(Matrix::Identity(2, 2), 2e6), InvalidInput);
  Matrix asym(2, 2);
  asym << 1.0, 0.3, 0.0, 1.0;
  CHECK_THROWS_AS(EnergyConstraint(asym, 1.0), InvalidInput);
}

TEST_CASE("min energy: vacuum weight") {
  const SymplecticSpace space(1);
  const GroundState gs = min_energy(0.5 * Matrix::Identity(2, 2), space);
  CHECK(gs.e_min == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(max_abs_diff(gs.covariance.matrix(), 0.5 * Matrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("min energy: squeezed weight matches the Lagrange oracle") {
  const SymplecticSpace space(1);
  const GroundState gs = min_energy(diag2(1.0, 0.25), space);
  CHECK(gs.e_min == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(max_abs_diff(gs.covariance.matrix(), diag2(0.25, 1.0)) < 1e-12);

  // For diagonal eps the minimizer is diagonal with a1 a2 = 1/4:
  // a1 = (1/2) sqrt(eps2/eps1), e_min = sqrt(eps1 eps2).
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> uni(0.2, 4.0);
  for (int rep = 0; rep < 20; ++rep) {
    const double e1 = uni(rng), e2 = uni(rng);
    const GroundState g = min_energy(diag2(e1, e2), space);
    CHECK(g.e_min == doctest::Approx(std::sqrt(e1 * e2)).epsilon(1e-11));
    CHECK(g.covariance.matrix()(0, 0) ==
          doctest::Approx(0.5 * std::sqrt(e2 / e1)).epsilon(1e-10));
    CHECK(g.covariance.matrix()(1, 1) ==
          doctest::Approx(0.5 * std::sqrt(e1 / e2)).epsilon(1e-10));
  }
}

TEST_CASE("min energy: additive over modes for the vacuum weight") {
  const SymplecticSpace space(2);
  const GroundState gs = min_energy(0.5 * Matrix::Identity(4, 4), space);
  CHECK(gs.e_min == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("min energy: ground state is pure, attains the bound, and is optimal") {
  std::mt19937_64 rng(103);
  for (int s : {1, 2, 3}) {
    const SymplecticSpace space(s);
    for (int rep = 0; rep < 8; ++rep) {
      const Matrix eps = random_positive_definite(2 * s, rng);
      const GroundState gs = min_energy(eps, space);
      const auto spec = symplectic_spectrum(gs.covariance, space);
      CHECK(spec.valid);
      CHECK(spec.pure);
      CHECK((eps * gs.covariance.matrix()).trace() ==
            doctest::Approx(gs.e_min).epsilon(1e-10));
      for (int trial = 0; trial < 30; ++trial) {
        const Matrix alpha = random_valid_covariance(space, rng);
        CHECK((eps * alpha).trace() >= gs.e_min - 1e-10 * std::abs(gs.e_min));
      }
    }
  }
}

TEST_CASE("min energy: rejects a weight that is not positive definite") {
  const SymplecticSpace space(1);
  CHECK_THROWS_AS(min_energy(diag2(1.0, 0.0), space), InvalidInput);
}

TEST_CASE("optimal input covariance: reproduces the worked example") {
  const SymplecticSpace space(1);
  const EnergyConstraint constraint(0.5 * Matrix::Identity(2, 2), 2.0);
  const CovarianceMatrix beta(diag2(1.0, 0.25));
  const CovarianceMatrix alpha = optimal_input_covariance(constraint, beta, space);
  CHECK(max_abs_diff(alpha.matrix(), diag2(1.625, 2.375)) < 1e-12);
  CHECK((0.5 * Matrix::Identity(2, 2) * alpha.matrix()).trace() ==
        doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("optimal input covariance: vacuum noise water filling with grid oracle") {
  const SymplecticSpace space(1);
  const EnergyConstraint constraint(0.5 * Matrix::Identity(2, 2), 1.5);
  const CovarianceMatrix beta(0.5 * Matrix::Identity(2, 2));
  const CovarianceMatrix alpha = optimal_input_covariance(constraint, beta, space);
  CHECK(max_abs_diff(alpha.matrix(), 1.5 * Matrix::Identity(2, 2)) < 1e-12);

  // Coarse-to-fine grid over diagonal candidates on the trace boundary.
  double best = 0.0, best_a1 = 0.0;
  for (double a1 = 0.25; a1 <= 2.75; a1 += 1e-3) {
    const double a2 = 3.0 - a1;
    if (a1 * a2 < 0.25) continue;
    const double det = (0.5 + a1) * (0.5 + a2);
    if (det > best) {
      best = det;
      best_a1 = a1;
    }
  }
  CHECK(std::abs(best_a1 - 1.5) < 2e-3);
  CHECK((alpha.matrix() + beta.matrix()).determinant() >= best - 1e-9);
}

TEST_CASE("optimal input covariance: minimum energy collapses to the ground state") {
  const SymplecticSpace space(1);
  const EnergyConstraint constraint(0.5 * Matrix::Identity(2, 2), 0.5);
  const CovarianceMatrix beta(0.5 * Matrix::Identity(2, 2));
  const CovarianceMatrix alpha = optimal_input_covariance(constraint, beta, space);
  CHECK(max_abs_diff(alpha.matrix(), 0.5 * Matrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("optimal input covariance: single-mode water-filling identity") {
  const SymplecticSpace space(1);
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> uni(0.3, 3.0);
  for (int rep = 0; rep < 25; ++rep) {
    const double b1 = uni(rng);
    const double b2 = std::max(uni(rng), 0.26 / b1);
    const double bound =
        0.5 * (std::max(std::sqrt(b1 / b2), std::sqrt(b2 / b1)) + std::abs(b2 - b1));
    const double energy = bound + uni(rng);
    const EnergyConstraint constraint(0.5 * Matrix::Identity(2, 2), energy);
    const CovarianceMatrix alpha =
        optimal_input_covariance(constraint, CovarianceMatrix(diag2(b1, b2)), space);
    CHECK(alpha.matrix()(0, 0) ==
          doctest::Approx(energy + 0.5 * (b2 - b1)).epsilon(1e-12));
    CHECK(alpha.matrix()(1, 1) ==
          doctest::Approx(energy - 0.5 * (b2 - b1)).epsilon(1e-12));
    CHECK(std::abs(alpha.matrix()(0, 1)) < 1e-12);
  }
}

TEST_CASE("optimal input covariance: falls back when water filling is invalid") {
  const SymplecticSpace space(1);
  const double energy = 0.55;
  const Matrix beta = diag2(1.0, 0.25);
  const EnergyConstraint constraint(0.5 * Matrix::Identity(2, 2), energy);
  const CovarianceMatrix alpha =
      optimal_input_covariance(constraint, CovarianceMatrix(beta), space);

  const Matrix oracle = diagonal_boundary_oracle(1.0, 0.25, energy);
  CHECK(max_abs_diff(alpha.matrix(), oracle) < 1e-6);
  CHECK(symplectic_spectrum(alpha, space).valid);
  CHECK((0.5 * alpha.matrix()).trace() <= energy + 1e-9);
}

TEST_CASE("optimal input covariance: infeasible energy is rejected") {
  const SymplecticSpace space(1);
  const EnergyConstraint constraint(0.5 * Matrix::Identity(2, 2), 0.4);
  CHECK_THROWS_AS(optimal_input_covariance(
                      constraint, CovarianceMatrix(0.5 * Matrix::Identity(2, 2)),
                      space),
                  InfeasibleEnergy);
}

TEST_CASE("barrier maximizer: agrees with the closed form when both apply") {
  const SymplecticSpace space(1);
  const CovarianceMatrix beta(0.5 * Matrix::Identity(2, 2));
  const CovarianceMatrix viaBarrier = detail::maximize_logdet_barrier(
      0.5 * Matrix::Identity(2, 2), 1.5, beta, space);
  CHECK(max_abs_diff(viaBarrier.matrix(), 1.5 * Matrix::Identity(2, 2)) < 1e-6);

  // Valid closed form but inactive threshold: the barrier must still land
  // on the water-filling point.
  const CovarianceMatrix squeezed(diag2(1.0, 0.25));
  const CovarianceMatrix at_08 = detail::maximize_logdet_barrier(
      0.5 * Matrix::Identity(2, 2), 0.8, squeezed, space);
  CHECK(max_abs_diff(at_08.matrix(), diag2(0.425, 1.175)) < 1e-6);
}

TEST_CASE("barrier maximizer: no feasible direction improves a two-mode optimum") {
  std::mt19937_64 rng(109);
  const SymplecticSpace space(2);
  const Matrix beta_m = random_valid_covariance(space, rng, 0.6, 1.5);
  const CovarianceMatrix beta(beta_m);
  const Matrix eps = random_positive_definite(4, rng, 0.4);
  const GroundState gs = min_energy(eps, space);
  const double energy = gs.e_min * 1.05;  // tight budget forces the fallback

  Matrix wf = Eigen::LLT<Matrix>(eps).solve(Matrix::Identity(4, 4)) *
                  (energy + (eps * beta_m).trace()) / 4.0 -
              beta_m;
  REQUIRE_FALSE(
      symplectic_spectrum(CovarianceMatrix(0.5 * (wf + wf.transpose())), space)
          .valid);

  const CovarianceMatrix opt =
      detail::maximize_logdet_barrier(eps, energy, beta, space);
  CHECK(symplectic_spectrum(opt, space).valid);
  CHECK((eps * opt.matrix()).trace() <= energy * (1.0 + 1e-9));
  const double best = std::log((opt.matrix() + beta_m).determinant());

  // Feasible competitors: convex mixtures of the ground state with random
  // valid covariances, scaled into the energy budget.
  for (int trial = 0; trial < 500; ++trial) {
    const Matrix candidate = random_valid_covariance(space, rng, 0.5, 2.0);
    const double cand_energy = (eps * candidate).trace();
    double t = 1.0;
    if (cand_energy > energy) {
      t = (energy - gs.e_min) / (cand_energy - gs.e_min);
    }
    const Matrix mixed =
        gs.covariance.matrix() + t * (candidate - gs.covariance.matrix());
    CHECK(std::log((mixed + beta_m).determinant()) <= best + 1e-7);
  }
}

TEST_CASE("threshold check: worked example values") {
  const SymplecticSpace space(1);
  const CovarianceMatrix beta(diag2(1.0, 0.25));
  CHECK(threshold_check(CovarianceMatrix(diag2(1.625, 2.375)), beta, space));
  CHECK(threshold_check(CovarianceMatrix(0.5 * Matrix::Identity(2, 2)),
                        CovarianceMatrix(0.5 * Matrix::Identity(2, 2)), space));
  CHECK_FALSE(threshold_check(CovarianceMatrix(diag2(0.625, 1.375)), beta, space));
}

TEST_CASE("threshold energy: flip point matches the example bound") {
  const SymplecticSpace space(1);
  const CovarianceMatrix beta(diag2(1.0, 0.25));
  const double flip = threshold_energy(0.5 * Matrix::Identity(2, 2), beta, space);
  CHECK(std::abs(flip - 1.375) < 1e-9);

  const CovarianceMatrix vac(0.5 * Matrix::Identity(2, 2));
  CHECK(threshold_energy(0.5 * Matrix::Identity(2, 2), vac, space) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("capacity: vacuum noise at E = 3/2 gives exactly one bit") {
  const SymplecticSpace space(1);
  const CapacityResult r =
      capacity(EnergyConstraint(0.5 * Matrix::Identity(2, 2), 1.5),
               measurement(0.5 * Matrix::Identity(2, 2)), space);
  CHECK(r.threshold_ok);
  CHECK(r.status == CapacityStatus::kExact);
  CHECK(r.capacity_nats == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(r.capacity_bits == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(r.ensemble.has_value());
  CHECK(max_abs_diff(r.ensemble->coherent_covariance.matrix(),
                     0.5 * Matrix::Identity(2, 2)) < 1e-12);
  CHECK(max_abs_diff(r.ensemble->mean_covariance, Matrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("capacity: squeezed noise worked example") {
  const SymplecticSpace space(1);
  const CapacityResult r =
      capacity(EnergyConstraint(0.5 * Matrix::Identity(2, 2), 2.0),
               measurement(diag2(1.0, 0.25)), space);
  CHECK(r.status == CapacityStatus::kExact);
  CHECK(r.capacity_nats == doctest::Approx(std::log(2.625)).epsilon(1e-12));
  CHECK(r.capacity_bits ==
        doctest::Approx(std::log2(2.625)).epsilon(1e-12));
  CHECK(max_abs_diff(r.alpha_opt.matrix(), diag2(1.625, 2.375)) < 1e-12);
  REQUIRE(r.ensemble.has_value());
  CHECK(max_abs_diff(r.ensemble->coherent_covariance.matrix(), diag2(1.0, 0.25)) <
        1e-12);
  CHECK(max_abs_diff(r.ensemble->mean_covariance, diag2(0.625, 2.125)) < 1e-12);
}

TEST_CASE("capacity: minimum energy forces the point-mass ensemble") {
  const SymplecticSpace space(1);
  const CapacityResult r =
      capacity(EnergyConstraint(0.5 * Matrix::Identity(2, 2), 0.5),
               measurement(0.5 * Matrix::Identity(2, 2)), space);
  CHECK(r.capacity_nats == 0.0);
  CHECK(r.capacity_bits == 0.0);
  CHECK(r.threshold_ok);
  CHECK(r.status == CapacityStatus::kExact);
  REQUIRE(r.ensemble.has_value());
  CHECK(r.ensemble->mean_covariance.norm() == 0.0);
}

TEST_CASE("capacity: degenerate point with mismatched noise stays an upper bound") {
  const SymplecticSpace space(1);
  const CapacityResult r =
      capacity(EnergyConstraint(0.5 * Matrix::Identity(2, 2), 0.5),
               measurement(diag2(1.0, 0.25)), space);
  CHECK(r.capacity_nats == 0.0);
  CHECK_FALSE(r.threshold_ok);
  CHECK(r.status == CapacityStatus::kUpperBoundOnly);
  REQUIRE(r.ensemble.has_value());  // point mass on the ground state
  CHECK(r.ensemble->mean_covariance.norm() == 0.0);
}

TEST_CASE("capacity: upper bound below the threshold energy") {
  const SymplecticSpace space(1);
  const CapacityResult r =
      capacity(EnergyConstraint(0.5 * Matrix::Identity(2, 2), 1.0),
               measurement(diag2(1.0, 0.25)), space);
  CHECK_FALSE(r.threshold_ok);
  CHECK(r.status == CapacityStatus::kUpperBoundOnly);
  CHECK_FALSE(r.ensemble.has_value());
  // Maximizer diag(0.625, 1.375) is still a valid covariance, so the bound
  // is (1/2) log det(diag(1.625, 1.625)) - (1/2) log 1 = log(1.625).
  CHECK(r.capacity_nats == doctest::Approx(std::log(1.625)).epsilon(1e-12));
  CHECK(r.capacity_nats >= 0.0);
}

TEST_CASE("capacity: infeasible energy is rejected") {
  const SymplecticSpace space(1);
  CHECK_THROWS_AS(capacity(EnergyConstraint(0.5 * Matrix::Identity(2, 2), 0.45),
                           measurement(0.5 * Matrix::Identity(2, 2)), space),
                  InfeasibleEnergy);
}

TEST_CASE("capacity: matches the heterodyne closed form across parameters") {
  const SymplecticSpace space(1);
  std::mt19937_64 rng(113);
  std::uniform_real_distribution<double> uni(0.3, 3.0);
  for (int rep = 0; rep < 30; ++rep) {
    const double b1 = uni(rng);
    const double b2 = std::max(uni(rng), 0.2505 / b1);
    const double bound =
        0.5 * (std::max(std::sqrt(b1 / b2), std::sqrt(b2 / b1)) + std::abs(b2 - b1));
    const double energy = bound * (1.0 + 0.1 + uni(rng));
    const CapacityResult r =
        capacity(EnergyConstraint(0.5 * Matrix::Identity(2, 2), energy),
                 measurement(diag2(b1, b2)), space);
    const HeterodyneCapacity hc = heterodyne_closed_form(b1, b2, energy);
    CHECK(r.status == CapacityStatus::kExact);
    CHECK(r.capacity_nats ==
          doctest::Approx(hc.capacity_nats).epsilon(1e-10));
  }
}

TEST_CASE("capacity: nondecreasing in the energy budget") {
  const SymplecticSpace space(1);
  const Matrix beta = diag2(1.0, 0.25);
  double prev = -1.0;
  for (double energy = 1.375; energy <= 4.0; energy += 0.125) {
    const CapacityResult r =
        capacity(EnergyConstraint(0.5 * Matrix::Identity(2, 2), energy),
                 measurement(beta), space);
    CHECK(r.capacity_nats >= prev - 1e-12);
    prev = r.capacity_nats;
  }
}

TEST_CASE("capacity: invariant under the outcome relabeling K") {
  const SymplecticSpace space(1);
  std::mt19937_64 rng(127);
  const Matrix beta = diag2(1.0, 0.25);
  const CapacityResult base =
      capacity(EnergyConstraint(0.5 * Matrix::Identity(2, 2), 2.0),
               measurement(beta), space);
  for (int rep = 0; rep < 5; ++rep) {
    Matrix k = Matrix::Random(2, 2);
    k += (k.determinant() >= 0 ? 2.0 : -2.0) * Matrix::Identity(2, 2);
    const GaussianMeasurement m(k, CovarianceMatrix(beta));
    const CapacityResult r =
        capacity(EnergyConstraint(0.5 * Matrix::Identity(2, 2), 2.0), m, space);
    CHECK(std::abs(r.capacity_nats - base.capacity_nats) < 1e-12);
  }
}

TEST_CASE("capacity: equals the max-minus-min output entropy difference") {
  std::mt19937_64 rng(131);
  for (int s : {1, 2}) {
    const SymplecticSpace space(s);
    for (int rep = 0; rep < 8; ++rep) {
      const Matrix beta_m = random_valid_covariance(space, rng);
      const CovarianceMatrix beta(beta_m);
      const Matrix eps = random_positive_definite(2 * s, rng, 0.3);
      const double e_star = threshold_energy(eps, beta, space);
      const double energy = std::min(e_star * 1.5 + 0.5, 9e5);
      const CapacityResult r = capacity(EnergyConstraint(eps, energy),
                                        measurement(beta_m), space);
      REQUIRE(r.status == CapacityStatus::kExact);

      const auto vac =
          pure_covariance(complex_structure(beta, space), space);
      const double h_max =
          gaussian_differential_entropy(r.alpha_opt.matrix() + beta_m);
      const double h_min =
          gaussian_differential_entropy(beta_m + vac.matrix());
      CHECK(r.capacity_nats ==
            doctest::Approx(h_max - h_min).epsilon(1e-10));
      CHECK(r.capacity_nats >= -1e-12);
    }
  }
}

TEST_CASE("heterodyne closed form: worked values") {
  const HeterodyneCapacity symmetric = heterodyne_closed_form(0.5, 0.5, 1.5);
  CHECK(symmetric.capacity_nats == doctest::Approx(std::log(2.0)).epsilon(1e-13));
  CHECK(symmetric.threshold_bound == doctest::Approx(0.5).epsilon(1e-13));

  const HeterodyneCapacity squeezed = heterodyne_closed_form(1.0, 0.25, 2.0);
  CHECK(squeezed.capacity_nats == doctest::Approx(std::log(2.625)).epsilon(1e-13));
  CHECK(squeezed.threshold_bound == doctest::Approx(1.375).epsilon(1e-13));

  const HeterodyneCapacity boundary = heterodyne_closed_form(0.5, 0.5, 0.5);
  CHECK(boundary.capacity_nats == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("heterodyne closed form: rejects bad noise and low energy") {
  CHECK_THROWS_AS(heterodyne_closed_form(0.4, 0.4, 2.0), InvalidInput);
  CHECK_THROWS_AS(heterodyne_closed_form(1.0, 0.25, 1.0), ThresholdViolation);
  CHECK_THROWS_AS(heterodyne_closed_form(-1.0, 0.25, 1.0), InvalidInput);
}

TEST_CASE("optimal ensemble: subtraction consistency and threshold guard") {
  const SymplecticSpace space(1);
  const CovarianceMatrix beta(diag2(1.0, 0.25));
  const CovarianceMatrix alpha(diag2(1.625, 2.375));
  const OptimalEnsemble ens = optimal_ensemble(alpha, beta, space);
  CHECK(max_abs_diff(ens.coherent_covariance.matrix() + ens.mean_covariance,
                     alpha.matrix()) < 1e-15);
  const auto spec = symplectic_spectrum(ens.coherent_covariance, space);
  CHECK(spec.pure);
  Eigen::SelfAdjointEigenSolver<Matrix> es(ens.mean_covariance);
  CHECK(es.eigenvalues()(0) > -1e-12);

  CHECK_THROWS_AS(
      optimal_ensemble(CovarianceMatrix(diag2(0.625, 1.375)), beta, space),
      ThresholdViolation);
}
