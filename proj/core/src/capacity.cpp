// SPDX-License-Identifier: Apache-2.0

#include "cvcap/capacity.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace cvcap {

namespace {

constexpr double kLn2 = 0.69314718055994530941723212145818;
constexpr double kMaxEnergy = 1e6;

double logdet_pd(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw InvalidInput(std::string(what) + ": matrix is not positive definite");
  }
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double feasibility_margin(double e_min) {
  return 1e-12 * std::max(1.0, std::abs(e_min));
}

CovarianceMatrix squeezed_vacuum(const CovarianceMatrix& beta,
                                 const SymplecticSpace& space) {
  return pure_covariance(complex_structure(beta, space), space);
}

// Closed-form stationary point of det(alpha + beta) under the active
// trace constraint: (alpha + beta)^{-1} proportional to epsilon, with the
// multiplier fixed by Sp(epsilon alpha) = E.
Matrix water_filling_candidate(const Matrix& epsilon, double energy,
                               const Matrix& beta,
                               const SymplecticSpace& space) {
  const double mu =
      (energy + (epsilon * beta).trace()) / static_cast<double>(space.dim());
  const Matrix eps_inv =
      Eigen::LLT<Matrix>(epsilon).solve(Matrix::Identity(space.dim(), space.dim()));
  Matrix cand = mu * eps_inv - beta;
  return 0.5 * (cand + cand.transpose());
}

}  // namespace

EnergyConstraint::EnergyConstraint(Matrix epsilon, double energy)
    : epsilon_(std::move(epsilon)), energy_(energy) {
  if (epsilon_.rows() != epsilon_.cols() || epsilon_.rows() == 0 ||
      epsilon_.rows() % 2 != 0) {
    throw InvalidInput("energy weight matrix must be square with even dimension");
  }
  if ((epsilon_ - epsilon_.transpose()).norm() >
      tol::kSymmetry * std::max(epsilon_.norm(), 1.0)) {
    throw InvalidInput("energy weight matrix must be symmetric");
  }
  epsilon_ = 0.5 * (epsilon_ + epsilon_.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(epsilon_);
  if (es.eigenvalues()(0) <= 0.0) {
    throw InvalidInput("energy weight matrix must be positive definite");
  }
  if (!(energy_ > 0.0)) {
    throw InvalidInput("energy bound must be positive");
  }
  if (energy_ > kMaxEnergy) {
    throw InvalidInput("energy bound exceeds the supported range (1e6)");
  }
}

GroundState min_energy(const Matrix& epsilon, const SymplecticSpace& space) {
  if (epsilon.rows() != space.dim() || epsilon.cols() != space.dim()) {
    throw InvalidInput("min energy: dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (epsilon + epsilon.transpose()));
  if (es.eigenvalues()(0) <= 0.0) {
    throw InvalidInput("min energy: weight matrix must be positive definite");
  }
  // Williamson form of epsilon: S' epsilon S = diag(d_1, d_1, ..., d_s, d_s)
  // with S symplectic. The pure state (1/2) S S' attains the minimum
  // sum_j d_j, and no valid covariance does better because each mode of a
  // valid covariance carries total variance at least one.
  const SymplecticBasis basis =
      symplectic_basis(CovarianceMatrix(epsilon), space);
  const Matrix s_mat = basis.symplectic_matrix();
  return GroundState{basis.values.sum(),
                     CovarianceMatrix(0.5 * s_mat * s_mat.transpose())};
}

CovarianceMatrix optimal_input_covariance(const EnergyConstraint& constraint,
                                          const CovarianceMatrix& beta,
                                          const SymplecticSpace& space) {
  if (constraint.dim() != space.dim() || beta.dim() != space.dim()) {
    throw InvalidInput("optimal input covariance: dimension mismatch");
  }
  const GroundState gs = min_energy(constraint.epsilon(), space);
  const double margin = feasibility_margin(gs.e_min);
  if (constraint.energy() < gs.e_min - margin) {
    throw InfeasibleEnergy("energy " + std::to_string(constraint.energy()) +
                           " is below the minimum " + std::to_string(gs.e_min));
  }
  if (constraint.energy() - gs.e_min <= margin) {
    return gs.covariance;  // degenerate point: only the ground state fits
  }

  Matrix cand = water_filling_candidate(constraint.epsilon(), constraint.energy(),
                                        beta.matrix(), space);
  CovarianceMatrix candidate(std::move(cand));
  if (symplectic_spectrum(candidate, space).valid) {
    return candidate;
  }
  return detail::maximize_logdet_barrier(constraint.epsilon(),
                                         constraint.energy(), beta, space);
}

bool threshold_check(const CovarianceMatrix& alpha, const CovarianceMatrix& beta,
                     const SymplecticSpace& space) {
  if (alpha.dim() != space.dim() || beta.dim() != space.dim()) {
    throw InvalidInput("threshold check: dimension mismatch");
  }
  const CovarianceMatrix vacuum = squeezed_vacuum(beta, space);
  const Matrix diff = alpha.matrix() - vacuum.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es(diff);
  // Slack absorbs rounding at the boundary while keeping the flip energy
  // within 1e-9 of the exact threshold.
  return es.eigenvalues()(0) >= -1e-10 * std::max(alpha.matrix().norm(), 1.0);
}

double threshold_energy(const Matrix& epsilon, const CovarianceMatrix& beta,
                        const SymplecticSpace& space) {
  const GroundState gs = min_energy(epsilon, space);
  const auto candidate_ok = [&](double energy) {
    Matrix cand = water_filling_candidate(epsilon, energy, beta.matrix(), space);
    return threshold_check(CovarianceMatrix(std::move(cand)), beta, space);
  };
  double lo = gs.e_min;
  if (candidate_ok(lo)) return lo;
  double hi = std::max(2.0 * gs.e_min, 1.0);
  int doublings = 0;
  while (!candidate_ok(hi)) {
    hi *= 2.0;
    if (++doublings > 64) {
      throw ConvergenceFailure("threshold energy not found below search cap");
    }
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (candidate_ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

OptimalEnsemble optimal_ensemble(const CovarianceMatrix& alpha_opt,
                                 const CovarianceMatrix& beta,
                                 const SymplecticSpace& space) {
  if (!threshold_check(alpha_opt, beta, space)) {
    throw ThresholdViolation(
        "optimal ensemble requires alpha >= (1/2) form J_beta");
  }
  CovarianceMatrix coherent = squeezed_vacuum(beta, space);
  Matrix mean_cov = alpha_opt.matrix() - coherent.matrix();
  return OptimalEnsemble{std::move(coherent), std::move(mean_cov)};
}

CapacityResult capacity(const EnergyConstraint& constraint,
                        const GaussianMeasurement& m,
                        const SymplecticSpace& space) {
  // The outcome relabeling K is a bijection of the output space and does
  // not change mutual information; only the noise covariance matters.
  const CanonicalMeasurement canon = canonicalize_measurement(m, space);
  const CovarianceMatrix& beta = canon.canonical.beta();
  if (constraint.dim() != space.dim()) {
    throw InvalidInput("capacity: dimension mismatch");
  }

  const CovarianceMatrix vacuum = squeezed_vacuum(beta, space);
  const double logdet_min =
      logdet_pd(beta.matrix() + vacuum.matrix(), "capacity");

  const GroundState gs = min_energy(constraint.epsilon(), space);
  const double margin = feasibility_margin(gs.e_min);
  if (constraint.energy() < gs.e_min - margin) {
    throw InfeasibleEnergy("energy " + std::to_string(constraint.energy()) +
                           " is below the minimum " + std::to_string(gs.e_min));
  }

  if (constraint.energy() - gs.e_min <= margin) {
    // Only the ground state is affordable: the point-mass ensemble carries
    // no information and the capacity is exactly zero.
    const bool thr = threshold_check(gs.covariance, beta, space);
    const double ld_out =
        logdet_pd(gs.covariance.matrix() + beta.matrix(), "capacity");
    CapacityResult out{
        gs.covariance,
        thr,
        0.0,
        0.0,
        thr ? CapacityStatus::kExact : CapacityStatus::kUpperBoundOnly,
        OptimalEnsemble{gs.covariance,
                        Matrix::Zero(space.dim(), space.dim())},
        ld_out,
        logdet_min};
    return out;
  }

  CovarianceMatrix alpha = optimal_input_covariance(constraint, beta, space);
  const bool thr = threshold_check(alpha, beta, space);

  const double ld_out = logdet_pd(alpha.matrix() + beta.matrix(), "capacity");
  const double form1 = 0.5 * (ld_out - logdet_min);

  // Second displayed form of the capacity, evaluated through its own
  // numerical route as a consistency check.
  const Matrix bv_inv = Eigen::LLT<Matrix>(beta.matrix() + vacuum.matrix())
                            .solve(Matrix::Identity(space.dim(), space.dim()));
  const Matrix inner = Matrix::Identity(space.dim(), space.dim()) +
                       (alpha.matrix() - vacuum.matrix()) * bv_inv;
  const double form2 = 0.5 * std::log(inner.determinant());
  if (!(std::abs(form1 - form2) <= 1e-10 * std::max(1.0, std::abs(form1)))) {
    throw Error("capacity: the two determinant forms disagree");
  }

  const double nats = std::max(form1, 0.0);
  CapacityResult out{
      alpha,
      thr,
      nats,
      nats / kLn2,
      thr ? CapacityStatus::kExact : CapacityStatus::kUpperBoundOnly,
      std::nullopt,
      ld_out,
      logdet_min};
  if (thr) {
    out.ensemble = optimal_ensemble(alpha, beta, space);
  }
  return out;
}

HeterodyneCapacity heterodyne_closed_form(double beta1, double beta2,
                                          double energy) {
  if (!(beta1 > 0.0) || !(beta2 > 0.0)) {
    throw InvalidInput("noise variances must be positive");
  }
  const double product = beta1 * beta2;
  if (product < 0.25 * (1.0 - 1e-12)) {
    throw InvalidInput("noise violates the uncertainty relation (beta1*beta2 < 1/4)");
  }
  const double ratio = std::sqrt(beta1 / beta2);
  const double bound = 0.5 * (std::max(ratio, 1.0 / ratio) + std::abs(beta2 - beta1));
  if (energy < bound * (1.0 - 1e-12)) {
    throw ThresholdViolation("energy " + std::to_string(energy) +
                             " is below the threshold bound " +
                             std::to_string(bound));
  }
  const double nats =
      std::log((2.0 * energy + beta1 + beta2) / (2.0 * std::sqrt(product) + 1.0));
  return HeterodyneCapacity{nats, bound};
}

namespace detail {

namespace {

// Lower-triangle packing of a symmetric matrix.
struct SymmetricPacking {
  explicit SymmetricPacking(int dim) : dim_(dim), size_(dim * (dim + 1) / 2) {}

  int size() const { return size_; }

  Matrix unpack(const Vector& x) const {
    Matrix m(dim_, dim_);
    int k = 0;
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j <= i; ++j) {
        m(i, j) = x(k);
        m(j, i) = x(k);
        ++k;
      }
    }
    return m;
  }

  Vector pack(const Matrix& m) const {
    Vector x(size_);
    int k = 0;
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j <= i; ++j) x(k++) = m(i, j);
    }
    return x;
  }

  // Gradient of f(alpha(x)) given the symmetric matrix gradient of f.
  Vector pack_gradient(const Matrix& g) const {
    Vector x(size_);
    int k = 0;
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j <= i; ++j) x(k++) = (i == j) ? g(i, i) : 2.0 * g(i, j);
    }
    return x;
  }

 private:
  int dim_;
  int size_;
};

using ComplexMatrix = Eigen::MatrixXcd;

struct BarrierEval {
  bool feasible = false;
  double value = 0.0;  // logdet(alpha+beta) + barrier/t
  Vector gradient;
  Matrix hessian;
};

struct BarrierProblem {
  Matrix epsilon;
  double energy;
  Matrix beta;
  ComplexMatrix i_half_form;  // (i/2) * Delta
  SymmetricPacking packing;
  std::vector<Matrix> basis;  // symmetric coordinate matrices B_k
  Vector trace_eps;           // Tr(epsilon B_k)

  BarrierProblem(Matrix eps, double e, Matrix b, ComplexMatrix form_half,
                 int dim)
      : epsilon(std::move(eps)),
        energy(e),
        beta(std::move(b)),
        i_half_form(std::move(form_half)),
        packing(dim) {
    basis.reserve(static_cast<std::size_t>(packing.size()));
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j <= i; ++j) {
        Matrix bm = Matrix::Zero(dim, dim);
        bm(i, j) = 1.0;
        bm(j, i) = 1.0;
        basis.push_back(bm);
      }
    }
    trace_eps = Vector(packing.size());
    for (int k = 0; k < packing.size(); ++k) {
      trace_eps(k) = (epsilon * basis[static_cast<std::size_t>(k)]).trace();
    }
  }

  // Scaled barrier objective logdet(alpha+beta) + phi(alpha)/t; keeping
  // the value O(1) preserves line-search resolution at large t.
  BarrierEval evaluate(const Vector& x, double t, bool with_derivatives) const {
    BarrierEval out;
    const Matrix alpha = packing.unpack(x);
    const int dim = static_cast<int>(alpha.rows());
    const int n = packing.size();

    Eigen::LLT<Matrix> llt_sum(alpha + beta);
    if (llt_sum.info() != Eigen::Success) return out;

    ComplexMatrix h = alpha.cast<std::complex<double>>() + i_half_form;
    Eigen::LLT<ComplexMatrix> llt_h(h);
    if (llt_h.info() != Eigen::Success) return out;

    const double slack = energy - (epsilon * alpha).trace();
    if (!(slack > 0.0)) return out;

    const double logdet_sum =
        2.0 * llt_sum.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double logdet_h = 2.0 * llt_h.matrixL()
                                      .toDenseMatrix()
                                      .diagonal()
                                      .real()
                                      .array()
                                      .log()
                                      .sum();

    out.feasible = true;
    out.value = logdet_sum + (logdet_h + std::log(slack)) / t;
    if (!with_derivatives) return out;

    const Matrix sum_inv = llt_sum.solve(Matrix::Identity(dim, dim));
    const ComplexMatrix h_inv = llt_h.solve(ComplexMatrix::Identity(dim, dim));
    const Matrix grad_matrix = sum_inv + (h_inv.real() - epsilon / slack) / t;
    out.gradient = packing.pack_gradient(grad_matrix);

    // Exact Hessian in packed coordinates:
    //   -Tr(M^-1 B_k M^-1 B_l) - [Re Tr(H^-1 B_k H^-1 B_l)
    //   + Tr(eps B_k) Tr(eps B_l) / slack^2] / t.
    std::vector<Matrix> p_real(static_cast<std::size_t>(n));
    std::vector<ComplexMatrix> p_cplx(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      p_real[static_cast<std::size_t>(k)] =
          sum_inv * basis[static_cast<std::size_t>(k)];
      p_cplx[static_cast<std::size_t>(k)] =
          h_inv * basis[static_cast<std::size_t>(k)].cast<std::complex<double>>();
    }
    out.hessian = Matrix(n, n);
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l <= k; ++l) {
        const double term_sum =
            (p_real[static_cast<std::size_t>(k)] *
             p_real[static_cast<std::size_t>(l)])
                .trace();
        const double term_h = (p_cplx[static_cast<std::size_t>(k)] *
                               p_cplx[static_cast<std::size_t>(l)])
                                  .trace()
                                  .real();
        const double value =
            -term_sum -
            (term_h + trace_eps(k) * trace_eps(l) / (slack * slack)) / t;
        out.hessian(k, l) = value;
        out.hessian(l, k) = value;
      }
    }
    return out;
  }
};

}  // namespace

CovarianceMatrix maximize_logdet_barrier(const Matrix& epsilon, double energy,
                                         const CovarianceMatrix& beta,
                                         const SymplecticSpace& space) {
  const int dim = space.dim();
  const GroundState gs = min_energy(epsilon, space);
  if (!(energy > gs.e_min)) {
    throw InfeasibleEnergy("barrier maximizer needs energy above the minimum");
  }

  BarrierProblem problem(epsilon, energy, beta.matrix(),
                         std::complex<double>(0.0, 0.5) *
                             space.form().cast<std::complex<double>>(),
                         dim);

  // Strictly interior start: inflate the ground state, spending half the
  // energy headroom.
  const double bump = std::min(0.5, 0.5 * (energy - gs.e_min) / epsilon.trace());
  Vector x = problem.packing.pack(gs.covariance.matrix() +
                                  bump * Matrix::Identity(dim, dim));

  constexpr int kIterationCap = 10000;
  constexpr double kGradTol = 1e-10;  // on the gradient of logdet + phi/t
  int total_iterations = 0;
  const int n = problem.packing.size();

  double t = 1.0;
  // The iterate tracks the central path down to a duality gap of
  // (dim + 1) / t_final = 1e-12 times the barrier degree.
  const double t_final = (dim + 1) / 1e-12;
  bool centered = false;

  while (true) {
    // Damped Newton centering for the current barrier weight. Near the
    // semidefinite boundary the curvature grows with t, so the gradient
    // bottoms out at the double-precision noise floor; the Newton
    // decrement detects that floor and the duality gap still bounds the
    // remaining suboptimality.
    BarrierEval cur = problem.evaluate(x, t, true);
    if (!cur.feasible) {
      throw ConvergenceFailure("barrier maximizer lost feasibility");
    }
    centered = false;
    for (int iter = 0; iter < 100; ++iter) {
      if (++total_iterations > kIterationCap) {
        throw ConvergenceFailure("barrier maximizer hit the iteration cap");
      }
      if (cur.gradient.lpNorm<Eigen::Infinity>() <= kGradTol) {
        centered = true;
        break;
      }

      // Ascent step from the concave model; Levenberg damping if the
      // negated Hessian is not numerically positive definite.
      Matrix neg_hess = -cur.hessian;
      Vector step_dir;
      double damping = 0.0;
      for (int attempt = 0; attempt < 12; ++attempt) {
        Eigen::LDLT<Matrix> ldlt(neg_hess +
                                 damping * Matrix::Identity(n, n));
        if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
          step_dir = ldlt.solve(cur.gradient);
          if (step_dir.allFinite() && step_dir.dot(cur.gradient) > 0.0) break;
        }
        damping = (damping == 0.0) ? 1e-10 * neg_hess.norm() : damping * 100.0;
        step_dir.resize(0);
      }
      if (step_dir.size() == 0) {
        throw ConvergenceFailure("barrier maximizer: Newton solve failed");
      }

      // Expected centering gain is half the squared Newton decrement; when
      // it drops below the value's double-precision resolution no further
      // progress is representable.
      const double directional = cur.gradient.dot(step_dir);
      if (directional <= 4e-15 * std::max(1.0, std::abs(cur.value))) {
        centered = true;
        break;
      }

      double step = 1.0;
      bool accepted = false;
      BarrierEval next;
      for (int ls = 0; ls < 80; ++ls) {
        next = problem.evaluate(x + step * step_dir, t, true);
        if (next.feasible &&
            next.value >= cur.value + 1e-4 * step * directional) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        centered = true;  // line search at the same numerical floor
        break;
      }
      x += step * step_dir;
      cur = next;
    }

    if (t >= t_final) break;
    t = std::min(t * 10.0, t_final);
  }

  if (!centered || !problem.evaluate(x, t_final, false).feasible) {
    throw ConvergenceFailure("barrier maximizer did not reach tolerance");
  }
  return CovarianceMatrix(problem.packing.unpack(x));
}

}  // namespace detail

}  // namespace cvcap
