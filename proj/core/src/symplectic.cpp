// SPDX-License-Identifier: Apache-2.0

#include "cvcap/symplectic.hpp"

#include <cmath>
#include <vector>

namespace cvcap {

namespace {

// Symmetric square root of a PSD matrix; clamps small negative
// eigenvalues introduced by rounding. Throws when the matrix is
// genuinely indefinite.
Matrix psd_sqrt(const Matrix& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) {
    throw InvalidInput(std::string(what) + ": eigendecomposition failed");
  }
  const Vector& ev = es.eigenvalues();
  const double scale = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  Vector root(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tol::kSymmetry * std::max(scale, 1.0)) {
      throw InvalidInput(std::string(what) + ": matrix is not positive semidefinite");
    }
    root(i) = std::sqrt(std::max(ev(i), 0.0));
  }
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

// Skew-symmetric similar form of A = Delta^{-1} alpha: with T = alpha^{1/2},
// K = T Delta^{-1} T satisfies K = T A T^{-1} and K' = -K. Its singular
// values are the symplectic eigenvalues of alpha, each twice.
Matrix skew_form(const Matrix& alpha, const SymplecticSpace& space) {
  Matrix t = psd_sqrt(alpha, "symplectic spectrum");
  return t * space.form_inverse() * t;
}

void check_dims(const CovarianceMatrix& alpha, const SymplecticSpace& space,
                const char* what) {
  if (alpha.dim() != space.dim()) {
    throw InvalidInput(std::string(what) + ": covariance is " +
                       std::to_string(alpha.dim()) + "x" + std::to_string(alpha.dim()) +
                       " but the space has dimension " + std::to_string(space.dim()));
  }
}

}  // namespace

SymplecticSpace::SymplecticSpace(int modes) : modes_(modes) {
  if (modes < 1) {
    throw InvalidInput("symplectic space requires at least one mode");
  }
  delta_ = Matrix::Zero(2 * modes, 2 * modes);
  for (int j = 0; j < modes; ++j) {
    delta_(2 * j, 2 * j + 1) = 1.0;
    delta_(2 * j + 1, 2 * j) = -1.0;
  }
}

SymplecticSpace build_symplectic_form(int modes) { return SymplecticSpace(modes); }

CovarianceMatrix::CovarianceMatrix(Matrix entries) {
  if (entries.rows() != entries.cols() || entries.rows() == 0 ||
      entries.rows() % 2 != 0) {
    throw InvalidInput("covariance matrix must be square with even dimension");
  }
  const double scale = std::max(entries.norm(), 1.0);
  const double asym = (entries - entries.transpose()).norm();
  if (asym > tol::kSymmetry * scale) {
    throw InvalidInput("covariance matrix is not symmetric");
  }
  entries_ = 0.5 * (entries + entries.transpose());
}

SymplecticSpectrum symplectic_spectrum(const CovarianceMatrix& alpha,
                                       const SymplecticSpace& space) {
  check_dims(alpha, space, "symplectic spectrum");
  const Matrix k = skew_form(alpha.matrix(), space);

  // Eigenvalues of K'K are the squared symplectic eigenvalues, each with
  // multiplicity two; average each pair before the square root.
  Eigen::SelfAdjointEigenSolver<Matrix> es(k.transpose() * k);
  const Vector& sq = es.eigenvalues();  // ascending

  const int s = space.modes();
  Vector values(s);
  for (int j = 0; j < s; ++j) {
    const double pair = 0.5 * (sq(2 * (s - 1 - j)) + sq(2 * (s - 1 - j) + 1));
    values(j) = std::sqrt(std::max(pair, 0.0));
  }

  SymplecticSpectrum out;
  out.values = values;
  const double t = tol::kValidity * values(0);
  out.valid = values(s - 1) >= 0.5 - t;
  out.pure = out.valid && (values(0) - 0.5) <= t;
  return out;
}

SymplecticBasis symplectic_basis(const CovarianceMatrix& alpha,
                                 const SymplecticSpace& space) {
  check_dims(alpha, space, "symplectic basis");
  const int dim = space.dim();
  const int s = space.modes();

  Eigen::SelfAdjointEigenSolver<Matrix> alpha_es(alpha.matrix());
  if (alpha_es.eigenvalues()(0) <= 0.0) {
    throw InvalidInput("symplectic basis requires a positive definite matrix");
  }
  Vector root = alpha_es.eigenvalues().cwiseSqrt();
  const Matrix t = alpha_es.eigenvectors() * root.asDiagonal() *
                   alpha_es.eigenvectors().transpose();
  const Matrix t_inv = alpha_es.eigenvectors() * root.cwiseInverse().asDiagonal() *
                       alpha_es.eigenvectors().transpose();

  const Matrix k = t * space.form_inverse() * t;
  Eigen::SelfAdjointEigenSolver<Matrix> es(k.transpose() * k);
  const Vector& sq = es.eigenvalues();  // ascending, exact pairs
  const Matrix& vecs = es.eigenvectors();

  // Eigenvalues of K'K come in pairs (one per mode). Fold adjacent pairs
  // into mode values, then cluster near-equal modes so degenerate
  // eigenspaces are handled as a block.
  Vector mode_value(s);
  for (int j = 0; j < s; ++j) {
    mode_value(j) = std::sqrt(std::max(0.5 * (sq(2 * j) + sq(2 * j + 1)), 0.0));
  }
  if (!(mode_value(0) > 0.0)) {
    throw InvalidInput("symplectic basis requires a nonsingular matrix");
  }
  const double cluster_tol = 1e-8 * mode_value(s - 1);

  Matrix e = Matrix::Zero(dim, s);
  Matrix h = Matrix::Zero(dim, s);
  Vector values(s);
  int mode = 0;  // fills modes in descending eigenvalue order

  int hi = s - 1;
  while (hi >= 0) {
    int lo = hi;
    while (lo > 0 && mode_value(hi) - mode_value(lo - 1) <= cluster_tol) --lo;
    const int pairs = hi - lo + 1;
    const double value = mode_value.segment(lo, pairs).mean();

    // Orthogonal projector onto the cluster eigenspace; within it, pick
    // u-vectors by Gram-Schmidt over the canonical coordinate order and
    // complete each pair with v = K u / a.
    const Matrix basis = vecs.middleCols(2 * lo, 2 * pairs);
    const Matrix proj = basis * basis.transpose();

    std::vector<Vector> chosen;
    chosen.reserve(2 * pairs);
    int found = 0;
    for (int axis = 0; axis < dim && found < pairs; ++axis) {
      Vector cand = proj.col(axis);
      for (const Vector& q : chosen) cand -= q.dot(cand) * q;
      const double norm = cand.norm();
      if (norm < 1e-6) continue;
      Vector u = cand / norm;
      Vector v = k * u / value;
      for (const Vector& q : chosen) v -= q.dot(v) * q;
      v -= u.dot(v) * u;
      if (v.norm() < 1e-6) {
        throw InvalidInput("symplectic basis: pair completion failed");
      }
      v.normalize();
      chosen.push_back(u);
      chosen.push_back(v);

      const double scale = std::sqrt(value);
      e.col(mode) = scale * (t_inv * u);
      h.col(mode) = scale * (t_inv * v);
      values(mode) = value;
      ++mode;
      ++found;
    }
    if (found != pairs) {
      throw InvalidInput("symplectic basis: Gram-Schmidt selection failed");
    }
    hi = lo - 1;
  }

  SymplecticBasis out;
  out.e_vectors = std::move(e);
  out.h_vectors = std::move(h);
  out.values = std::move(values);
  return out;
}

Matrix SymplecticBasis::symplectic_matrix() const {
  const int dim = static_cast<int>(e_vectors.rows());
  const int s = static_cast<int>(e_vectors.cols());
  Matrix m(dim, dim);
  for (int j = 0; j < s; ++j) {
    m.col(2 * j) = e_vectors.col(j);
    m.col(2 * j + 1) = h_vectors.col(j);
  }
  return m;
}

ComplexStructure::ComplexStructure(Matrix entries, const SymplecticSpace& space) {
  if (entries.rows() != space.dim() || entries.cols() != space.dim()) {
    throw InvalidInput("complex structure has wrong dimensions");
  }
  const int dim = space.dim();
  const double j2_err =
      (entries * entries + Matrix::Identity(dim, dim)).norm();
  if (j2_err > tol::kStructure * dim) {
    throw InvalidInput("complex structure does not square to -I");
  }
  const Matrix dj = space.form() * entries;
  if ((dj - dj.transpose()).norm() > tol::kStructure * std::max(dj.norm(), 1.0)) {
    throw InvalidInput("form * J is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (dj + dj.transpose()));
  if (es.eigenvalues()(0) < -tol::kStructure * std::max(dj.norm(), 1.0)) {
    throw InvalidInput("form * J is not positive semidefinite");
  }
  entries_ = std::move(entries);
}

ComplexStructure complex_structure(const CovarianceMatrix& alpha,
                                   const SymplecticSpace& space) {
  check_dims(alpha, space, "complex structure");
  Eigen::SelfAdjointEigenSolver<Matrix> alpha_es(alpha.matrix());
  if (alpha_es.eigenvalues()(0) <= 0.0) {
    throw InvalidInput("complex structure requires a positive definite matrix");
  }
  Vector root = alpha_es.eigenvalues().cwiseSqrt();
  const Matrix t = alpha_es.eigenvectors() * root.asDiagonal() *
                   alpha_es.eigenvectors().transpose();
  const Matrix t_inv = alpha_es.eigenvectors() * root.cwiseInverse().asDiagonal() *
                       alpha_es.eigenvectors().transpose();

  // J = (-A^2)^(-1/2) A with A = Delta^{-1} alpha. Conjugating by
  // T = alpha^{1/2} turns A into the skew form K, where (-K^2) = K'K is
  // symmetric and the inverse square root is an eigendecomposition.
  const Matrix k = t * space.form_inverse() * t;
  Eigen::SelfAdjointEigenSolver<Matrix> es(k.transpose() * k);
  if (es.eigenvalues()(0) <= 0.0) {
    throw InvalidInput("complex structure: singular skew form");
  }
  const Matrix inv_root = es.eigenvectors() *
                          es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                          es.eigenvectors().transpose();
  Matrix j = t_inv * (inv_root * k) * t;
  return ComplexStructure(std::move(j), space);
}

CovarianceMatrix pure_covariance(const ComplexStructure& j,
                                 const SymplecticSpace& space) {
  if (j.dim() != space.dim()) {
    throw InvalidInput("pure covariance: dimension mismatch");
  }
  return CovarianceMatrix(0.5 * space.form() * j.matrix());
}

}  // namespace cvcap
