// SPDX-License-Identifier: Apache-2.0

#ifndef CVCAP_SYMPLECTIC_HPP
#define CVCAP_SYMPLECTIC_HPP

#include <Eigen/Dense>

#include "cvcap/errors.hpp"

namespace cvcap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace tol {
// Relative symmetry slack accepted when constructing a covariance matrix.
inline constexpr double kSymmetry = 1e-10;
// Validity/purity slack, relative to the largest symplectic eigenvalue.
inline constexpr double kValidity = 1e-9;
// Slack for structural identities (J^2 = -I, basis relations, commutators).
inline constexpr double kStructure = 1e-10;
}  // namespace tol

/// Phase space of s bosonic modes with the canonical symplectic form,
/// block-diagonal in [[0,1],[-1,0]] blocks. Satisfies form()^2 = -I.
class SymplecticSpace {
 public:
  explicit SymplecticSpace(int modes);

  int modes() const { return modes_; }
  int dim() const { return 2 * modes_; }
  const Matrix& form() const { return delta_; }
  /// Inverse of the form; equals -form() since the form squares to -I.
  Matrix form_inverse() const { return -delta_; }

 private:
  int modes_;
  Matrix delta_;
};

/// Builds the canonical symplectic form for s modes. Rejects s < 1.
SymplecticSpace build_symplectic_form(int modes);

/// Real symmetric second-moment matrix. The constructor symmetrizes the
/// input and rejects it when the asymmetry exceeds tol::kSymmetry
/// relative to the matrix norm. Quantum validity is a property of the
/// pair (matrix, symplectic form) and is checked by symplectic_spectrum.
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(Matrix entries);

  const Matrix& matrix() const { return entries_; }
  int dim() const { return static_cast<int>(entries_.rows()); }
  int modes() const { return dim() / 2; }

 private:
  Matrix entries_;
};

struct SymplecticSpectrum {
  Vector values;  // one per mode, sorted descending
  bool valid;     // min value >= 1/2 within tolerance
  bool pure;      // all values equal 1/2 within tolerance
};

/// Moduli of the eigenvalues of form_inverse * alpha, one per mode.
/// Validity means every value is at least 1/2 (uncertainty relation);
/// purity means every value equals 1/2. Rejects asymmetric or
/// negative-definite input.
SymplecticSpectrum symplectic_spectrum(const CovarianceMatrix& alpha,
                                       const SymplecticSpace& space);

/// Basis {e_j, h_j} adapted to a positive definite alpha: with
/// A = form_inverse * alpha,
///
///   A e_j = a_j h_j,   A h_j = -a_j e_j,
///   e_j' alpha e_k = h_j' alpha h_k = a_j d_jk,   e_j' alpha h_k = 0,
///   e_j' form h_k = d_jk,   e_j' form e_k = h_j' form h_k = 0.
///
/// Columns of symplectic_matrix() are e_1 h_1 e_2 h_2 ...; the matrix S
/// satisfies S' form S = form and S' alpha S = diag(a_1,a_1,...,a_s,a_s).
struct SymplecticBasis {
  Matrix e_vectors;  // dim x modes, column j = e_j
  Matrix h_vectors;  // dim x modes, column j = h_j
  Vector values;     // a_j, sorted descending

  Matrix symplectic_matrix() const;
};

/// Computes the adapted basis for positive definite alpha. Degenerate
/// eigenvalue groups are resolved by Gram-Schmidt over the canonical
/// coordinate order, so the output is reproducible across runs.
SymplecticBasis symplectic_basis(const CovarianceMatrix& alpha,
                                 const SymplecticSpace& space);

/// Real operator J with J^2 = -I and form*J symmetric positive
/// semidefinite. The constructor enforces both within tol::kStructure.
class ComplexStructure {
 public:
  ComplexStructure(Matrix entries, const SymplecticSpace& space);

  const Matrix& matrix() const { return entries_; }
  int dim() const { return static_cast<int>(entries_.rows()); }

 private:
  Matrix entries_;
};

/// Orthogonal factor of the polar decomposition of A = form_inverse*alpha
/// in the alpha metric: J = (-A^2)^(-1/2) A. Commutes with A; acts on the
/// adapted basis as J e_j = h_j, J h_j = -e_j. Requires alpha positive
/// definite.
ComplexStructure complex_structure(const CovarianceMatrix& alpha,
                                   const SymplecticSpace& space);

/// Covariance (1/2) * form * J of the pure state attached to a complex
/// structure. Every symplectic eigenvalue of the result equals 1/2.
CovarianceMatrix pure_covariance(const ComplexStructure& j,
                                 const SymplecticSpace& space);

}  // namespace cvcap

#endif  // CVCAP_SYMPLECTIC_HPP
