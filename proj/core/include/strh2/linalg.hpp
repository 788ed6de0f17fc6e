#pragma once

#include <memory>

#include <Eigen/LU>

#include "strh2/errors.hpp"
#include "strh2/types.hpp"

namespace strh2 {

/// LU factorization with the project-wide singularity convention:
/// a pivot below 1e-14 * ||A||_inf means the matrix is treated as singular.
class PivotedLU {
 public:
  explicit PivotedLU(const CMat& a);

  bool singular() const { return singular_; }
  /// Solve A X = B. Throws SingularAtPoint(tag) when the factorization is singular.
  CMat solve(const CMat& b, Complex tag = Complex(0, 0)) const;
  /// Solve A* X = B (conjugate transpose system, same factorization).
  CMat solve_adjoint(const CMat& b, Complex tag = Complex(0, 0)) const;

 private:
  std::shared_ptr<const Eigen::PartialPivLU<CMat>> lu_;
  bool singular_ = false;
};

/// Sorted eigendecomposition of a complex matrix.
/// Eigenvalues ordered by (Re, Im); eigenvectors unit 2-norm with the first
/// entry of magnitude > 1e-10*||v|| rotated to the positive real axis.
struct Eigendecomposition {
  CVec values;
  CMat vectors;  // columns
};

Eigendecomposition eig_sorted(const CMat& a);

/// Minimal pairwise separation of a set of complex numbers; infinity for size < 2.
double min_pairwise_separation(const CVec& values);

/// Diagonalizability guard used across the library: throws NotDiagonalizable
/// when min separation <= 1e-8 * max |lambda|.
void require_separated(const CVec& values, double rel_tol = 1e-8);

/// Smallest singular value via inverse power iteration on A*A (LU-based).
/// Returns 0 when the LU factorization is singular.
double smallest_singular_value(const CMat& a);

/// Frobenius norm of the commutator A A^T - A^T A relative to ||A||_F^2;
/// small values mean A is (numerically) normal. Real matrices only.
double normality_defect(const RMat& a);

}  // namespace strh2
