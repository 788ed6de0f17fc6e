#include "strh2/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace strh2 {

namespace {

double inf_norm(const CMat& a) {
  double best = 0.0;
  for (Index i = 0; i < a.rows(); ++i) best = std::max(best, a.row(i).cwiseAbs().sum());
  return best;
}

}  // namespace

PivotedLU::PivotedLU(const CMat& a) {
  auto lu = std::make_shared<Eigen::PartialPivLU<CMat>>(a);
  const double scale = inf_norm(a);
  double min_pivot = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < a.rows(); ++i) min_pivot = std::min(min_pivot, std::abs(lu->matrixLU()(i, i)));
  singular_ = !(min_pivot > 1e-14 * std::max(scale, 1e-300));
  lu_ = std::move(lu);
}

CMat PivotedLU::solve(const CMat& b, Complex tag) const {
  if (singular_) throw SingularAtPoint(tag);
  return lu_->solve(b);
}

CMat PivotedLU::solve_adjoint(const CMat& b, Complex tag) const {
  if (singular_) throw SingularAtPoint(tag);
  return lu_->adjoint().solve(b);
}

Eigendecomposition eig_sorted(const CMat& a) {
  Eigen::ComplexEigenSolver<CMat> solver(a, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) throw NotDiagonalizable("eigensolver failed to converge");
  const Index n = a.rows();
  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const CVec& vals = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&](Index i, Index j) {
    if (vals(i).real() != vals(j).real()) return vals(i).real() < vals(j).real();
    return vals(i).imag() < vals(j).imag();
  });

  Eigendecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.values(k) = vals(order[static_cast<size_t>(k)]);
    CVec v = solver.eigenvectors().col(order[static_cast<size_t>(k)]);
    const double nrm = v.norm();
    if (nrm > 0) v /= nrm;
    // Rotate the first non-negligible entry onto the positive real axis.
    for (Index i = 0; i < n; ++i) {
      if (std::abs(v(i)) > 1e-10) {
        v *= std::abs(v(i)) / v(i);
        break;
      }
    }
    out.vectors.col(k) = v;
  }
  return out;
}

double min_pairwise_separation(const CVec& values) {
  const Index n = values.size();
  if (n < 2) return std::numeric_limits<double>::infinity();
  double sep = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) sep = std::min(sep, std::abs(values(i) - values(j)));
  return sep;
}

void require_separated(const CVec& values, double rel_tol) {
  if (values.size() < 2) return;
  const double scale = values.cwiseAbs().maxCoeff();
  if (!(min_pairwise_separation(values) > rel_tol * std::max(scale, 1e-300)))
    throw NotDiagonalizable();
}

double smallest_singular_value(const CMat& a) {
  PivotedLU lu(a);
  if (lu.singular()) return 0.0;
  // Inverse power iteration on A^* A: v <- A^{-1} A^{-*} v.
  CVec v = CVec::Ones(a.rows());
  v /= v.norm();
  double sigma = 0.0;
  for (int it = 0; it < 30; ++it) {
    CVec w = lu.solve(lu.solve_adjoint(v));
    const double growth = w.norm();
    if (!(growth > 0) || !std::isfinite(growth)) return 0.0;
    v = w / growth;
    const double next = 1.0 / std::sqrt(growth);
    if (it > 2 && std::abs(next - sigma) <= 1e-10 * next) return next;
    sigma = next;
  }
  return sigma;
}

double normality_defect(const RMat& a) {
  const RMat comm = a * a.transpose() - a.transpose() * a;
  const double denom = std::max(a.squaredNorm(), 1e-300);
  return comm.norm() / denom;
}

}  // namespace strh2
