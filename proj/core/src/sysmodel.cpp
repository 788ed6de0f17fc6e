#include "strh2/sysmodel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "strh2/errors.hpp"
#include "strh2/linalg.hpp"

namespace strh2 {

namespace {

CMat weighted_sum(const std::vector<std::pair<CoefficientFunction, CMat>>& terms, Complex s,
                  bool derivative) {
  CMat acc = CMat::Zero(terms.front().second.rows(), terms.front().second.cols());
  for (const auto& [f, m] : terms) {
    const Complex w = derivative ? f.derivative().eval(s) : f.eval(s);
    if (w != Complex(0.0, 0.0)) acc += w * m;
  }
  return acc;
}

bool is_constant_coefficient(const CoefficientFunction& f, Complex* value) {
  std::vector<Complex> coeffs;
  if (!f.polynomial_coefficients(&coeffs)) return false;
  for (size_t k = 1; k < coeffs.size(); ++k)
    if (coeffs[k] != Complex(0.0, 0.0)) return false;
  if (value) *value = coeffs.empty() ? Complex(0.0, 0.0) : coeffs[0];
  return true;
}

void check_stable_eigenvalues(const CVec& values, double margin = 0.0) {
  for (Index i = 0; i < values.size(); ++i)
    if (!(values(i).real() < -margin)) throw UnstableSystem();
}

}  // namespace

// --- ParamSepModel ---

void ParamSepModel::validate() const {
  if (a_terms.empty() || b_terms.empty() || c_terms.empty())
    throw std::invalid_argument("every term list must be nonempty");
  const Index r = order(), m = inputs(), p = outputs();
  for (const auto& [f, mat] : a_terms)
    if (mat.rows() != r || mat.cols() != r) throw std::invalid_argument("A-term shape mismatch");
  for (const auto& [f, mat] : b_terms)
    if (mat.rows() != r || mat.cols() != m) throw std::invalid_argument("B-term shape mismatch");
  for (const auto& [f, mat] : c_terms)
    if (mat.rows() != p || mat.cols() != r) throw std::invalid_argument("C-term shape mismatch");
}

CMat ParamSepModel::assemble_a(Complex s) const { return weighted_sum(a_terms, s, false); }
CMat ParamSepModel::assemble_a_derivative(Complex s) const { return weighted_sum(a_terms, s, true); }
CMat ParamSepModel::assemble_b(Complex s) const { return weighted_sum(b_terms, s, false); }
CMat ParamSepModel::assemble_b_derivative(Complex s) const { return weighted_sum(b_terms, s, true); }
CMat ParamSepModel::assemble_c(Complex s) const { return weighted_sum(c_terms, s, false); }
CMat ParamSepModel::assemble_c_derivative(Complex s) const { return weighted_sum(c_terms, s, true); }

CMat ParamSepModel::transfer(Complex s) const {
  const PivotedLU lu(assemble_a(s));
  return assemble_c(s) * lu.solve(assemble_b(s), s);
}

CMat ParamSepModel::transfer_derivative(Complex s) const {
  const PivotedLU lu(assemble_a(s));
  const CMat x = lu.solve(assemble_b(s), s);
  const CMat xprime = lu.solve(assemble_b_derivative(s) - assemble_a_derivative(s) * x, s);
  return assemble_c_derivative(s) * x + assemble_c(s) * xprime;
}

// --- DiagonalStructuredROM ---

void DiagonalStructuredROM::validate() const {
  if (a_terms.empty()) throw std::invalid_argument("a_terms must be nonempty");
  const Index r = order();
  for (const auto& [f, d] : a_terms)
    if (d.size() != r) throw std::invalid_argument("diagonal length mismatch");
  if (B.rows() != r || C.cols() != r) throw std::invalid_argument("B/C shape mismatch");
}

CoefficientFunction DiagonalStructuredROM::denominator(Index l) const {
  std::vector<std::pair<Complex, CoefficientFunction>> terms;
  terms.reserve(a_terms.size());
  for (const auto& [f, d] : a_terms) terms.emplace_back(d(l), f);
  return CoefficientFunction::linear_combination(std::move(terms));
}

ParamSepModel DiagonalStructuredROM::to_param_sep() const {
  ParamSepModel out;
  for (const auto& [f, d] : a_terms) out.a_terms.emplace_back(f, CMat(d.asDiagonal()));
  out.b_terms.emplace_back(CoefficientFunction::constant(1.0), B);
  out.c_terms.emplace_back(CoefficientFunction::constant(1.0), C);
  return out;
}

CMat DiagonalStructuredROM::transfer(Complex s) const { return to_param_sep().transfer(s); }

CMat DiagonalStructuredROM::transfer_derivative(Complex s) const {
  return to_param_sep().transfer_derivative(s);
}

CMat pole_residue_sum(const DiagonalStructuredROM& rom, Complex s) {
  CMat acc = CMat::Zero(rom.outputs(), rom.inputs());
  for (Index l = 0; l < rom.order(); ++l)
    acc += rom.c(l) * rom.b(l).adjoint() / rom.denominator(l).eval(s);
  return acc;
}

// --- SecondOrderROM ---

void SecondOrderROM::validate() const {
  const Index r = order();
  if (r == 0) throw std::invalid_argument("empty second-order model");
  for (Index l = 0; l < r; ++l)
    if (!(damping(l) > 0.0) || !(stiffness(l) > 0.0))
      throw std::invalid_argument("damping and stiffness must be positive");
  if (B.rows() != r || C.cols() != r) throw std::invalid_argument("B/C shape mismatch");
}

ParamSepModel SecondOrderROM::to_param_sep() const {
  ParamSepModel out;
  const Index r = order();
  out.a_terms.emplace_back(CoefficientFunction::monomial(2), CMat::Identity(r, r));
  out.a_terms.emplace_back(CoefficientFunction::monomial(1), CMat(damping.cast<Complex>().asDiagonal()));
  out.a_terms.emplace_back(CoefficientFunction::constant(1.0), CMat(stiffness.cast<Complex>().asDiagonal()));
  out.b_terms.emplace_back(CoefficientFunction::constant(1.0), B.cast<Complex>());
  out.c_terms.emplace_back(CoefficientFunction::constant(1.0), C.cast<Complex>());
  return out;
}

CMat SecondOrderROM::transfer(Complex s) const { return to_param_sep().transfer(s); }
CMat SecondOrderROM::transfer_derivative(Complex s) const { return to_param_sep().transfer_derivative(s); }

SecondOrderFactors second_order_factorization(const SecondOrderROM& rom) {
  const Index r = rom.order();
  SecondOrderFactors out;
  out.lambda_plus.resize(r);
  out.lambda_minus.resize(r);
  for (Index l = 0; l < r; ++l) {
    const double e = rom.damping(l), k = rom.stiffness(l);
    const Complex disc = Complex(e * e - 4.0 * k, 0.0);
    const Complex root = std::sqrt(disc);
    Complex lp = 0.5 * (-e + root);
    Complex lm = 0.5 * (-e - root);
    if (lp.imag() < lm.imag() || (lp.imag() == lm.imag() && lp.real() < lm.real())) std::swap(lp, lm);
    const double scale = std::max({1.0, std::abs(lp), std::abs(lm)});
    if (!(std::abs(lp - lm) > 1e-8 * scale)) throw RepeatedRoot();
    // Factorization consistency: -(lp + lm) = e, lp*lm = k.
    if (std::abs(-(lp + lm) - Complex(e, 0.0)) > 1e-12 * std::max(1.0, e) ||
        std::abs(lp * lm - Complex(k, 0.0)) > 1e-12 * std::max(1.0, k))
      throw NoConvergence("quadratic factorization residual too large");
    out.lambda_plus(l) = lp;
    out.lambda_minus(l) = lm;
  }
  // Pairwise distinctness across all 2r roots.
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < r; ++j) {
      if (i == j) continue;
      const Complex a[2] = {out.lambda_plus(i), out.lambda_minus(i)};
      const Complex b[2] = {out.lambda_plus(j), out.lambda_minus(j)};
      for (Complex x : a)
        for (Complex y : b)
          if (std::abs(x - y) <= 1e-8 * std::max({1.0, std::abs(x), std::abs(y)}))
            throw CrossIndexCollision();
    }
  }
  return out;
}

// --- PHModel ---

void PHModel::validate() const {
  const Index r = order();
  if (r == 0 || J.cols() != r || R.rows() != r || R.cols() != r || B.rows() != r)
    throw std::invalid_argument("pH model shape mismatch");
  const double scale = std::max(1.0, J.norm());
  if ((J + J.transpose()).norm() > 1e-10 * scale)
    throw std::invalid_argument("J must be skew-symmetric");
  if ((R - R.transpose()).norm() > 1e-10 * std::max(1.0, R.norm()))
    throw std::invalid_argument("R must be symmetric");
  Eigen::SelfAdjointEigenSolver<RMat> es(R);
  if (es.info() != Eigen::Success || !(es.eigenvalues().minCoeff() > 0.0))
    throw std::invalid_argument("R must be positive definite");
  const Eigendecomposition eig = eig_sorted((J - R).cast<Complex>());
  check_stable_eigenvalues(eig.values);
}

ParamSepModel PHModel::to_param_sep() const {
  ParamSepModel out;
  const Index r = order();
  out.a_terms.emplace_back(CoefficientFunction::monomial(1), CMat::Identity(r, r));
  out.a_terms.emplace_back(CoefficientFunction::constant(-1.0), (J - R).cast<Complex>());
  out.b_terms.emplace_back(CoefficientFunction::constant(1.0), B.cast<Complex>());
  out.c_terms.emplace_back(CoefficientFunction::constant(1.0), B.transpose().cast<Complex>());
  return out;
}

CMat PHModel::transfer(Complex s) const { return to_param_sep().transfer(s); }
CMat PHModel::transfer_derivative(Complex s) const { return to_param_sep().transfer_derivative(s); }

PHModalData ph_modal_data(const PHModel& model, double normal_tol) {
  const RMat a = model.J - model.R;
  PHModalData out;
  out.normality = normality_defect(a);
  out.normal = out.normality <= normal_tol;

  Eigendecomposition eig = eig_sorted(a.cast<Complex>());
  require_separated(eig.values);
  out.lambda = eig.values;
  CMat t = eig.vectors;

  if (out.normal) {
    // Eigenvectors of a normal matrix with distinct eigenvalues are orthogonal;
    // Gram-Schmidt only removes rounding-level contamination.
    for (Index j = 0; j < t.cols(); ++j) {
      for (Index k = 0; k < j; ++k) t.col(j) -= t.col(k).dot(t.col(j)) * t.col(k);
      t.col(j) /= t.col(j).norm();
      for (Index i = 0; i < t.rows(); ++i) {
        if (std::abs(t(i, j)) > 1e-10) {
          t.col(j) *= std::abs(t(i, j)) / t(i, j);
          break;
        }
      }
    }
  }

  out.T = t;
  const PivotedLU lu(t.adjoint());
  out.S = lu.solve(CMat::Identity(t.rows(), t.cols()));

  const CMat bt = model.B.transpose().cast<Complex>();
  for (Index i = 0; i < t.cols(); ++i) {
    out.t.push_back(out.T.col(i));
    out.s.push_back(out.S.col(i));
    out.c.push_back(bt * out.T.col(i));
    out.b.push_back(bt * out.S.col(i));
  }
  return out;
}

// --- DelayROM ---

void DelayROM::validate(int branch_window) const {
  const Index r = order();
  if (r == 0 || sigma.size() != r) throw std::invalid_argument("mu/sigma length mismatch");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (B.rows() != r || C.cols() != r) throw std::invalid_argument("B/C shape mismatch");
  for (Index l = 0; l < r; ++l) delay_poles(mu(l), sigma(l), tau, branch_window);
}

CoefficientFunction DelayROM::denominator(Index l) const {
  return CoefficientFunction::linear_combination({
      {Complex(1.0, 0.0), CoefficientFunction::monomial(1)},
      {-mu(l), CoefficientFunction::monomial(0)},
      {-sigma(l), CoefficientFunction::exp_delay(tau)},
  });
}

DiagonalStructuredROM DelayROM::to_diagonal_structured() const {
  DiagonalStructuredROM out;
  const Index r = order();
  out.a_terms.emplace_back(CoefficientFunction::monomial(1), CVec::Ones(r));
  out.a_terms.emplace_back(CoefficientFunction::constant(-1.0), mu);
  out.a_terms.emplace_back(
      CoefficientFunction::linear_combination({{Complex(-1.0, 0.0), CoefficientFunction::exp_delay(tau)}}),
      sigma);
  out.B = B;
  out.C = C;
  return out;
}

ParamSepModel DelayROM::to_param_sep() const { return to_diagonal_structured().to_param_sep(); }

CMat DelayROM::transfer(Complex s) const { return to_param_sep().transfer(s); }
CMat DelayROM::transfer_derivative(Complex s) const { return to_param_sep().transfer_derivative(s); }

// --- StateSpaceFOM ---

void StateSpaceFOM::validate() const {
  const Index n = order();
  if (n == 0 || E.rows() != n || E.cols() != n || A.cols() != n || B.rows() != n || C.cols() != n)
    throw std::invalid_argument("state-space shape mismatch");
  if (has_delay()) {
    if (A_tau.rows() != n || A_tau.cols() != n) throw std::invalid_argument("A_tau shape mismatch");
    if (!(tau > 0.0)) throw std::invalid_argument("delay system requires tau > 0");
  }
  PivotedLU lu(E.cast<Complex>());
  if (lu.singular()) throw std::invalid_argument("E must be invertible");
}

CMat StateSpaceFOM::characteristic(Complex s) const {
  CMat m = s * E.cast<Complex>() - A.cast<Complex>();
  if (has_delay()) m -= std::exp(-tau * s) * A_tau.cast<Complex>();
  return m;
}

bool StateSpaceFOM::verify_stability(int grid_points) const {
  const PivotedLU elu(E.cast<Complex>());
  const CMat einv_a = elu.solve(A.cast<Complex>());
  if (!has_delay()) {
    Eigen::ComplexEigenSolver<CMat> es(einv_a, false);
    return es.info() == Eigen::Success && es.eigenvalues().real().maxCoeff() < 0.0;
  }
  // Delay case: spot-check sigma_min of the characteristic matrix along iR and
  // a closing line at the zero-magnitude bound.
  const CMat einv_atau = elu.solve(A_tau.cast<Complex>());
  const double bound = einv_a.norm() + einv_atau.norm() + 1.0;
  for (int k = 0; k <= grid_points; ++k) {
    const double w = -bound + 2.0 * bound * k / grid_points;
    if (smallest_singular_value(characteristic(Complex(0.0, w))) <= 1e-8) return false;
    if (smallest_singular_value(characteristic(Complex(bound * 0.5, w))) <= 1e-8) return false;
  }
  return true;
}

CMat StateSpaceFOM::transfer(Complex s) const {
  const PivotedLU lu(characteristic(s));
  return C.cast<Complex>() * lu.solve(B.cast<Complex>(), s);
}

CMat StateSpaceFOM::transfer_derivative(Complex s) const {
  const PivotedLU lu(characteristic(s));
  CMat mprime = E.cast<Complex>();
  if (has_delay()) mprime += tau * std::exp(-tau * s) * A_tau.cast<Complex>();
  const CMat x = lu.solve(B.cast<Complex>(), s);
  return -C.cast<Complex>() * lu.solve(mprime * x, s);
}

// --- SecondOrderFOM ---

void SecondOrderFOM::validate() const {
  const Index n = order();
  if (n == 0 || E.rows() != n || K.rows() != n || B.rows() != n || C.cols() != n)
    throw std::invalid_argument("second-order shape mismatch");
  PivotedLU lu(M.cast<Complex>());
  if (lu.singular()) throw std::invalid_argument("M must be invertible");
}

ParamSepModel SecondOrderFOM::to_param_sep() const {
  ParamSepModel out;
  out.a_terms.emplace_back(CoefficientFunction::monomial(2), M.cast<Complex>());
  out.a_terms.emplace_back(CoefficientFunction::monomial(1), E.cast<Complex>());
  out.a_terms.emplace_back(CoefficientFunction::constant(1.0), K.cast<Complex>());
  out.b_terms.emplace_back(CoefficientFunction::constant(1.0), B.cast<Complex>());
  out.c_terms.emplace_back(CoefficientFunction::constant(1.0), C.cast<Complex>());
  return out;
}

CMat SecondOrderFOM::transfer(Complex s) const { return to_param_sep().transfer(s); }
CMat SecondOrderFOM::transfer_derivative(Complex s) const { return to_param_sep().transfer_derivative(s); }

// --- diagonalization ---

namespace {

/// Folds parametric b/c term lists with constant coefficients into single
/// matrices; throws UnsupportedStructure for genuinely parametric B or C.
CMat fold_constant_terms(const std::vector<std::pair<CoefficientFunction, CMat>>& terms) {
  CMat acc = CMat::Zero(terms.front().second.rows(), terms.front().second.cols());
  for (const auto& [f, m] : terms) {
    Complex value;
    if (!is_constant_coefficient(f, &value))
      throw UnsupportedStructure("diagonalization requires s-independent B and C");
    acc += value * m;
  }
  return acc;
}

void verify_transfer_match(const ParamSepModel& original, const DiagonalStructuredROM& diag) {
  for (int k = 0; k < 8; ++k) {
    const Complex s(0.0, -7.0 + 2.1 * k);
    const CMat h0 = original.transfer(s);
    const CMat h1 = diag.transfer(s);
    const double scale = std::max(h0.norm(), 1e-300);
    if ((h0 - h1).norm() > 1e-8 * std::max(1.0, scale))
      throw NotDiagonalizable("transformed model does not reproduce the transfer function");
  }
}

}  // namespace

DiagonalizationResult to_diagonal(const ParamSepModel& model) {
  model.validate();
  const size_t q = model.a_terms.size();
  const Index r = model.order();

  CMat t;
  if (q == 1) {
    const Eigendecomposition eig = eig_sorted(model.a_terms[0].second);
    require_separated(eig.values);
    t = eig.vectors;
  } else {
    const PivotedLU lu1(model.a_terms[0].second);
    if (lu1.singular()) throw NotDiagonalizable("leading A-term is singular");
    const Eigendecomposition eig = eig_sorted(lu1.solve(model.a_terms[1].second));
    require_separated(eig.values);
    t = eig.vectors;
  }

  // S^* = (A_1 T)^{-1}, so S^* A_1 T = I.
  const PivotedLU lu_at(model.a_terms[0].second * t);
  if (lu_at.singular()) throw NotDiagonalizable();
  const CMat s_star = lu_at.solve(CMat::Identity(r, r));

  DiagonalizationResult out;
  out.T = t;
  out.S = s_star.adjoint();

  DiagonalStructuredROM rom;
  for (size_t i = 0; i < q; ++i) {
    const CMat transformed = s_star * model.a_terms[i].second * t;
    const CVec diag = transformed.diagonal();
    const double off = (transformed - CMat(diag.asDiagonal())).norm();
    if (off > 1e-10 * std::max(1.0, transformed.norm())) {
      if (q > 2) throw MoreThanTwoTerms();
      throw NotDiagonalizable();
    }
    rom.a_terms.emplace_back(model.a_terms[i].first, diag);
  }
  rom.B = s_star * fold_constant_terms(model.b_terms);
  rom.C = fold_constant_terms(model.c_terms) * t;
  out.rom = std::move(rom);

  verify_transfer_match(model, out.rom);
  return out;
}

DiagonalizationResult to_diagonal(const StateSpaceFOM& fom) {
  if (fom.has_delay())
    throw UnsupportedStructure("delay state-space models are not diagonalized here");
  ParamSepModel model;
  model.a_terms.emplace_back(CoefficientFunction::monomial(1), fom.E.cast<Complex>());
  model.a_terms.emplace_back(CoefficientFunction::constant(-1.0), fom.A.cast<Complex>());
  model.b_terms.emplace_back(CoefficientFunction::constant(1.0), fom.B.cast<Complex>());
  model.c_terms.emplace_back(CoefficientFunction::constant(1.0), fom.C.cast<Complex>());
  return to_diagonal(model);
}

PoleResidueForm pole_residue_form(const DiagonalStructuredROM& rom) {
  PoleResidueForm out;
  out.in = rom.inputs();
  out.out = rom.outputs();
  for (Index l = 0; l < rom.order(); ++l) {
    PoleResidueForm::Entry entry;
    entry.a = rom.denominator(l);
    std::vector<Complex> coeffs;
    if (!entry.a.polynomial_coefficients(&coeffs))
      throw UnsupportedStructure("pole_residue_form requires polynomial denominators");
    entry.poles.index = static_cast<int>(l);
    entry.poles.poles = polynomial_roots(coeffs);
    entry.poles.branches.assign(entry.poles.poles.size(), 0);
    const CoefficientFunction aprime = entry.a.derivative();
    for (const Complex& lambda : entry.poles.poles) {
      if (!(lambda.real() < 0.0)) throw UnstablePole(lambda);
      if (!(std::abs(aprime.eval(lambda)) > 1e-10 * (1.0 + std::abs(lambda)))) throw NotASimpleZero();
    }
    entry.b = rom.b(l);
    entry.c = rom.c(l);
    out.entries.push_back(std::move(entry));
  }
  return out;
}

}  // namespace strh2
