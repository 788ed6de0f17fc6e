#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "strh2/scalarfun.hpp"
#include "strh2/spectra.hpp"
#include "strh2/types.hpp"

namespace strh2 {

/// Anything that yields H(s) and H'(s) on the closed right half-plane.
class TransferEvaluator {
 public:
  virtual ~TransferEvaluator() = default;
  virtual CMat eval(Complex s) const = 0;
  virtual CMat eval_derivative(Complex s) const = 0;
  virtual Index outputs() const = 0;
  virtual Index inputs() const = 0;
};

/// Reduced model in parameter-separable form:
/// A(s) = sum_i alpha_i(s) A_i, B(s) = sum_j beta_j(s) B_j, C(s) = sum_k gamma_k(s) C_k,
/// H(s) = C(s) A(s)^{-1} B(s).
struct ParamSepModel {
  std::vector<std::pair<CoefficientFunction, CMat>> a_terms;  // r x r each
  std::vector<std::pair<CoefficientFunction, CMat>> b_terms;  // r x m each
  std::vector<std::pair<CoefficientFunction, CMat>> c_terms;  // p x r each

  Index order() const { return a_terms.empty() ? 0 : a_terms.front().second.rows(); }
  Index inputs() const { return b_terms.empty() ? 0 : b_terms.front().second.cols(); }
  Index outputs() const { return c_terms.empty() ? 0 : c_terms.front().second.rows(); }

  void validate() const;

  CMat assemble_a(Complex s) const;
  CMat assemble_a_derivative(Complex s) const;
  CMat assemble_b(Complex s) const;
  CMat assemble_b_derivative(Complex s) const;
  CMat assemble_c(Complex s) const;
  CMat assemble_c_derivative(Complex s) const;

  /// C(s) A(s)^{-1} B(s) through one linear solve; throws SingularAtPoint.
  CMat transfer(Complex s) const;
  /// Exact analytic derivative via the product rule (two solves with one factorization).
  CMat transfer_derivative(Complex s) const;
};

/// Parameter-separable model whose A-terms are all diagonal; carries the
/// per-index denominators a_l(s) = sum_i alpha_i(s) (A_i)_{ll} and the
/// pole-residue data b_l (row l of B, conjugated) and c_l (column l of C).
struct DiagonalStructuredROM {
  std::vector<std::pair<CoefficientFunction, CVec>> a_terms;  // diagonals, length r
  CMat B;  // r x m
  CMat C;  // p x r

  Index order() const { return a_terms.empty() ? 0 : a_terms.front().second.size(); }
  Index inputs() const { return B.cols(); }
  Index outputs() const { return C.rows(); }

  void validate() const;

  CoefficientFunction denominator(Index l) const;
  CVec b(Index l) const { return B.row(l).adjoint(); }
  CVec c(Index l) const { return C.col(l); }

  ParamSepModel to_param_sep() const;
  CMat transfer(Complex s) const;
  CMat transfer_derivative(Complex s) const;
};

/// Independent route to the transfer value: sum_l c_l b_l^* / a_l(s).
CMat pole_residue_sum(const DiagonalStructuredROM& rom, Complex s);

/// Modally damped second-order model  x'' + diag(e) x' + diag(k) x = B u,
/// y = C x, with e, k > 0 entrywise (unit mass matrix).
struct SecondOrderROM {
  RVec damping;    // e
  RVec stiffness;  // k
  RMat B;          // r x m
  RMat C;          // p x r

  Index order() const { return damping.size(); }
  Index inputs() const { return B.cols(); }
  Index outputs() const { return C.rows(); }

  void validate() const;
  ParamSepModel to_param_sep() const;
  CMat transfer(Complex s) const;
  CMat transfer_derivative(Complex s) const;
};

/// Quadratic factor roots per index: s^2 + e_l s + k_l = (s - lp_l)(s - lm_l),
/// ordered Im(lp) >= Im(lm) with ties broken by Re. All 2r roots must be
/// pairwise distinct.
struct SecondOrderFactors {
  CVec lambda_plus;
  CVec lambda_minus;
};

SecondOrderFactors second_order_factorization(const SecondOrderROM& rom);

/// Port-Hamiltonian model  x' = (J - R) x + B u,  y = B^T x,
/// with J skew-symmetric and R symmetric positive definite.
struct PHModel {
  RMat J;
  RMat R;
  RMat B;

  Index order() const { return J.rows(); }
  Index inputs() const { return B.cols(); }
  Index outputs() const { return B.cols(); }

  void validate() const;
  ParamSepModel to_param_sep() const;
  CMat transfer(Complex s) const;
  CMat transfer_derivative(Complex s) const;
};

/// Modal data of J - R per the pole-residue factorization of the pH transfer
/// function: columns t_i of T, s_i of S = T^{-*}, c_i = B^T t_i, b_i = B^T s_i.
struct PHModalData {
  CVec lambda;
  CMat T;
  CMat S;
  std::vector<CVec> b;
  std::vector<CVec> c;
  std::vector<CVec> t;
  std::vector<CVec> s;
  bool normal = false;          // J - R numerically normal => T unitary, c_i = b_i
  double normality = 0.0;       // commutator defect
};

PHModalData ph_modal_data(const PHModel& model, double normal_tol = 1e-8);

/// Diagonal single-delay model: denominators a_l(s) = s - mu_l - sigma_l e^{-tau s}.
struct DelayROM {
  CVec mu;
  CVec sigma;
  double tau = 0.0;
  CMat B;  // r x m
  CMat C;  // p x r

  Index order() const { return mu.size(); }
  Index inputs() const { return B.cols(); }
  Index outputs() const { return C.rows(); }

  /// Structural checks plus pole stability over a branch window.
  void validate(int branch_window = 4) const;
  CoefficientFunction denominator(Index l) const;
  DiagonalStructuredROM to_diagonal_structured() const;
  ParamSepModel to_param_sep() const;
  CMat transfer(Complex s) const;
  CMat transfer_derivative(Complex s) const;
};

/// Full-order state-space model  E x' = A x + A_tau x(t - tau) + B u, y = C x.
/// A_tau empty means no delay term.
struct StateSpaceFOM {
  RMat E;
  RMat A;
  RMat A_tau;  // empty when delay-free
  double tau = 0.0;
  RMat B;
  RMat C;

  Index order() const { return A.rows(); }
  Index inputs() const { return B.cols(); }
  Index outputs() const { return C.rows(); }
  bool has_delay() const { return A_tau.size() > 0; }

  void validate() const;
  /// Smallest-singular-value sampling of the characteristic matrix along a
  /// frequency grid (and for the delay-free case, an exact eigenvalue check).
  bool verify_stability(int grid_points = 400) const;

  CMat characteristic(Complex s) const;  // s E - A - e^{-tau s} A_tau
  CMat transfer(Complex s) const;
  CMat transfer_derivative(Complex s) const;
};

/// Full-order second-order model  M x'' + E x' + K x = B u, y = C x.
struct SecondOrderFOM {
  RMat M;
  RMat E;
  RMat K;
  RMat B;
  RMat C;

  Index order() const { return M.rows(); }
  Index inputs() const { return B.cols(); }
  Index outputs() const { return C.rows(); }

  void validate() const;
  ParamSepModel to_param_sep() const;
  CMat transfer(Complex s) const;
  CMat transfer_derivative(Complex s) const;
};

struct DiagonalizationResult {
  DiagonalStructuredROM rom;
  CMat T;
  CMat S;  // S^* A_1 T = I
};

/// Joint diagonalization of the A-terms (q <= 2 generically; more terms are
/// accepted only when the pencil transformation happens to diagonalize them all).
DiagonalizationResult to_diagonal(const ParamSepModel& model);
/// Delay-free state-space pencil (E, A) to the classical s - lambda form.
DiagonalizationResult to_diagonal(const StateSpaceFOM& fom);

/// Pole-residue data consumed by the residue-based inner product: per index,
/// the denominator a_l with its zeros, and the residue directions b_l, c_l.
struct PoleResidueForm {
  struct Entry {
    CoefficientFunction a;
    PoleSet poles;
    CVec b;
    CVec c;
  };
  std::vector<Entry> entries;
  Index in = 0;
  Index out = 0;
};

/// Builds the pole-residue form of a DiagonalStructuredROM whose denominators
/// are polynomials (rational case); throws UnsupportedStructure otherwise.
PoleResidueForm pole_residue_form(const DiagonalStructuredROM& rom);

// --- evaluator adapters ---

template <class Model>
class ModelEvaluator final : public TransferEvaluator {
 public:
  explicit ModelEvaluator(Model model) : model_(std::move(model)) {}
  CMat eval(Complex s) const override { return model_.transfer(s); }
  CMat eval_derivative(Complex s) const override { return model_.transfer_derivative(s); }
  Index outputs() const override { return model_.outputs(); }
  Index inputs() const override { return model_.inputs(); }
  const Model& model() const { return model_; }

 private:
  Model model_;
};

template <class Model>
std::shared_ptr<TransferEvaluator> make_evaluator(Model model) {
  return std::make_shared<ModelEvaluator<Model>>(std::move(model));
}

class ZeroTransfer final : public TransferEvaluator {
 public:
  ZeroTransfer(Index p, Index m) : p_(p), m_(m) {}
  CMat eval(Complex) const override { return CMat::Zero(p_, m_); }
  CMat eval_derivative(Complex) const override { return CMat::Zero(p_, m_); }
  Index outputs() const override { return p_; }
  Index inputs() const override { return m_; }

 private:
  Index p_, m_;
};

/// Black-box evaluator wrapping value/derivative callbacks.
class CallbackTransfer final : public TransferEvaluator {
 public:
  using Fn = std::function<CMat(Complex)>;
  CallbackTransfer(Fn value, Fn deriv, Index p, Index m)
      : value_(std::move(value)), deriv_(std::move(deriv)), p_(p), m_(m) {}
  CMat eval(Complex s) const override { return value_(s); }
  CMat eval_derivative(Complex s) const override { return deriv_(s); }
  Index outputs() const override { return p_; }
  Index inputs() const override { return m_; }

 private:
  Fn value_, deriv_;
  Index p_, m_;
};

}  // namespace strh2
