#pragma once

#include <vector>

#include "strh2/h2metric.hpp"
#include "strh2/sysmodel.hpp"

namespace strh2 {

/// Wirtinger gradients of the squared error with respect to the conjugated
/// term matrices of a parameter-separable model, one matrix per term, plus the
/// cost value they were computed against.
struct GradientBundle {
  std::vector<CMat> dA;  // per A_i, r x r
  std::vector<CMat> dB;  // per B_j, r x m
  std::vector<CMat> dC;  // per C_k, p x r
  double cost = 0.0;
  int grid_nodes = 0;
  double grid_scale = 0.0;

  double norm() const;
};

/// Quadrature evaluation of the gradient integrals
///   dA_i = int conj(alpha_i) X_d (H - Hhat) X^*   (note the sign),
///   dB_j = int conj(beta_j)  X_d (Hhat - H),
///   dC_k = int conj(gamma_k) (Hhat - H) X^*,
/// with X = A^{-1} B, X_d = A^{-*} C^* solved per node, measure w_k / (2 pi).
GradientBundle gradients(const TransferEvaluator& h, const ParamSepModel& rom,
                         const FrequencyGrid& grid);
GradientBundle gradients(const std::vector<CMat>& h_samples, const ParamSepModel& rom,
                         const FrequencyGrid& grid);

/// Restriction to diagonal A-matrices: zeroes all off-diagonal entries of
/// every dA; dB and dC pass through.
GradientBundle diag_restrict(GradientBundle bundle);

/// Structure gradient of a port-Hamiltonian model: the ambient real gradient
/// with respect to A = J - R and the two-term gradient with respect to B
/// (B enters the input and output maps simultaneously). Real-parameter
/// convention: 2 Re(Wirtinger gradient).
struct PHGradient {
  RMat dJR;
  RMat dB;
  double cost = 0.0;
};

PHGradient ph_gradient(const TransferEvaluator& h, const PHModel& model, const FrequencyGrid& grid);
PHGradient ph_gradient(const std::vector<CMat>& h_samples, const PHModel& model,
                       const FrequencyGrid& grid);

/// Cost alone (same quadrature pairing as the gradients).
double quadrature_cost(const std::vector<CMat>& h_samples, const ParamSepModel& rom,
                       const FrequencyGrid& grid);

}  // namespace strh2
