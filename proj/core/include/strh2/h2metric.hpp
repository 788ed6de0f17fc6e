#pragma once

#include <vector>

#include "strh2/sysmodel.hpp"
#include "strh2/types.hpp"

namespace strh2 {

/// Quadrature grid for integrals over the imaginary axis: symmetric nodes
/// omega_k with positive weights, plus a conservative decay-based tail factor.
struct FrequencyGrid {
  RVec nodes;             // strictly increasing, symmetric about 0
  RVec weights;           // positive
  double tail_bound = 0;  // unit-amplitude tail mass outside the resolved core
  double scale = 1.0;     // substitution half-width Omega
  int decay_order = 2;    // assumed |integrand| = O(omega^-decay_order)

  void validate() const;
};

/// tan-substituted midpoint rule mapping (-inf, inf) onto N interior angles:
/// omega = Omega tan(theta). N must be even and >= 16.
FrequencyGrid build_grid(double half_width, int n_nodes, int decay_order);

/// The library-wide default recipe: Omega = 10x the largest pole magnitude.
FrequencyGrid default_grid(double max_pole_magnitude, int n_nodes = 1024, int decay_order = 2);

struct QuadratureResult {
  double value = 0.0;
  double uncertainty = 0.0;  // estimated tail of the un-resolved integrand
};

/// (1/2pi) sum_k w_k ||H(i w_k) - Hhat(i w_k)||_F^2 with a decay-based
/// uncertainty estimate.
QuadratureResult h2_error_quadrature(const TransferEvaluator& h, const TransferEvaluator& hhat,
                                     const FrequencyGrid& grid);

/// Same functional evaluated from precomputed samples of both systems.
QuadratureResult h2_error_quadrature(const std::vector<CMat>& h_samples,
                                     const std::vector<CMat>& hhat_samples,
                                     const FrequencyGrid& grid);

/// H2 norm via the controllability Gramian of (E^{-1}A, E^{-1}B):
/// sqrt(trace(C P C^T)) with A P + P A^T + B B^T = 0. Dense Kronecker solve
/// for n <= 64, eigendecomposition-based solve beyond.
/// Throws UnstableSystem when any eigenvalue has Re >= -1e-12.
double h2_norm_gramian(const StateSpaceFOM& fom);

/// Residue-summed inner product <H, G> = (1/2pi) int trace(H(iw)^* G(iw)) dw
/// for G in pole-residue form with simple stable rational poles
/// (conjugate-linear in the first argument).
Complex h2_inner_rational(const PoleResidueForm& g, const TransferEvaluator& h);

/// Quadrature counterpart of h2_inner_rational, same convention.
Complex h2_inner_quadrature(const TransferEvaluator& f, const TransferEvaluator& g,
                            const FrequencyGrid& grid);

/// Samples H(i omega_k) over the grid (parallel over nodes).
std::vector<CMat> eval_on_grid(const TransferEvaluator& h, const FrequencyGrid& grid);

}  // namespace strh2
