#pragma once

#include <string>
#include <variant>
#include <vector>

#include "strh2/h2metric.hpp"
#include "strh2/rng.hpp"
#include "strh2/sysmodel.hpp"
#include "strh2/wirtinger.hpp"

namespace strh2 {

enum class Structure { Unstructured, SecondOrder, PortHamiltonian, Delay };

Structure structure_from_string(const std::string& name);
std::string structure_to_string(Structure s);

using RomVariant = std::variant<DiagonalStructuredROM, SecondOrderROM, PHModel, DelayROM>;

ParamSepModel rom_param_sep(const RomVariant& rom);

/// Bijection between an unconstrained real vector theta and a feasible
/// structured model. Stability and positivity are enforced by construction
/// (log-parameterized pole real parts and damping/stiffness, Cholesky-squared
/// R); real systems use conjugate-paired pole/residue sets.
class Parameterization {
 public:
  /// `pairs` fixes the pole layout for the pole-parameterized structures:
  /// `pairs` conjugate pairs followed by r - 2*pairs real poles. The default
  /// -1 uses the maximal pairing floor(r/2). Conjugate-closed spectra of real
  /// systems split into these layout components; restart drivers should
  /// sweep them.
  Parameterization(Structure structure, Index r, Index m, Index p, double tau = 0.0,
                   Index pairs = -1);

  Structure structure() const { return structure_; }
  Index order() const { return r_; }
  Index inputs() const { return m_; }
  Index outputs() const { return p_; }
  Index pairs() const { return pairs_; }
  double tau() const { return tau_; }
  Index dim() const;

  RVec pack(const RomVariant& model) const;
  RomVariant unpack(const RVec& theta) const;

  /// Chain rule: theta-gradient from the term-matrix gradient bundle
  /// (real-parameter convention 2 Re(Wirtinger)).
  RVec chain_gradient(const RVec& theta, const GradientBundle& bundle) const;

  /// Seed used by the restart driver: poles mirrored log-spaced over the
  /// magnitude band [band_lo, band_hi], residues standard normal.
  RVec initial_theta(double band_lo, double band_hi, SplitMix64& rng) const;

  /// Moves theta along the residue scale orbit (c b^* invariant) to the
  /// balanced representative ||b|| = ||c|| per index. The model and the cost
  /// are unchanged; the Hessian conditioning improves by (||c||/||b||)^2.
  RVec gauge_balanced(RVec theta) const;

 private:
  Structure structure_;
  Index r_, m_, p_;
  double tau_;
  Index pairs_;   // conjugate pole pairs
  Index n_real_;  // trailing real pole slots, r - 2 * pairs
};

enum class Termination { GradientTolerance, MaxIterations, LineSearchFailure };

std::string termination_to_string(Termination t);

struct TraceRow {
  int iteration = 0;
  double cost = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct OptimizeResult {
  RomVariant model;
  std::vector<TraceRow> trace;
  Termination termination = Termination::MaxIterations;
  double final_cost = 0.0;
  double final_grad_norm = 0.0;
  int iterations = 0;
};

struct MinimizeOptions {
  int max_iterations = 500;
  double grad_tol = 1e-9;
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  int max_halvings = 60;
  bool bfgs = true;
  /// Damped-Newton polish of grad J = 0 once Armijo progress hits the cost
  /// noise floor; the descent phase alone cannot certify decreases below
  /// eps * J and would stall with the gradient above tight tolerances.
  bool polish = true;
  int polish_iterations = 60;
};

/// Armijo-backtracking descent (BFGS-accelerated) on J(theta). Steps whose
/// models are infeasible (delay pole leaving the left half-plane) cost +inf
/// and are rejected by the line search.
OptimizeResult minimize(const TransferEvaluator& h, const Parameterization& param,
                        const RVec& theta0, const FrequencyGrid& grid,
                        const MinimizeOptions& options = {});

struct RestartOptions {
  int restarts = 10;
  std::uint64_t seed = 1;
  double band_lo = 0.1;
  double band_hi = 10.0;
};

/// Runs `restarts` seeded initializations and returns the converged run with
/// the lowest cost (best overall run if none reaches the gradient tolerance).
OptimizeResult minimize_restarts(const TransferEvaluator& h, const Parameterization& param,
                                 const FrequencyGrid& grid, const MinimizeOptions& options,
                                 const RestartOptions& restart_options);

/// Pole-magnitude band of a FOM (eigenvalues of E^{-1}A; the delay term is
/// ignored for banding purposes).
std::pair<double, double> spectral_band(const StateSpaceFOM& fom);
std::pair<double, double> spectral_band(const SecondOrderFOM& fom);

}  // namespace strh2
