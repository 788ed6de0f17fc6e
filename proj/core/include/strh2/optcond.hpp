#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "strh2/h2metric.hpp"
#include "strh2/sysmodel.hpp"

namespace strh2 {

/// One evaluated necessary condition: left side minus right side, normalized
/// by |LHS| + |RHS| + 1e-30.
struct ConditionRecord {
  std::string condition_id;
  int index = -1;        // l or i
  int index2 = -1;       // j for pairwise / branch-indexed records
  double absolute = 0.0;
  double relative = 0.0;
  double scale = 0.0;
};

struct ConditionReport {
  std::string structure;
  std::vector<ConditionRecord> records;
  int branch_window = 0;        // delay reports
  double truncation_tail = 0.0; // delay reports: relative weight of the last branch

  bool pass(double tolerance) const;
  double max_relative() const;
  const ConditionRecord* find(const std::string& condition_id, int index = -1, int index2 = -1) const;

  nlohmann::json to_json() const;
  std::string to_table() const;
};

/// Classical bitangential Hermite conditions at the mirrored poles of a ROM in
/// s - lambda form (monic denominators required): 3r records.
ConditionReport residual_unstructured(const TransferEvaluator& h, const DiagonalStructuredROM& rom);

/// Integral stationarity residuals of the parameter-separable model, one
/// matrix record per term; independent quadrature path whose norms equal the
/// gradient norms.
ConditionReport residual_l2_stationarity(const TransferEvaluator& h, const ParamSepModel& rom,
                                         const FrequencyGrid& grid);

/// General diagonal-denominator conditions: per index one right- and one
/// left-tangential record plus one Hermite-type record per A-term.
ConditionReport residual_general_diag(const TransferEvaluator& h, const DiagonalStructuredROM& rom,
                                      const std::vector<PoleSet>& pole_sets);

/// Modally damped second-order conditions (difference interpolation plus two
/// Hermite conditions per index): 4r records.
ConditionReport residual_second_order(const TransferEvaluator& h, const SecondOrderROM& rom);

/// The same conditions phrased through the 2-variable difference transfer
/// function G(s1, s2) = H(s1) - H(s2); record-for-record equal to
/// residual_second_order.
ConditionReport residual_second_order_2d(const TransferEvaluator& h, const SecondOrderROM& rom);

/// Port-Hamiltonian conditions: all ordered pairwise difference records,
/// per-index Hermite records, the eigenvector-weighted tangential matrix
/// record, and (when J - R is numerically normal) the realization-independent
/// records plus their G = H + H^* restatement.
ConditionReport residual_ph(const TransferEvaluator& h, const PHModel& model,
                            double normal_tol = 1e-8);

/// Delay conditions with truncated branch sums. branch_window < 0 requests the
/// adaptive window (grow until the newest branch weight falls below 1e-10 of
/// the running sum; cap 64 -> TruncationNotConverged).
ConditionReport residual_delay(const TransferEvaluator& h, const DelayROM& rom,
                               int branch_window = -1);

/// Helper: per-index pole sets of a polynomial-denominator diagonal ROM.
std::vector<PoleSet> compute_pole_sets(const DiagonalStructuredROM& rom);

}  // namespace strh2
