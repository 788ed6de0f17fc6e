#pragma once

#include <functional>

#include "strh2/types.hpp"

namespace strh2::detail {

/// Worker cap: min(hardware threads, STRH2_THREADS when set). At least 1.
int thread_cap();

/// Parallel map over [0, n): fn(k) must write only to slot k of its output.
/// Deterministic by construction (no shared accumulation).
void parallel_for(Index n, const std::function<void(Index)>& fn);

/// Compensated (Kahan) scalar accumulator.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Entrywise-compensated accumulator for complex matrices.
class KahanMatrixSum {
 public:
  explicit KahanMatrixSum(Index rows, Index cols)
      : sum_(CMat::Zero(rows, cols)), comp_(CMat::Zero(rows, cols)) {}
  void add(const CMat& x) {
    const CMat y = x - comp_;
    const CMat t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  const CMat& value() const { return sum_; }

 private:
  CMat sum_;
  CMat comp_;
};

}  // namespace strh2::detail
