#pragma once

#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "strh2/types.hpp"

namespace strh2 {

/// Closed, differentiable algebra of the scalar coefficient functions that
/// multiply the constant matrices of a parameter-separable model.
///
/// Variants: Constant(c), Monomial(k) = s^k, ExpDelay(tau) = e^{-tau*s}, and a
/// flat LinearCombination of the first three with complex weights. Every
/// variant is entire in s and its derivative stays inside the algebra.
class CoefficientFunction {
 public:
  enum class Kind { Constant, Monomial, ExpDelay, LinearCombination };

  CoefficientFunction() = default;  // Constant(0)

  static CoefficientFunction constant(Complex c);
  static CoefficientFunction monomial(int exponent);
  static CoefficientFunction exp_delay(double tau);
  /// Builds a flat combination; nested combinations are distributed into their
  /// atoms, exact-zero weights dropped. An (effectively) empty list collapses
  /// to Constant(0).
  static CoefficientFunction linear_combination(
      std::vector<std::pair<Complex, CoefficientFunction>> terms);

  Kind kind() const { return kind_; }
  Complex constant_value() const { return constant_; }
  int exponent() const { return exponent_; }
  double delay() const { return delay_; }
  const std::vector<std::pair<Complex, CoefficientFunction>>& terms() const { return terms_; }

  Complex eval(Complex s) const;
  Complex operator()(Complex s) const { return eval(s); }

  /// Exact symbolic derivative (stays in the algebra).
  CoefficientFunction derivative() const;

  /// The conjugate-flip g(s) = conj(f(conj(s))): conjugates constants and
  /// weights, keeps Monomial and ExpDelay tags.
  CoefficientFunction conj_flip() const;

  /// True when the function only involves Constant/Monomial atoms; fills
  /// ascending power coefficients (c0 + c1 s + ...) if requested.
  bool polynomial_coefficients(std::vector<Complex>* coeffs = nullptr) const;

  nlohmann::json to_json() const;
  static CoefficientFunction from_json(const nlohmann::json& j);

 private:
  Kind kind_ = Kind::Constant;
  Complex constant_{0.0, 0.0};
  int exponent_ = 0;
  double delay_ = 0.0;
  std::vector<std::pair<Complex, CoefficientFunction>> terms_;
};

/// f + g and w*f convenience builders (flat results).
CoefficientFunction operator+(const CoefficientFunction& f, const CoefficientFunction& g);
CoefficientFunction operator*(Complex w, const CoefficientFunction& f);

}  // namespace strh2
