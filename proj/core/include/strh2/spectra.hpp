#pragma once

#include <functional>
#include <vector>

#include "strh2/scalarfun.hpp"
#include "strh2/types.hpp"

namespace strh2 {

/// Zeros of one structured denominator a_l. All poles are simple and stable;
/// branch labels are the Lambert-W branch indices for delay poles, 0 otherwise.
struct PoleSet {
  int index = 0;
  std::vector<Complex> poles;
  std::vector<int> branches;
  int branch_window = 0;
  double tail_estimate = 0.0;
};

/// Roots of c[0] + c[1] s + ... + c[n] s^n via the companion matrix, Newton
/// polished; sorted by (Re, Im).
/// Throws DegenerateLeadingCoefficient when |c[n]| <= 1e-12 * max|c|.
std::vector<Complex> polynomial_roots(const std::vector<Complex>& coeffs);

/// Branch j of the Lambert W function: w e^w = z with the standard branch
/// convention (principal branch j = 0; the second real branch on (-1/e, 0) is
/// j = -1). Relative residual below 1e-12.
Complex lambert_w(int branch, Complex z);

/// All poles of a(s) = s - mu - sigma e^{-tau s} for branches j in [-J, J],
/// each verified against a(lambda) = 0 to 1e-10 and checked stable.
/// sigma == 0 collapses to the single pole mu.
PoleSet delay_poles(Complex mu, Complex sigma, double tau, int branch_window);

/// Scalar analytic function bundle for the residue formulas: value, first and
/// second derivative evaluators (the last two may be empty when unused).
struct AnalyticFunction {
  std::function<Complex(Complex)> value;
  std::function<Complex(Complex)> deriv;
  std::function<Complex(Complex)> deriv2;

  static AnalyticFunction from(const CoefficientFunction& f);
};

/// Res(g/h, c) = g(c)/h'(c) for a simple zero c of h.
Complex residue_simple(const AnalyticFunction& g, const AnalyticFunction& h, Complex c);

/// Res(g/h^2, c) = g'(c)/h'(c)^2 - g(c) h''(c)/h'(c)^3 for a simple zero c of h.
Complex residue_double(const AnalyticFunction& g, const AnalyticFunction& h, Complex c);

}  // namespace strh2
