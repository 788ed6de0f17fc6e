#include "strh2/spectra.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "strh2/errors.hpp"
#include "strh2/linalg.hpp"

namespace strh2 {

namespace {

constexpr double kPi = 3.14159265358979323846;

Complex poly_eval(const std::vector<Complex>& c, Complex s) {
  Complex acc(0.0, 0.0);
  for (size_t k = c.size(); k-- > 0;) acc = acc * s + c[k];
  return acc;
}

Complex poly_eval_deriv(const std::vector<Complex>& c, Complex s) {
  Complex acc(0.0, 0.0);
  for (size_t k = c.size(); k-- > 1;) acc = acc * s + static_cast<double>(k) * c[k];
  return acc;
}

void sort_by_re_im(std::vector<Complex>& v) {
  std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

}  // namespace

std::vector<Complex> polynomial_roots(const std::vector<Complex>& coeffs) {
  if (coeffs.size() < 2) throw std::invalid_argument("polynomial degree must be >= 1");
  double cmax = 0.0;
  for (const Complex& c : coeffs) cmax = std::max(cmax, std::abs(c));
  const size_t deg = coeffs.size() - 1;
  if (!(std::abs(coeffs[deg]) > 1e-12 * std::max(cmax, 1e-300))) throw DegenerateLeadingCoefficient();

  // Monic normalization and companion matrix.
  std::vector<Complex> monic(coeffs);
  for (Complex& c : monic) c /= coeffs[deg];
  CMat companion = CMat::Zero(static_cast<Index>(deg), static_cast<Index>(deg));
  for (size_t i = 1; i < deg; ++i) companion(static_cast<Index>(i), static_cast<Index>(i - 1)) = 1.0;
  for (size_t i = 0; i < deg; ++i) companion(static_cast<Index>(i), static_cast<Index>(deg - 1)) = -monic[i];

  Eigen::ComplexEigenSolver<CMat> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NoConvergence("companion eigensolver failed");

  std::vector<Complex> roots(static_cast<size_t>(solver.eigenvalues().size()));
  double coeff_norm = 0.0;
  for (const Complex& c : coeffs) coeff_norm += std::norm(c);
  coeff_norm = std::sqrt(coeff_norm);

  for (size_t i = 0; i < roots.size(); ++i) {
    Complex r = solver.eigenvalues()(static_cast<Index>(i));
    for (int it = 0; it < 3; ++it) {
      const Complex p = poly_eval(coeffs, r);
      const Complex dp = poly_eval_deriv(coeffs, r);
      if (std::abs(dp) == 0.0) break;
      const Complex step = p / dp;
      r -= step;
      if (std::abs(step) <= 1e-15 * (1.0 + std::abs(r))) break;
    }
    if (!(std::abs(poly_eval(coeffs, r)) < 1e-9 * coeff_norm * std::max(1.0, std::pow(std::abs(r), static_cast<double>(deg)))))
      throw NoConvergence("polynomial root residual too large");
    roots[i] = r;
  }
  sort_by_re_im(roots);
  return roots;
}

namespace {

Complex halley_lambert(Complex w, Complex z, double tol) {
  for (int it = 0; it < 50; ++it) {
    const Complex ew = std::exp(w);
    const Complex f = w * ew - z;
    if (std::abs(f) <= tol) return w;
    const Complex fp = ew * (w + 1.0);
    const Complex fpp = ew * (w + 2.0);
    Complex denom = fp - f * fpp / (2.0 * fp);
    if (denom == Complex(0.0, 0.0)) denom = fp;
    const Complex step = f / denom;
    w -= step;
  }
  const Complex f = w * std::exp(w) - z;
  if (std::abs(f) <= 10.0 * tol) return w;
  throw NoConvergence("lambert_w Halley iteration stalled");
}

/// Unwinding index of a converged value: W + Log W - Log z = 2*pi*i*k.
int unwinding_index(Complex w, Complex z) {
  const double k = ((std::log(w) + w - std::log(z)) / (2.0 * kPi * imag_unit)).real();
  return static_cast<int>(std::lround(k));
}

}  // namespace

Complex lambert_w(int branch, Complex z) {
  const double inv_e = std::exp(-1.0);
  if (z == Complex(0.0, 0.0)) {
    if (branch == 0) return Complex(0.0, 0.0);
    throw std::invalid_argument("lambert_w: z = 0 is only in the domain of branch 0");
  }
  if ((branch == 0 || branch == -1) && std::abs(z + inv_e) < 1e-14) throw BranchPointSingularity();

  const double tol = 1e-13 * std::max(std::abs(z), 1e-300);
  const bool real_z = (z.imag() == 0.0);
  const Complex two_pi_ij = 2.0 * kPi * imag_unit * static_cast<double>(branch);

  Complex w0;
  if (branch == 0) {
    if (std::abs(z + inv_e) < 0.3 && !(real_z && z.real() < -inv_e)) {
      const Complex p = std::sqrt(2.0 * (std::exp(1.0) * z + 1.0));
      w0 = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else if (std::abs(z) < 0.5 && !(real_z && z.real() < -inv_e)) {
      w0 = z * (1.0 - z + 1.5 * z * z);
    } else if (std::abs(z) < 4.0 && !(real_z && z.real() < -inv_e)) {
      w0 = std::log(1.0 + z);  // robust moderate-|z| seed, away from the cut
    } else {
      const Complex l1 = std::log(z);
      const Complex l2 = std::log(l1);
      w0 = l1 - l2 + l2 / l1;
    }
  } else if (branch == -1 && real_z && z.real() > -inv_e && z.real() < 0.0) {
    // The second real branch: W <= -1 on (-1/e, 0).
    if (z.real() < -0.25) {
      const Complex p = -std::sqrt(2.0 * (std::exp(1.0) * z + 1.0));
      w0 = -1.0 + p - p * p / 3.0;
    } else {
      const double l = std::log(-z.real());
      w0 = Complex(l - std::log(-l), 0.0);
    }
  } else {
    const Complex l1 = std::log(z) + two_pi_ij;
    const Complex l2 = std::log(l1);
    w0 = l1 - l2 + l2 / l1 + l2 * (l2 - 2.0) / (2.0 * l1 * l1);
  }

  // The real segment of branch -1 (W real <= -1) is exempt from the unwinding
  // identity used for branch verification.
  auto on_real_minus1_segment = [&](Complex w) {
    return branch == -1 && real_z && std::abs(w.imag()) <= 1e-12 * std::max(1.0, std::abs(w.real())) &&
           w.real() < -0.999;
  };

  Complex w = halley_lambert(w0, z, tol);
  if (on_real_minus1_segment(w)) return Complex(w.real(), 0.0);
  if (unwinding_index(w, z) != branch) {
    // One retry from the raw asymptotic seed.
    const Complex l1 = std::log(z) + two_pi_ij;
    const Complex l2 = std::log(l1);
    w = halley_lambert(l1 - l2, z, tol);
    if (on_real_minus1_segment(w)) return Complex(w.real(), 0.0);
    if (unwinding_index(w, z) != branch)
      throw NoConvergence("lambert_w converged to a different branch");
  }
  return w;
}

PoleSet delay_poles(Complex mu, Complex sigma, double tau, int branch_window) {
  if (!(tau > 0.0)) throw std::invalid_argument("delay_poles requires tau > 0");
  if (branch_window < 0) throw std::invalid_argument("branch window must be >= 0");

  PoleSet out;
  out.branch_window = branch_window;

  auto a_val = [&](Complex s) { return s - mu - sigma * std::exp(-tau * s); };
  auto a_deriv = [&](Complex s) { return Complex(1.0, 0.0) + tau * sigma * std::exp(-tau * s); };

  if (sigma == Complex(0.0, 0.0)) {
    if (!(mu.real() < 0.0)) throw UnstablePole(mu);
    out.poles.push_back(mu);
    out.branches.push_back(0);
    out.tail_estimate = 0.0;
    return out;
  }

  const Complex x = tau * sigma * std::exp(-tau * mu);
  std::vector<std::pair<Complex, int>> found;
  for (int j = -branch_window; j <= branch_window; ++j) {
    Complex lambda;
    try {
      lambda = mu + lambert_w(j, x) / tau;
    } catch (const BranchPointSingularity&) {
      continue;  // branch undefined exactly at the branch point
    } catch (const std::invalid_argument&) {
      continue;
    }
    // Newton polish directly on the characteristic function.
    for (int it = 0; it < 5; ++it) {
      const Complex f = a_val(lambda);
      if (std::abs(f) <= 1e-13 * (1.0 + std::abs(lambda))) break;
      const Complex fp = a_deriv(lambda);
      if (std::abs(fp) == 0.0) break;
      lambda -= f / fp;
    }
    if (!(std::abs(a_val(lambda)) <= 1e-10 * (1.0 + std::abs(lambda))))
      throw NoConvergence("delay pole failed verification against the characteristic function");
    if (!(std::abs(a_deriv(lambda)) > 1e-10 * (1.0 + std::abs(lambda)))) throw NotASimpleZero();
    if (!(lambda.real() < 0.0)) throw UnstablePole(lambda);
    bool duplicate = false;
    for (const auto& [other, jb] : found)
      if (std::abs(other - lambda) < 1e-9) duplicate = true;
    if (!duplicate) found.emplace_back(lambda, j);
  }

  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    if (a.first.real() != b.first.real()) return a.first.real() < b.first.real();
    return a.first.imag() < b.first.imag();
  });

  double phi_sum = 0.0;
  double phi_last = 0.0;
  for (const auto& [lambda, j] : found) {
    const double phi = 1.0 / std::abs(1.0 + tau * (lambda - mu));
    phi_sum += phi;
    if (std::abs(j) == branch_window) phi_last = std::max(phi_last, phi);
  }
  out.tail_estimate = phi_sum > 0.0 ? phi_last / phi_sum : 0.0;

  out.poles.reserve(found.size());
  out.branches.reserve(found.size());
  for (const auto& [lambda, j] : found) {
    out.poles.push_back(lambda);
    out.branches.push_back(j);
  }
  return out;
}

AnalyticFunction AnalyticFunction::from(const CoefficientFunction& f) {
  const CoefficientFunction d1 = f.derivative();
  const CoefficientFunction d2 = d1.derivative();
  AnalyticFunction out;
  out.value = [f](Complex s) { return f.eval(s); };
  out.deriv = [d1](Complex s) { return d1.eval(s); };
  out.deriv2 = [d2](Complex s) { return d2.eval(s); };
  return out;
}

namespace {

void check_simple_zero(const AnalyticFunction& h, Complex c) {
  if (!h.value || !h.deriv) throw std::invalid_argument("residue formulas need h and h'");
  const double scale = 1.0 + std::abs(c);
  if (!(std::abs(h.value(c)) <= 1e-10 * scale)) throw NotASimpleZero();
  if (!(std::abs(h.deriv(c)) > 1e-10 * scale)) throw NotASimpleZero();
}

}  // namespace

Complex residue_simple(const AnalyticFunction& g, const AnalyticFunction& h, Complex c) {
  check_simple_zero(h, c);
  return g.value(c) / h.deriv(c);
}

Complex residue_double(const AnalyticFunction& g, const AnalyticFunction& h, Complex c) {
  check_simple_zero(h, c);
  if (!g.deriv || !h.deriv2) throw std::invalid_argument("residue_double needs g' and h''");
  const Complex hp = h.deriv(c);
  return g.deriv(c) / (hp * hp) - g.value(c) * h.deriv2(c) / (hp * hp * hp);
}

}  // namespace strh2
