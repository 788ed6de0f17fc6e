#include <doctest.h>

#include <nlohmann/json.hpp>

#include "strh2/scalarfun.hpp"
#include "strh2/rng.hpp"
#include "support/oracles.hpp"

using strh2::CoefficientFunction;
using strh2::Complex;
using strh2::SplitMix64;

namespace {

CoefficientFunction random_function(SplitMix64& rng, bool allow_combination = true) {
  const double pick = rng.uniform();
  if (pick < 0.25) return CoefficientFunction::constant(Complex(rng.normal(), rng.normal()));
  if (pick < 0.5) return CoefficientFunction::monomial(static_cast<int>(rng.uniform(0.0, 4.0)));
  if (pick < 0.75 || !allow_combination) return CoefficientFunction::exp_delay(rng.uniform(0.2, 2.0));
  std::vector<std::pair<Complex, CoefficientFunction>> terms;
  const int n = 1 + static_cast<int>(rng.uniform(0.0, 3.0));
  for (int k = 0; k < n; ++k)
    terms.emplace_back(Complex(rng.normal(), rng.normal()), random_function(rng, false));
  return CoefficientFunction::linear_combination(std::move(terms));
}

}  // namespace

TEST_CASE("evaluation of the atoms") {
  CHECK(CoefficientFunction::monomial(2).eval(Complex(0, 2)) == Complex(-4.0, 0.0));
  CHECK(CoefficientFunction::exp_delay(1.0).eval(Complex(0, 0)) == Complex(1.0, 0.0));

  const Complex lambda(1.5, -0.25);
  const auto shifted = CoefficientFunction::linear_combination(
      {{Complex(1, 0), CoefficientFunction::monomial(1)},
       {Complex(-1, 0), CoefficientFunction::constant(lambda)}});
  CHECK(std::abs(shifted.eval(lambda)) == 0.0);
}

TEST_CASE("symbolic derivatives") {
  const auto dsq = CoefficientFunction::monomial(2).derivative();
  REQUIRE(dsq.kind() == CoefficientFunction::Kind::LinearCombination);
  REQUIRE(dsq.terms().size() == 1);
  CHECK(dsq.terms()[0].first == Complex(2.0, 0.0));
  CHECK(dsq.terms()[0].second.kind() == CoefficientFunction::Kind::Monomial);
  CHECK(dsq.terms()[0].second.exponent() == 1);

  const auto dexp = CoefficientFunction::exp_delay(0.7).derivative();
  REQUIRE(dexp.kind() == CoefficientFunction::Kind::LinearCombination);
  CHECK(dexp.terms()[0].first == Complex(-0.7, 0.0));
  CHECK(dexp.terms()[0].second.kind() == CoefficientFunction::Kind::ExpDelay);

  const auto dconst = CoefficientFunction::constant(Complex(5.0, 0.0)).derivative();
  CHECK(dconst.kind() == CoefficientFunction::Kind::Constant);
  CHECK(dconst.constant_value() == Complex(0.0, 0.0));

  CHECK(CoefficientFunction::monomial(0).derivative().constant_value() == Complex(0.0, 0.0));
}

TEST_CASE("derivative matches central finite differences") {
  SplitMix64 rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const CoefficientFunction f = random_function(rng);
    const CoefficientFunction df = f.derivative();
    const Complex s(rng.normal(), rng.normal());
    const double h = 1e-5 * std::max(1.0, std::abs(s));
    const Complex fd = oracles::analytic_fd([&](Complex z) { return f.eval(z); }, s, h);
    const Complex exact = df.eval(s);
    CHECK(std::abs(exact - fd) <= 1e-8 * std::max(1.0, std::abs(exact)));
  }
}

TEST_CASE("conjugate flip") {
  CHECK(CoefficientFunction::constant(Complex(1, 2)).conj_flip().constant_value() ==
        Complex(1.0, -2.0));
  CHECK(CoefficientFunction::monomial(3).conj_flip().exponent() == 3);
  CHECK(CoefficientFunction::exp_delay(1.5).conj_flip().delay() == 1.5);

  SplitMix64 rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    const CoefficientFunction f = random_function(rng);
    const CoefficientFunction g = f.conj_flip();
    const CoefficientFunction gg = g.conj_flip();
    for (int k = 0; k < 5; ++k) {
      const Complex s(rng.normal(), rng.normal());
      // g(s) = conj(f(conj s)), exactly
      CHECK(g.eval(s) == std::conj(f.eval(std::conj(s))));
      // involution
      CHECK(std::abs(gg.eval(s) - f.eval(s)) <= 1e-15 * (1.0 + std::abs(f.eval(s))));
    }
  }
}

TEST_CASE("linear combinations stay flat and nonempty") {
  const auto inner = CoefficientFunction::linear_combination(
      {{Complex(2, 0), CoefficientFunction::monomial(1)},
       {Complex(1, 0), CoefficientFunction::exp_delay(1.0)}});
  const auto outer = CoefficientFunction::linear_combination(
      {{Complex(3, 0), inner}, {Complex(1, 0), CoefficientFunction::monomial(0)}});
  REQUIRE(outer.kind() == CoefficientFunction::Kind::LinearCombination);
  for (const auto& [w, f] : outer.terms())
    CHECK(f.kind() != CoefficientFunction::Kind::LinearCombination);
  CHECK(outer.terms().size() == 3);

  // all-zero-weight combination collapses to the zero constant
  const auto zero = CoefficientFunction::linear_combination({});
  CHECK(zero.kind() == CoefficientFunction::Kind::Constant);
}

TEST_CASE("invariants reject bad atoms") {
  CHECK_THROWS_AS(CoefficientFunction::monomial(-1), std::invalid_argument);
  CHECK_THROWS_AS(CoefficientFunction::exp_delay(0.0), std::invalid_argument);
  CHECK_THROWS_AS(CoefficientFunction::exp_delay(-1.0), std::invalid_argument);
}

TEST_CASE("json round trip") {
  SplitMix64 rng(43);
  for (int trial = 0; trial < 25; ++trial) {
    const CoefficientFunction f = random_function(rng);
    const CoefficientFunction g = CoefficientFunction::from_json(f.to_json());
    for (int k = 0; k < 4; ++k) {
      const Complex s(rng.normal(), rng.normal());
      CHECK(std::abs(f.eval(s) - g.eval(s)) <= 1e-15 * (1.0 + std::abs(f.eval(s))));
    }
  }
  // the documented spellings parse
  const auto mono = CoefficientFunction::from_json(nlohmann::json{{"monomial", 2}});
  CHECK(mono.exponent() == 2);
  const auto expd = CoefficientFunction::from_json(nlohmann::json{{"expdelay", 1.5}});
  CHECK(expd.delay() == 1.5);
}

TEST_CASE("polynomial coefficient extraction") {
  const auto poly = CoefficientFunction::linear_combination(
      {{Complex(3, 0), CoefficientFunction::monomial(2)},
       {Complex(-1, 1), CoefficientFunction::monomial(0)}});
  std::vector<Complex> coeffs;
  REQUIRE(poly.polynomial_coefficients(&coeffs));
  REQUIRE(coeffs.size() == 3);
  CHECK(coeffs[0] == Complex(-1, 1));
  CHECK(coeffs[2] == Complex(3, 0));
  CHECK_FALSE(CoefficientFunction::exp_delay(1.0).polynomial_coefficients(nullptr));
}
