#include "strh2/scalarfun.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "strh2/errors.hpp"

namespace strh2 {

using nlohmann::json;

CoefficientFunction CoefficientFunction::constant(Complex c) {
  CoefficientFunction f;
  f.kind_ = Kind::Constant;
  f.constant_ = c;
  return f;
}

CoefficientFunction CoefficientFunction::monomial(int exponent) {
  if (exponent < 0) throw std::invalid_argument("monomial exponent must be >= 0");
  CoefficientFunction f;
  f.kind_ = Kind::Monomial;
  f.exponent_ = exponent;
  return f;
}

CoefficientFunction CoefficientFunction::exp_delay(double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("exp_delay requires tau > 0");
  CoefficientFunction f;
  f.kind_ = Kind::ExpDelay;
  f.delay_ = tau;
  return f;
}

CoefficientFunction CoefficientFunction::linear_combination(
    std::vector<std::pair<Complex, CoefficientFunction>> terms) {
  std::vector<std::pair<Complex, CoefficientFunction>> flat;
  flat.reserve(terms.size());
  for (auto& [w, f] : terms) {
    if (w == Complex(0.0, 0.0)) continue;
    if (f.kind_ == Kind::LinearCombination) {
      for (const auto& [w2, g] : f.terms_) {
        const Complex prod = w * w2;
        if (prod != Complex(0.0, 0.0)) flat.emplace_back(prod, g);
      }
    } else {
      flat.emplace_back(w, std::move(f));
    }
  }
  if (flat.empty()) return constant(0.0);
  if (flat.size() == 1 && flat[0].second.kind_ == Kind::Constant)
    return constant(flat[0].first * flat[0].second.constant_);
  CoefficientFunction out;
  out.kind_ = Kind::LinearCombination;
  out.terms_ = std::move(flat);
  return out;
}

Complex CoefficientFunction::eval(Complex s) const {
  switch (kind_) {
    case Kind::Constant:
      return constant_;
    case Kind::Monomial: {
      Complex acc(1.0, 0.0);
      for (int i = 0; i < exponent_; ++i) acc *= s;
      return acc;
    }
    case Kind::ExpDelay:
      return std::exp(-delay_ * s);
    case Kind::LinearCombination: {
      Complex acc(0.0, 0.0);
      for (const auto& [w, f] : terms_) acc += w * f.eval(s);
      return acc;
    }
  }
  return Complex(0.0, 0.0);
}

CoefficientFunction CoefficientFunction::derivative() const {
  switch (kind_) {
    case Kind::Constant:
      return constant(0.0);
    case Kind::Monomial:
      if (exponent_ == 0) return constant(0.0);
      return linear_combination({{Complex(static_cast<double>(exponent_), 0.0), monomial(exponent_ - 1)}});
    case Kind::ExpDelay:
      return linear_combination({{Complex(-delay_, 0.0), exp_delay(delay_)}});
    case Kind::LinearCombination: {
      std::vector<std::pair<Complex, CoefficientFunction>> out;
      for (const auto& [w, f] : terms_) out.emplace_back(w, f.derivative());
      return linear_combination(std::move(out));
    }
  }
  return constant(0.0);
}

CoefficientFunction CoefficientFunction::conj_flip() const {
  switch (kind_) {
    case Kind::Constant:
      return constant(std::conj(constant_));
    case Kind::Monomial:
    case Kind::ExpDelay:
      return *this;
    case Kind::LinearCombination: {
      std::vector<std::pair<Complex, CoefficientFunction>> out;
      out.reserve(terms_.size());
      for (const auto& [w, f] : terms_) out.emplace_back(std::conj(w), f.conj_flip());
      return linear_combination(std::move(out));
    }
  }
  return constant(0.0);
}

bool CoefficientFunction::polynomial_coefficients(std::vector<Complex>* coeffs) const {
  auto set = [&](int power, Complex value) {
    if (!coeffs) return;
    if (static_cast<int>(coeffs->size()) <= power) coeffs->resize(static_cast<size_t>(power) + 1, Complex(0.0, 0.0));
    (*coeffs)[static_cast<size_t>(power)] += value;
  };
  switch (kind_) {
    case Kind::Constant:
      set(0, constant_);
      return true;
    case Kind::Monomial:
      set(exponent_, Complex(1.0, 0.0));
      return true;
    case Kind::ExpDelay:
      return false;
    case Kind::LinearCombination:
      for (const auto& [w, f] : terms_) {
        std::vector<Complex> sub;
        if (!f.polynomial_coefficients(coeffs ? &sub : nullptr)) return false;
        for (size_t k = 0; k < sub.size(); ++k) set(static_cast<int>(k), w * sub[k]);
      }
      return true;
  }
  return false;
}

static json complex_to_json_value(Complex c) { return json{{"re", c.real()}, {"im", c.imag()}}; }

static Complex complex_from_json_value(const json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_object() && j.contains("re")) return Complex(j.value("re", 0.0), j.value("im", 0.0));
  throw ParseError("expected a number or {re, im} object");
}

json CoefficientFunction::to_json() const {
  switch (kind_) {
    case Kind::Constant:
      return json{{"constant", complex_to_json_value(constant_)}};
    case Kind::Monomial:
      return json{{"monomial", exponent_}};
    case Kind::ExpDelay:
      return json{{"expdelay", delay_}};
    case Kind::LinearCombination: {
      json arr = json::array();
      for (const auto& [w, f] : terms_) arr.push_back(json::array({complex_to_json_value(w), f.to_json()}));
      return json{{"lincomb", arr}};
    }
  }
  return json{};
}

CoefficientFunction CoefficientFunction::from_json(const json& j) {
  if (!j.is_object() || j.size() != 1) throw ParseError("coefficient function must be a single-key object");
  if (j.contains("constant")) return constant(complex_from_json_value(j.at("constant")));
  if (j.contains("monomial")) return monomial(j.at("monomial").get<int>());
  if (j.contains("expdelay")) return exp_delay(j.at("expdelay").get<double>());
  if (j.contains("lincomb")) {
    std::vector<std::pair<Complex, CoefficientFunction>> terms;
    for (const auto& entry : j.at("lincomb")) {
      if (!entry.is_array() || entry.size() != 2) throw ParseError("lincomb entries are [weight, function] pairs");
      terms.emplace_back(complex_from_json_value(entry[0]), from_json(entry[1]));
    }
    return linear_combination(std::move(terms));
  }
  throw ParseError("unknown coefficient function tag");
}

CoefficientFunction operator+(const CoefficientFunction& f, const CoefficientFunction& g) {
  return CoefficientFunction::linear_combination({{Complex(1.0, 0.0), f}, {Complex(1.0, 0.0), g}});
}

CoefficientFunction operator*(Complex w, const CoefficientFunction& f) {
  return CoefficientFunction::linear_combination({{w, f}});
}

}  // namespace strh2
