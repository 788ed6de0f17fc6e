#include "strh2/optcond.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "strh2/errors.hpp"
#include "strh2/linalg.hpp"
#include "strh2/utils.hpp"

namespace strh2 {

namespace {

constexpr double kPi = 3.14159265358979323846;

void push_record(ConditionReport& report, std::string id, int index, int index2, const CMat& lhs,
                 const CMat& rhs) {
  ConditionRecord rec;
  rec.condition_id = std::move(id);
  rec.index = index;
  rec.index2 = index2;
  rec.absolute = (lhs - rhs).norm();
  rec.scale = lhs.norm() + rhs.norm() + 1e-30;
  rec.relative = rec.absolute / std::max(rec.scale, 1e-300);
  report.records.push_back(std::move(rec));
}

CMat as_mat(Complex z) {
  CMat m(1, 1);
  m(0, 0) = z;
  return m;
}

Complex scalar(const CMat& m) { return m(0, 0); }

/// lambda from a monic denominator a(s) = s - lambda; rejects any other shape.
Complex monic_linear_pole(const CoefficientFunction& a) {
  std::vector<Complex> coeffs;
  if (!a.polynomial_coefficients(&coeffs) || coeffs.size() != 2)
    throw std::invalid_argument("denominator is not linear in s");
  if (std::abs(coeffs[1] - Complex(1.0, 0.0)) > 1e-12)
    throw std::invalid_argument("denominator is not monic");
  return -coeffs[0];
}

}  // namespace

bool ConditionReport::pass(double tolerance) const {
  for (const auto& rec : records)
    if (!(rec.relative < tolerance)) return false;
  return true;
}

double ConditionReport::max_relative() const {
  double worst = 0.0;
  for (const auto& rec : records) worst = std::max(worst, rec.relative);
  return worst;
}

const ConditionRecord* ConditionReport::find(const std::string& condition_id, int index,
                                             int index2) const {
  for (const auto& rec : records)
    if (rec.condition_id == condition_id && rec.index == index && rec.index2 == index2) return &rec;
  return nullptr;
}

nlohmann::json ConditionReport::to_json() const {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& rec : records) {
    recs.push_back({{"condition", rec.condition_id},
                    {"index", rec.index},
                    {"index2", rec.index2},
                    {"absolute", rec.absolute},
                    {"relative", rec.relative},
                    {"scale", rec.scale}});
  }
  return nlohmann::json{{"structure", structure},
                        {"records", recs},
                        {"branch_window", branch_window},
                        {"truncation_tail", truncation_tail},
                        {"max_relative", max_relative()}};
}

std::string ConditionReport::to_table() const {
  std::ostringstream os;
  os << std::left << std::setw(22) << "condition" << std::right << std::setw(6) << "i"
     << std::setw(6) << "j" << std::setw(14) << "absolute" << std::setw(14) << "relative"
     << std::setw(14) << "scale" << '\n';
  for (const auto& rec : records) {
    os << std::left << std::setw(22) << rec.condition_id << std::right << std::setw(6) << rec.index
       << std::setw(6) << rec.index2 << std::setw(14) << std::scientific << std::setprecision(3)
       << rec.absolute << std::setw(14) << rec.relative << std::setw(14) << rec.scale << '\n';
  }
  if (branch_window > 0)
    os << "branch window J = " << branch_window << ", truncation tail = " << std::scientific
       << std::setprecision(3) << truncation_tail << '\n';
  return os.str();
}

// --- unstructured ---

ConditionReport residual_unstructured(const TransferEvaluator& h, const DiagonalStructuredROM& rom) {
  rom.validate();
  const Index r = rom.order();
  CVec poles(r);
  for (Index l = 0; l < r; ++l) {
    poles(l) = monic_linear_pole(rom.denominator(l));
    if (!(poles(l).real() < 0.0)) throw UnstablePole(poles(l));
  }
  if (min_pairwise_separation(poles) <= 1e-9) throw DisjointnessViolation();

  const ParamSepModel hhat = rom.to_param_sep();
  ConditionReport report;
  report.structure = "unstructured";
  for (Index l = 0; l < r; ++l) {
    const Complex sigma = -std::conj(poles(l));
    const CVec b = rom.b(l);
    const CVec c = rom.c(l);
    const CMat hv = h.eval(sigma), hhv = hhat.transfer(sigma);
    const CMat hd = h.eval_derivative(sigma), hhd = hhat.transfer_derivative(sigma);
    push_record(report, "lti-oc1", static_cast<int>(l), -1, hv * b, hhv * b);
    push_record(report, "lti-oc2", static_cast<int>(l), -1, c.adjoint() * hv, c.adjoint() * hhv);
    push_record(report, "lti-oc3", static_cast<int>(l), -1, as_mat(scalar(c.adjoint() * hd * b)),
                as_mat(scalar(c.adjoint() * hhd * b)));
  }
  return report;
}

// --- integral stationarity (independent quadrature path) ---

ConditionReport residual_l2_stationarity(const TransferEvaluator& h, const ParamSepModel& rom,
                                         const FrequencyGrid& grid) {
  rom.validate();
  grid.validate();
  const Index r = rom.order(), m = rom.inputs(), p = rom.outputs();

  std::vector<detail::KahanMatrixSum> lhs_c(rom.c_terms.size(), detail::KahanMatrixSum(p, r));
  std::vector<detail::KahanMatrixSum> rhs_c(rom.c_terms.size(), detail::KahanMatrixSum(p, r));
  std::vector<detail::KahanMatrixSum> lhs_b(rom.b_terms.size(), detail::KahanMatrixSum(r, m));
  std::vector<detail::KahanMatrixSum> rhs_b(rom.b_terms.size(), detail::KahanMatrixSum(r, m));
  std::vector<detail::KahanMatrixSum> lhs_a(rom.a_terms.size(), detail::KahanMatrixSum(r, r));
  std::vector<detail::KahanMatrixSum> rhs_a(rom.a_terms.size(), detail::KahanMatrixSum(r, r));

  struct Node {
    CMat hval, hhat, xstar, xd;
  };
  std::vector<Node> nodes(static_cast<size_t>(grid.nodes.size()));
  detail::parallel_for(grid.nodes.size(), [&](Index k) {
    const Complex s(0.0, grid.nodes(k));
    Node& nd = nodes[static_cast<size_t>(k)];
    const PivotedLU lu(rom.assemble_a(s));
    const CMat x = lu.solve(rom.assemble_b(s), s);
    nd.xd = lu.solve_adjoint(rom.assemble_c(s).adjoint(), s);
    nd.xstar = x.adjoint();
    nd.hval = h.eval(s);
    nd.hhat = rom.assemble_c(s) * x;
  });

  for (Index k = 0; k < grid.nodes.size(); ++k) {
    const Complex s(0.0, grid.nodes(k));
    const Node& nd = nodes[static_cast<size_t>(k)];
    const double w = grid.weights(k) / (2.0 * kPi);
    for (size_t i = 0; i < rom.c_terms.size(); ++i) {
      const Complex coef = w * std::conj(rom.c_terms[i].first.eval(s));
      lhs_c[i].add(coef * (nd.hval * nd.xstar));
      rhs_c[i].add(coef * (nd.hhat * nd.xstar));
    }
    for (size_t i = 0; i < rom.b_terms.size(); ++i) {
      const Complex coef = w * std::conj(rom.b_terms[i].first.eval(s));
      lhs_b[i].add(coef * (nd.xd * nd.hval));
      rhs_b[i].add(coef * (nd.xd * nd.hhat));
    }
    for (size_t i = 0; i < rom.a_terms.size(); ++i) {
      const Complex coef = w * std::conj(rom.a_terms[i].first.eval(s));
      lhs_a[i].add(coef * (nd.xd * nd.hval * nd.xstar));
      rhs_a[i].add(coef * (nd.xd * nd.hhat * nd.xstar));
    }
  }

  ConditionReport report;
  report.structure = "l2-stationarity";
  for (size_t i = 0; i < rom.c_terms.size(); ++i)
    push_record(report, "cond-C", static_cast<int>(i), -1, lhs_c[i].value(), rhs_c[i].value());
  for (size_t i = 0; i < rom.b_terms.size(); ++i)
    push_record(report, "cond-B", static_cast<int>(i), -1, lhs_b[i].value(), rhs_b[i].value());
  for (size_t i = 0; i < rom.a_terms.size(); ++i)
    push_record(report, "cond-A", static_cast<int>(i), -1, lhs_a[i].value(), rhs_a[i].value());
  return report;
}

// --- general diagonal denominators ---

std::vector<PoleSet> compute_pole_sets(const DiagonalStructuredROM& rom) {
  std::vector<PoleSet> out;
  const PoleResidueForm form = pole_residue_form(rom);
  out.reserve(form.entries.size());
  for (const auto& entry : form.entries) out.push_back(entry.poles);
  return out;
}

ConditionReport residual_general_diag(const TransferEvaluator& h, const DiagonalStructuredROM& rom,
                                      const std::vector<PoleSet>& pole_sets) {
  rom.validate();
  const Index r = rom.order();
  if (pole_sets.size() != static_cast<size_t>(r))
    throw std::invalid_argument("need one pole set per index");

  for (Index l1 = 0; l1 < r; ++l1)
    for (Index l2 = l1 + 1; l2 < r; ++l2)
      for (const Complex& a : pole_sets[static_cast<size_t>(l1)].poles)
        for (const Complex& b : pole_sets[static_cast<size_t>(l2)].poles)
          if (std::abs(a - b) <= 1e-9) throw DisjointnessViolation();

  const ParamSepModel hhat = rom.to_param_sep();
  ConditionReport report;
  report.structure = "general-diag";

  for (Index l = 0; l < r; ++l) {
    const CoefficientFunction a = rom.denominator(l);
    const CoefficientFunction a1 = a.derivative();
    const CoefficientFunction a2 = a1.derivative();
    const CVec b = rom.b(l);
    const CVec c = rom.c(l);
    const auto& poles = pole_sets[static_cast<size_t>(l)].poles;

    struct PoleData {
      Complex sigma, ap, app;
      CMat hv, hd, hhv, hhd;
    };
    std::vector<PoleData> data;
    data.reserve(poles.size());
    for (const Complex& lambda : poles) {
      if (!(lambda.real() < 0.0)) throw UnstablePole(lambda);
      PoleData pd;
      pd.ap = a1.eval(lambda);
      pd.app = a2.eval(lambda);
      if (!(std::abs(a.eval(lambda)) <= 1e-8 * (1.0 + std::abs(lambda)) * (1.0 + std::abs(pd.ap))))
        throw std::invalid_argument("pole set does not annihilate the denominator");
      if (!(std::abs(pd.ap) > 1e-10 * (1.0 + std::abs(lambda)))) throw NotASimpleZero();
      pd.sigma = -std::conj(lambda);
      pd.hv = h.eval(pd.sigma);
      pd.hd = h.eval_derivative(pd.sigma);
      pd.hhv = hhat.transfer(pd.sigma);
      pd.hhd = hhat.transfer_derivative(pd.sigma);
      data.push_back(std::move(pd));
    }

    CMat right_l = CMat::Zero(rom.outputs(), 1), right_r = CMat::Zero(rom.outputs(), 1);
    CMat left_l = CMat::Zero(1, rom.inputs()), left_r = CMat::Zero(1, rom.inputs());
    for (size_t k = 0; k < data.size(); ++k) {
      const Complex w = 1.0 / std::conj(data[k].ap);
      right_l += w * (data[k].hv * b);
      right_r += w * (data[k].hhv * b);
      left_l += w * (c.adjoint() * data[k].hv);
      left_r += w * (c.adjoint() * data[k].hhv);
    }
    push_record(report, "diag-right", static_cast<int>(l), -1, right_l, right_r);
    push_record(report, "diag-left", static_cast<int>(l), -1, left_l, left_r);

    for (size_t i = 0; i < rom.a_terms.size(); ++i) {
      const CoefficientFunction& alpha = rom.a_terms[i].first;
      const CoefficientFunction alpha1 = alpha.derivative();
      Complex herm_l(0.0, 0.0), herm_r(0.0, 0.0);
      for (size_t k = 0; k < data.size(); ++k) {
        const Complex lambda = poles[k];
        const Complex ap = data[k].ap, app = data[k].app;
        const Complex w_deriv = std::conj(alpha.eval(lambda) / (ap * ap));
        const Complex w_value =
            std::conj(alpha1.eval(lambda) / (ap * ap) - alpha.eval(lambda) * app / (ap * ap * ap));
        herm_l += scalar(c.adjoint() * (w_deriv * data[k].hd - w_value * data[k].hv) * b);
        herm_r += scalar(c.adjoint() * (w_deriv * data[k].hhd - w_value * data[k].hhv) * b);
      }
      push_record(report, "diag-herm" + std::to_string(i), static_cast<int>(l),
                  static_cast<int>(i), as_mat(herm_l), as_mat(herm_r));
    }
  }
  return report;
}

// --- second order ---

ConditionReport residual_second_order(const TransferEvaluator& h, const SecondOrderROM& rom) {
  rom.validate();
  const SecondOrderFactors factors = second_order_factorization(rom);
  const ParamSepModel hhat = rom.to_param_sep();

  ConditionReport report;
  report.structure = "so";
  for (Index i = 0; i < rom.order(); ++i) {
    const Complex sp = -std::conj(factors.lambda_plus(i));
    const Complex sm = -std::conj(factors.lambda_minus(i));
    const CVec b = rom.B.row(i).transpose().cast<Complex>();
    const CVec c = rom.C.col(i).cast<Complex>();
    const CMat h_p = h.eval(sp), h_m = h.eval(sm);
    const CMat hh_p = hhat.transfer(sp), hh_m = hhat.transfer(sm);
    push_record(report, "soc1", static_cast<int>(i), -1, (h_p - h_m) * b, (hh_p - hh_m) * b);
    push_record(report, "soc2", static_cast<int>(i), -1, c.transpose() * (h_p - h_m),
                c.transpose() * (hh_p - hh_m));
    push_record(report, "soc3", static_cast<int>(i), -1,
                as_mat(scalar(c.transpose() * h.eval_derivative(sp) * b)),
                as_mat(scalar(c.transpose() * hhat.transfer_derivative(sp) * b)));
    push_record(report, "soc4", static_cast<int>(i), -1,
                as_mat(scalar(c.transpose() * h.eval_derivative(sm) * b)),
                as_mat(scalar(c.transpose() * hhat.transfer_derivative(sm) * b)));
  }
  return report;
}

ConditionReport residual_second_order_2d(const TransferEvaluator& h, const SecondOrderROM& rom) {
  rom.validate();
  const SecondOrderFactors factors = second_order_factorization(rom);
  const ParamSepModel hhat_model = rom.to_param_sep();

  // 2-variable difference transfer function and its partials.
  auto g_val = [&](const TransferEvaluator& f, Complex s1, Complex s2) {
    return CMat(f.eval(s1) - f.eval(s2));
  };
  auto g_d1 = [&](const TransferEvaluator& f, Complex s1, Complex) {
    return CMat(f.eval_derivative(s1));
  };
  auto g_d2 = [&](const TransferEvaluator& f, Complex, Complex s2) {
    return CMat(-f.eval_derivative(s2));
  };
  const ModelEvaluator<ParamSepModel> hhat(hhat_model);

  ConditionReport report;
  report.structure = "so-2d";
  for (Index i = 0; i < rom.order(); ++i) {
    const Complex s1 = -std::conj(factors.lambda_plus(i));
    const Complex s2 = -std::conj(factors.lambda_minus(i));
    const CVec b = rom.B.row(i).transpose().cast<Complex>();
    const CVec c = rom.C.col(i).cast<Complex>();
    push_record(report, "sobh1", static_cast<int>(i), -1, g_val(h, s1, s2) * b,
                g_val(hhat, s1, s2) * b);
    push_record(report, "sobh2", static_cast<int>(i), -1, c.transpose() * g_val(h, s1, s2),
                c.transpose() * g_val(hhat, s1, s2));
    push_record(report, "sobh3", static_cast<int>(i), -1,
                as_mat(scalar(c.transpose() * g_d1(h, s1, s2) * b)),
                as_mat(scalar(c.transpose() * g_d1(hhat, s1, s2) * b)));
    push_record(report, "sobh4", static_cast<int>(i), -1,
                as_mat(scalar(c.transpose() * g_d2(h, s1, s2) * b)),
                as_mat(scalar(c.transpose() * g_d2(hhat, s1, s2) * b)));
  }
  return report;
}

// --- port-Hamiltonian ---

ConditionReport residual_ph(const TransferEvaluator& h, const PHModel& model, double normal_tol) {
  const PHModalData data = ph_modal_data(model, normal_tol);
  const Index r = model.order();
  for (Index i = 0; i < r; ++i)
    if (!(data.lambda(i).real() < 0.0)) throw UnstablePole(data.lambda(i));

  const ParamSepModel hhat = model.to_param_sep();
  ConditionReport report;
  report.structure = "ph";

  std::vector<CMat> hv(r), hhv(r), hd(r), hhd(r);
  for (Index i = 0; i < r; ++i) {
    const Complex sigma = -std::conj(data.lambda(i));
    hv[i] = h.eval(sigma);
    hhv[i] = hhat.transfer(sigma);
    hd[i] = h.eval_derivative(sigma);
    hhd[i] = hhat.transfer_derivative(sigma);
  }

  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j)
      push_record(report, "ph-pair", static_cast<int>(i), static_cast<int>(j),
                  as_mat(scalar(data.c[i].adjoint() * (hv[i] - hv[j]) * data.b[j])),
                  as_mat(scalar(data.c[i].adjoint() * (hhv[i] - hhv[j]) * data.b[j])));
  for (Index i = 0; i < r; ++i)
    push_record(report, "ph-herm", static_cast<int>(i), -1,
                as_mat(scalar(data.c[i].adjoint() * hd[i] * data.b[i])),
                as_mat(scalar(data.c[i].adjoint() * hhd[i] * data.b[i])));

  {
    CMat lhs = CMat::Zero(model.inputs(), r), rhs = CMat::Zero(model.inputs(), r);
    for (Index i = 0; i < r; ++i) {
      lhs += hv[i] * data.b[i] * data.t[i].adjoint() + hv[i].adjoint() * data.c[i] * data.s[i].adjoint();
      rhs += hhv[i] * data.b[i] * data.t[i].adjoint() + hhv[i].adjoint() * data.c[i] * data.s[i].adjoint();
    }
    push_record(report, "ph-tangential", -1, -1, lhs, rhs);
  }

  if (data.normal) {
    for (Index i = 0; i < r; ++i) {
      push_record(report, "new-ph-1", static_cast<int>(i), -1, (hv[i] + hv[i].adjoint()) * data.b[i],
                  (hhv[i] + hhv[i].adjoint()) * data.b[i]);
      push_record(report, "new-ph-2", static_cast<int>(i), -1,
                  as_mat(scalar(data.b[i].adjoint() * hd[i] * data.b[i])),
                  as_mat(scalar(data.b[i].adjoint() * hhd[i] * data.b[i])));
    }
    // G = H + H^* restatement; the Wirtinger s-derivative of G is H'.
    auto g_of = [](const CMat& hval) { return CMat(hval + hval.adjoint()); };
    for (Index i = 0; i < r; ++i) {
      push_record(report, "phG1", static_cast<int>(i), -1, g_of(hv[i]) * data.b[i],
                  g_of(hhv[i]) * data.b[i]);
      push_record(report, "phG2", static_cast<int>(i), -1, data.b[i].adjoint() * g_of(hv[i]),
                  data.b[i].adjoint() * g_of(hhv[i]));
      push_record(report, "phG3", static_cast<int>(i), -1,
                  as_mat(scalar(data.b[i].adjoint() * hd[i] * data.b[i])),
                  as_mat(scalar(data.b[i].adjoint() * hhd[i] * data.b[i])));
    }
  }
  return report;
}

// --- time delay ---

namespace {

struct DelayIndexData {
  PoleSet poles;
  std::vector<Complex> phi, psi, rho;
};

DelayIndexData delay_index_data(const DelayROM& rom, Index i, int window) {
  DelayIndexData out;
  out.poles = delay_poles(rom.mu(i), rom.sigma(i), rom.tau, window);
  out.poles.index = static_cast<int>(i);
  for (const Complex& lambda : out.poles.poles) {
    const Complex u = 1.0 + rom.tau * (lambda - rom.mu(i));
    out.phi.push_back(1.0 / u);
    out.psi.push_back(1.0 / (u * u));
    out.rho.push_back(rom.tau * rom.tau * (lambda - rom.mu(i)) / (u * u * u));
  }
  return out;
}

/// Adaptive truncation rule: newest branch |phi| below 1e-10 of the running sum.
bool tail_rule_met(const DelayIndexData& data, int window) {
  double sum = 0.0, newest = 0.0;
  for (size_t k = 0; k < data.phi.size(); ++k) {
    const double mag = std::abs(data.phi[k]);
    sum += mag;
    if (std::abs(data.poles.branches[k]) == window) newest = std::max(newest, mag);
  }
  return sum > 0.0 && newest < 1e-10 * sum;
}

}  // namespace

ConditionReport residual_delay(const TransferEvaluator& h, const DelayROM& rom, int branch_window) {
  rom.validate(std::max(branch_window, 2));
  const Index r = rom.order();
  constexpr int kCap = 64;

  std::vector<DelayIndexData> per_index;
  int max_window = 0;
  double tail = 0.0;
  for (Index i = 0; i < r; ++i) {
    DelayIndexData data;
    if (branch_window >= 0) {
      data = delay_index_data(rom, i, branch_window);
    } else if (rom.sigma(i) == Complex(0.0, 0.0)) {
      data = delay_index_data(rom, i, 0);  // single rational pole
    } else {
      for (int window = 1;; ++window) {
        data = delay_index_data(rom, i, window);
        if (tail_rule_met(data, window) || window >= kCap) break;
      }
    }
    max_window = std::max(max_window, data.poles.branch_window);
    tail = std::max(tail, data.poles.tail_estimate);
    per_index.push_back(std::move(data));
  }

  // Distinctness across every (i, j) pole in the window.
  for (Index i = 0; i < r; ++i)
    for (Index j = i + 1; j < r; ++j)
      for (const Complex& a : per_index[static_cast<size_t>(i)].poles.poles)
        for (const Complex& b : per_index[static_cast<size_t>(j)].poles.poles)
          if (std::abs(a - b) <= 1e-9) throw DisjointnessViolation();

  const ParamSepModel hhat = rom.to_param_sep();
  ConditionReport report;
  report.structure = "delay";
  report.branch_window = max_window;
  report.truncation_tail = tail;

  for (Index i = 0; i < r; ++i) {
    const DelayIndexData& data = per_index[static_cast<size_t>(i)];
    const CVec b = rom.B.row(i).adjoint();
    const CVec c = rom.C.col(i);

    CMat sum1_l = CMat::Zero(rom.outputs(), rom.inputs());
    CMat sum1_r = CMat::Zero(rom.outputs(), rom.inputs());
    Complex td3_l(0, 0), td3_r(0, 0), td4_l(0, 0), td4_r(0, 0), merged_l(0, 0), merged_r(0, 0);
    for (size_t k = 0; k < data.poles.poles.size(); ++k) {
      const Complex sigma = -std::conj(data.poles.poles[k]);
      const Complex phi = std::conj(data.phi[k]);
      const Complex psi = std::conj(data.psi[k]);
      const Complex rho = std::conj(data.rho[k]);
      const CMat hval = h.eval(sigma), hhval = hhat.transfer(sigma);
      const CMat hder = h.eval_derivative(sigma), hhder = hhat.transfer_derivative(sigma);
      sum1_l += phi * hval;
      sum1_r += phi * hhval;
      td3_l += scalar(c.adjoint() * (psi * hder - rho * hval) * b);
      td3_r += scalar(c.adjoint() * (psi * hhder - rho * hhval) * b);
      td4_l += scalar(c.adjoint() * ((phi - psi) * hder + rho * hval) * b);
      td4_r += scalar(c.adjoint() * ((phi - psi) * hhder + rho * hhval) * b);
      merged_l += scalar(c.adjoint() * (phi * hder) * b);
      merged_r += scalar(c.adjoint() * (phi * hhder) * b);
    }
    push_record(report, "td-cond1", static_cast<int>(i), -1, sum1_l * b, sum1_r * b);
    push_record(report, "td-cond2", static_cast<int>(i), -1, c.adjoint() * sum1_l,
                c.adjoint() * sum1_r);
    push_record(report, "td-cond3", static_cast<int>(i), -1, as_mat(td3_l), as_mat(td3_r));
    push_record(report, "td-cond4", static_cast<int>(i), -1, as_mat(td4_l), as_mat(td4_r));
    push_record(report, "td-merged", static_cast<int>(i), -1, as_mat(merged_l), as_mat(merged_r));
  }
  return report;
}

}  // namespace strh2
