#include "strh2/wirtinger.hpp"

#include <cmath>
#include <stdexcept>

#include "strh2/errors.hpp"
#include "strh2/linalg.hpp"
#include "strh2/utils.hpp"

namespace strh2 {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct NodeState {
  CMat x;    // A^{-1} B,   r x m
  CMat xd;   // A^{-*} C^*, r x p
  CMat diff; // H - Hhat,   p x m
  std::vector<Complex> alpha, beta, gamma;  // conjugated coefficient values
};

std::vector<NodeState> node_states(const std::vector<CMat>& h_samples, const ParamSepModel& rom,
                                   const FrequencyGrid& grid) {
  rom.validate();
  if (h_samples.size() != static_cast<size_t>(grid.nodes.size()))
    throw std::invalid_argument("sample count must match grid size");
  std::vector<NodeState> states(h_samples.size());
  detail::parallel_for(grid.nodes.size(), [&](Index k) {
    const Complex s(0.0, grid.nodes(k));
    NodeState& st = states[static_cast<size_t>(k)];
    const PivotedLU lu(rom.assemble_a(s));
    st.x = lu.solve(rom.assemble_b(s), s);
    st.xd = lu.solve_adjoint(rom.assemble_c(s).adjoint(), s);
    st.diff = h_samples[static_cast<size_t>(k)] - rom.assemble_c(s) * st.x;
    st.alpha.reserve(rom.a_terms.size());
    for (const auto& [f, m] : rom.a_terms) st.alpha.push_back(std::conj(f.eval(s)));
    st.beta.reserve(rom.b_terms.size());
    for (const auto& [f, m] : rom.b_terms) st.beta.push_back(std::conj(f.eval(s)));
    st.gamma.reserve(rom.c_terms.size());
    for (const auto& [f, m] : rom.c_terms) st.gamma.push_back(std::conj(f.eval(s)));
  });
  return states;
}

}  // namespace

double GradientBundle::norm() const {
  double acc = 0.0;
  for (const CMat& m : dA) acc += m.squaredNorm();
  for (const CMat& m : dB) acc += m.squaredNorm();
  for (const CMat& m : dC) acc += m.squaredNorm();
  return std::sqrt(acc);
}

GradientBundle gradients(const std::vector<CMat>& h_samples, const ParamSepModel& rom,
                         const FrequencyGrid& grid) {
  const std::vector<NodeState> states = node_states(h_samples, rom, grid);
  const Index r = rom.order(), m = rom.inputs(), p = rom.outputs();

  GradientBundle out;
  out.grid_nodes = static_cast<int>(grid.nodes.size());
  out.grid_scale = grid.scale;

  std::vector<detail::KahanMatrixSum> acc_a(rom.a_terms.size(), detail::KahanMatrixSum(r, r));
  std::vector<detail::KahanMatrixSum> acc_b(rom.b_terms.size(), detail::KahanMatrixSum(r, m));
  std::vector<detail::KahanMatrixSum> acc_c(rom.c_terms.size(), detail::KahanMatrixSum(p, r));
  detail::KahanSum cost;

  for (Index k = 0; k < grid.nodes.size(); ++k) {
    const NodeState& st = states[static_cast<size_t>(k)];
    const double w = grid.weights(k) / (2.0 * kPi);
    cost.add(w * st.diff.squaredNorm());
    const CMat xd_diff = st.xd * st.diff;          // r x m
    const CMat xstar = st.x.adjoint();             // m x r
    for (size_t i = 0; i < rom.a_terms.size(); ++i)
      acc_a[i].add((w * st.alpha[i]) * (xd_diff * xstar));
    for (size_t j = 0; j < rom.b_terms.size(); ++j)
      acc_b[j].add((-w * st.beta[j]) * xd_diff);
    for (size_t c = 0; c < rom.c_terms.size(); ++c)
      acc_c[c].add((-w * st.gamma[c]) * (st.diff * xstar));
  }

  for (auto& acc : acc_a) out.dA.push_back(acc.value());
  for (auto& acc : acc_b) out.dB.push_back(acc.value());
  for (auto& acc : acc_c) out.dC.push_back(acc.value());
  out.cost = cost.value();
  return out;
}

GradientBundle gradients(const TransferEvaluator& h, const ParamSepModel& rom,
                         const FrequencyGrid& grid) {
  grid.validate();
  return gradients(eval_on_grid(h, grid), rom, grid);
}

GradientBundle diag_restrict(GradientBundle bundle) {
  for (CMat& m : bundle.dA) {
    const CVec d = m.diagonal();
    m.setZero();
    m.diagonal() = d;
  }
  return bundle;
}

double quadrature_cost(const std::vector<CMat>& h_samples, const ParamSepModel& rom,
                       const FrequencyGrid& grid) {
  rom.validate();
  if (h_samples.size() != static_cast<size_t>(grid.nodes.size()))
    throw std::invalid_argument("sample count must match grid size");
  std::vector<double> integrand(h_samples.size());
  detail::parallel_for(grid.nodes.size(), [&](Index k) {
    const Complex s(0.0, grid.nodes(k));
    integrand[static_cast<size_t>(k)] =
        (h_samples[static_cast<size_t>(k)] - rom.transfer(s)).squaredNorm();
  });
  detail::KahanSum cost;
  for (Index k = 0; k < grid.nodes.size(); ++k)
    cost.add(grid.weights(k) / (2.0 * kPi) * integrand[static_cast<size_t>(k)]);
  return cost.value();
}

PHGradient ph_gradient(const std::vector<CMat>& h_samples, const PHModel& model,
                       const FrequencyGrid& grid) {
  const GradientBundle bundle = gradients(h_samples, model.to_param_sep(), grid);
  // to_param_sep lays the terms out as A(s) = s I - (J - R), B(s) = B, C(s) = B^T,
  // so dA[1] differentiates with respect to J - R directly; B enters both the
  // input and output maps, hence the transposed dC contribution.
  PHGradient out;
  out.dJR = 2.0 * bundle.dA[1].real();
  out.dB = 2.0 * (bundle.dB[0] + bundle.dC[0].transpose()).real();
  out.cost = bundle.cost;
  return out;
}

PHGradient ph_gradient(const TransferEvaluator& h, const PHModel& model, const FrequencyGrid& grid) {
  grid.validate();
  return ph_gradient(eval_on_grid(h, grid), model, grid);
}

}  // namespace strh2
