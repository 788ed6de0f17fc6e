#include "strh2/h2metric.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

#include "strh2/errors.hpp"
#include "strh2/linalg.hpp"
#include "strh2/utils.hpp"

namespace strh2 {

namespace detail {

int thread_cap() {
  int cap = static_cast<int>(std::thread::hardware_concurrency());
  if (cap < 1) cap = 1;
  if (const char* env = std::getenv("STRH2_THREADS")) {
    const int requested = std::atoi(env);
    if (requested >= 1) cap = std::min(cap, requested);
  }
  return cap;
}

void parallel_for(Index n, const std::function<void(Index)>& fn) {
  const int workers = std::min<Index>(thread_cap(), std::max<Index>(n, 1));
  if (workers <= 1 || n < 32) {
    for (Index k = 0; k < n; ++k) fn(k);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<Index> next{0};
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (Index k = next.fetch_add(1); k < n; k = next.fetch_add(1)) fn(k);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

void FrequencyGrid::validate() const {
  if (nodes.size() != weights.size() || nodes.size() < 2)
    throw std::invalid_argument("grid needs matching nodes and weights");
  for (Index k = 0; k + 1 < nodes.size(); ++k)
    if (!(nodes(k) < nodes(k + 1))) throw std::invalid_argument("grid nodes must increase strictly");
  if (!(weights.minCoeff() > 0.0)) throw std::invalid_argument("grid weights must be positive");
  for (Index k = 0; k < nodes.size(); ++k) {
    const double mirror = -nodes(nodes.size() - 1 - k);
    if (std::abs(nodes(k) - mirror) > 1e-12 * (1.0 + std::abs(nodes(k))))
      throw std::invalid_argument("grid must be symmetric about 0");
  }
}

FrequencyGrid build_grid(double half_width, int n_nodes, int decay_order) {
  if (!(half_width > 0.0)) throw std::invalid_argument("grid scale must be positive");
  if (n_nodes < 16 || n_nodes % 2 != 0) throw std::invalid_argument("node count must be even and >= 16");
  if (decay_order < 2) throw std::invalid_argument("decay order must be >= 2");

  FrequencyGrid grid;
  grid.nodes.resize(n_nodes);
  grid.weights.resize(n_nodes);
  grid.scale = half_width;
  grid.decay_order = decay_order;
  // Fill the positive half and mirror so the grid is symmetric bit-for-bit;
  // tan near +-pi/2 amplifies angle rounding by sec^2 otherwise.
  for (int k = n_nodes / 2; k < n_nodes; ++k) {
    const double theta = -kPi / 2.0 + kPi * (k + 0.5) / n_nodes;
    const double c = std::cos(theta);
    grid.nodes(k) = half_width * std::tan(theta);
    grid.weights(k) = kPi / n_nodes * half_width / (c * c);
    grid.nodes(n_nodes - 1 - k) = -grid.nodes(k);
    grid.weights(n_nodes - 1 - k) = grid.weights(k);
  }
  grid.tail_bound =
      1.0 / kPi * std::pow(half_width, 1.0 - decay_order) / (decay_order - 1.0);
  return grid;
}

FrequencyGrid default_grid(double max_pole_magnitude, int n_nodes, int decay_order) {
  return build_grid(10.0 * std::max(max_pole_magnitude, 0.1), n_nodes, decay_order);
}

std::vector<CMat> eval_on_grid(const TransferEvaluator& h, const FrequencyGrid& grid) {
  std::vector<CMat> out(static_cast<size_t>(grid.nodes.size()));
  detail::parallel_for(grid.nodes.size(),
                       [&](Index k) { out[static_cast<size_t>(k)] = h.eval(Complex(0.0, grid.nodes(k))); });
  return out;
}

namespace {

QuadratureResult error_from_integrand(const std::vector<double>& integrand, const FrequencyGrid& grid) {
  detail::KahanSum sum;
  for (Index k = 0; k < grid.nodes.size(); ++k)
    sum.add(grid.weights(k) * integrand[static_cast<size_t>(k)]);

  // Amplitude of the decay model integrand ~ C omega^-d, estimated on the
  // nodes beyond the substitution scale.
  double amplitude = 0.0;
  for (Index k = 0; k < grid.nodes.size(); ++k) {
    const double w = std::abs(grid.nodes(k));
    if (w >= grid.scale)
      amplitude = std::max(amplitude,
                           integrand[static_cast<size_t>(k)] * std::pow(w, grid.decay_order));
  }
  QuadratureResult out;
  out.value = sum.value() / (2.0 * kPi);
  out.uncertainty = amplitude * grid.tail_bound;
  return out;
}

}  // namespace

QuadratureResult h2_error_quadrature(const TransferEvaluator& h, const TransferEvaluator& hhat,
                                     const FrequencyGrid& grid) {
  grid.validate();
  std::vector<double> integrand(static_cast<size_t>(grid.nodes.size()));
  detail::parallel_for(grid.nodes.size(), [&](Index k) {
    const Complex s(0.0, grid.nodes(k));
    integrand[static_cast<size_t>(k)] = (h.eval(s) - hhat.eval(s)).squaredNorm();
  });
  return error_from_integrand(integrand, grid);
}

QuadratureResult h2_error_quadrature(const std::vector<CMat>& h_samples,
                                     const std::vector<CMat>& hhat_samples,
                                     const FrequencyGrid& grid) {
  if (h_samples.size() != static_cast<size_t>(grid.nodes.size()) || h_samples.size() != hhat_samples.size())
    throw std::invalid_argument("sample count must match grid size");
  std::vector<double> integrand(h_samples.size());
  for (size_t k = 0; k < h_samples.size(); ++k)
    integrand[k] = (h_samples[k] - hhat_samples[k]).squaredNorm();
  return error_from_integrand(integrand, grid);
}

namespace {

RMat lyapunov_kronecker(const RMat& a, const RMat& w) {
  const Index n = a.rows();
  RMat kron = RMat::Zero(n * n, n * n);
  // vec(A P + P A^T) = (I kron A + A kron I) vec(P), column-major vec.
  for (Index j = 0; j < n; ++j)
    kron.block(j * n, j * n, n, n) += a;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < n; ++k) kron(i * n + k, j * n + k) += a(i, j);
  Eigen::PartialPivLU<RMat> lu(kron);
  RVec rhs(n * n);
  for (Index j = 0; j < n; ++j) rhs.segment(j * n, n) = -w.col(j);
  const RVec x = lu.solve(rhs);
  RMat p(n, n);
  for (Index j = 0; j < n; ++j) p.col(j) = x.segment(j * n, n);
  return 0.5 * (p + p.transpose());
}

RMat lyapunov_eig(const RMat& a, const RMat& w) {
  const Eigendecomposition eig = eig_sorted(a.cast<Complex>());
  const PivotedLU lu(eig.vectors);
  const CMat wt = lu.solve(w.cast<Complex>());     // V^{-1} W
  const CMat q0 = lu.solve(wt.adjoint()).adjoint();  // V^{-1} W V^{-*}
  CMat q(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      q(i, j) = -q0(i, j) / (eig.values(i) + std::conj(eig.values(j)));
  const CMat p = eig.vectors * q * eig.vectors.adjoint();
  return 0.5 * (p.real() + p.real().transpose());
}

}  // namespace

double h2_norm_gramian(const StateSpaceFOM& fom) {
  if (fom.has_delay())
    throw UnsupportedStructure("Gramian path is defined for delay-free systems only");
  fom.validate();
  if (fom.order() > 200) throw std::invalid_argument("Gramian path supports n <= 200");

  const PivotedLU elu(fom.E.cast<Complex>());
  const RMat a = elu.solve(fom.A.cast<Complex>()).real();
  const RMat b = elu.solve(fom.B.cast<Complex>()).real();

  Eigen::ComplexEigenSolver<CMat> es(a.cast<Complex>(), false);
  if (es.info() != Eigen::Success) throw NoConvergence("eigensolver failed");
  if (!(es.eigenvalues().real().maxCoeff() < -1e-12)) throw UnstableSystem();

  const RMat w = b * b.transpose();
  const RMat p = fom.order() <= 64 ? lyapunov_kronecker(a, w) : lyapunov_eig(a, w);
  const double squared = (fom.C * p * fom.C.transpose()).trace();
  return std::sqrt(std::max(squared, 0.0));
}

Complex h2_inner_rational(const PoleResidueForm& g, const TransferEvaluator& h) {
  detail::KahanSum re, im;
  for (const auto& entry : g.entries) {
    const CoefficientFunction aprime = entry.a.derivative();
    for (const Complex& lambda : entry.poles.poles) {
      if (!(lambda.real() < 0.0)) throw UnstablePole(lambda);
      const Complex ap = aprime.eval(lambda);
      if (!(std::abs(ap) > 1e-10 * (1.0 + std::abs(lambda)))) throw NotASimpleZero();
      const Complex hval = (entry.c.adjoint() * h.eval(-std::conj(lambda)) * entry.b)(0, 0);
      const Complex term = std::conj(hval / std::conj(ap));
      re.add(term.real());
      im.add(term.imag());
    }
  }
  return Complex(re.value(), im.value());
}

Complex h2_inner_quadrature(const TransferEvaluator& f, const TransferEvaluator& g,
                            const FrequencyGrid& grid) {
  grid.validate();
  std::vector<Complex> samples(static_cast<size_t>(grid.nodes.size()));
  detail::parallel_for(grid.nodes.size(), [&](Index k) {
    const Complex s(0.0, grid.nodes(k));
    samples[static_cast<size_t>(k)] = (f.eval(s).adjoint() * g.eval(s)).trace();
  });
  detail::KahanSum re, im;
  for (Index k = 0; k < grid.nodes.size(); ++k) {
    re.add(grid.weights(k) * samples[static_cast<size_t>(k)].real());
    im.add(grid.weights(k) * samples[static_cast<size_t>(k)].imag());
  }
  return Complex(re.value(), im.value()) / (2.0 * kPi);
}

}  // namespace strh2
