#include <doctest.h>

#include <cstdlib>

#include <cmath>

#include "strh2/bench.hpp"
#include "strh2/h2metric.hpp"
#include "strh2/sysmodel.hpp"
#include "strh2/wirtinger.hpp"
#include "support/oracles.hpp"

using namespace strh2;

namespace {

/// Random stable conjugate-paired diagonal ROM (r = 2), SISO.
DiagonalStructuredROM random_pair_rom(SplitMix64& rng) {
  DiagonalStructuredROM rom;
  const Complex lambda(-rng.uniform(0.4, 2.0), rng.uniform(0.5, 3.0));
  CVec diag(2);
  diag << lambda, std::conj(lambda);
  rom.a_terms.emplace_back(CoefficientFunction::monomial(1), CVec::Ones(2));
  rom.a_terms.emplace_back(CoefficientFunction::constant(1.0), CVec(-diag));
  const Complex b(rng.normal(), rng.normal());
  const Complex c(rng.normal(), rng.normal());
  rom.B = CMat(2, 1);
  rom.B << std::conj(b), b;
  rom.C = CMat(1, 2);
  rom.C << c, std::conj(c);
  return rom;
}

double cost_of(const std::vector<CMat>& h_samples, const ParamSepModel& model,
               const FrequencyGrid& grid) {
  return quadrature_cost(h_samples, model, grid);
}

}  // namespace

TEST_CASE("self-reduction: zero residual means zero gradients") {
  const StateSpaceFOM fom = bench::gen_random_stable(4, 2, 2, 11);
  const DiagonalStructuredROM rom = to_diagonal(fom).rom;
  const auto h = make_evaluator(fom);
  const FrequencyGrid grid = default_grid(6.0, 256, 2);
  const GradientBundle bundle = gradients(*h, rom.to_param_sep(), grid);
  CHECK(bundle.cost < 1e-18);
  for (const CMat& m : bundle.dA) CHECK(m.norm() < 1e-10);
  for (const CMat& m : bundle.dB) CHECK(m.norm() < 1e-10);
  for (const CMat& m : bundle.dC) CHECK(m.norm() < 1e-10);
}

TEST_CASE("gradients match Wirtinger finite differences entrywise") {
  SplitMix64 rng(13);
  const StateSpaceFOM fom = bench::gen_random_stable(6, 1, 1, 14);
  const auto h = make_evaluator(fom);
  const FrequencyGrid grid = default_grid(5.0, 512, 2);
  const auto h_samples = eval_on_grid(*h, grid);

  const DiagonalStructuredROM rom = random_pair_rom(rng);
  const ParamSepModel model = rom.to_param_sep();
  const GradientBundle bundle = gradients(h_samples, model, grid);

  auto check_entry = [&](auto setter, Complex analytic) {
    const double h_step = 1e-5;
    const Complex fd = oracles::wirtinger_fd(
        [&](Complex z) {
          ParamSepModel perturbed = model;
          setter(perturbed, z);
          return cost_of(h_samples, perturbed, grid);
        },
        Complex(0.0, 0.0), h_step);
    CHECK(std::abs(analytic - fd) < 1e-5 * std::max(1.0, std::abs(analytic)));
  };

  // every entry of the Lambda-term, including off-diagonals
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j)
      check_entry(
          [&, i, j](ParamSepModel& m, Complex dz) { m.a_terms[1].second(i, j) += dz; },
          bundle.dA[1](i, j));
  // B and C entries
  for (Index i = 0; i < 2; ++i) {
    check_entry([&, i](ParamSepModel& m, Complex dz) { m.b_terms[0].second(i, 0) += dz; },
                bundle.dB[0](i, 0));
    check_entry([&, i](ParamSepModel& m, Complex dz) { m.c_terms[0].second(0, i) += dz; },
                bundle.dC[0](0, i));
  }
}

TEST_CASE("gradient linearity: doubling C doubles dC when H = 0") {
  SplitMix64 rng(17);
  const DiagonalStructuredROM rom = random_pair_rom(rng);
  ParamSepModel model = rom.to_param_sep();
  const ZeroTransfer zero(1, 1);
  const FrequencyGrid grid = default_grid(4.0, 512, 2);
  const auto samples = eval_on_grid(zero, grid);

  const GradientBundle g1 = gradients(samples, model, grid);
  model.c_terms[0].second *= 2.0;
  const GradientBundle g2 = gradients(samples, model, grid);
  CHECK((g2.dC[0] - 2.0 * g1.dC[0]).norm() < 1e-8 * std::max(1.0, g1.dC[0].norm()));
}

TEST_CASE("diag restriction") {
  GradientBundle bundle;
  CMat m(2, 2);
  m << Complex(1, 0), Complex(2, 0), Complex(3, 0), Complex(4, 0);
  bundle.dA.push_back(m);
  const GradientBundle restricted = diag_restrict(bundle);
  CHECK(restricted.dA[0](0, 0) == Complex(1, 0));
  CHECK(restricted.dA[0](1, 1) == Complex(4, 0));
  CHECK(restricted.dA[0](0, 1) == Complex(0, 0));
  CHECK(restricted.dA[0](1, 0) == Complex(0, 0));

  // already diagonal: unchanged
  GradientBundle diag_only;
  CMat d = CMat::Zero(2, 2);
  d(0, 0) = Complex(5, 1);
  d(1, 1) = Complex(-2, 3);
  diag_only.dA.push_back(d);
  CHECK((diag_restrict(diag_only).dA[0] - d).norm() == 0.0);
}

TEST_CASE("diag-restricted gradient matches FD for diagonal perturbations") {
  SplitMix64 rng(19);
  const StateSpaceFOM fom = bench::gen_random_stable(6, 1, 1, 20);
  const auto h = make_evaluator(fom);
  const FrequencyGrid grid = default_grid(5.0, 512, 2);
  const auto h_samples = eval_on_grid(*h, grid);

  const DiagonalStructuredROM rom = random_pair_rom(rng);
  const ParamSepModel model = rom.to_param_sep();
  const GradientBundle restricted = diag_restrict(gradients(h_samples, model, grid));

  for (Index l = 0; l < 2; ++l) {
    const Complex fd = oracles::wirtinger_fd(
        [&](Complex z) {
          ParamSepModel perturbed = model;
          perturbed.a_terms[1].second(l, l) += z;
          return cost_of(h_samples, perturbed, grid);
        },
        Complex(0.0, 0.0), 1e-5);
    CHECK(std::abs(restricted.dA[1](l, l) - fd) <
          1e-5 * std::max(1.0, std::abs(restricted.dA[1](l, l))));
  }
}

TEST_CASE("conjugate-pair gradient consistency for real systems") {
  SplitMix64 rng(23);
  const StateSpaceFOM fom = bench::gen_random_stable(6, 1, 1, 24);
  const auto h = make_evaluator(fom);
  const FrequencyGrid grid = default_grid(5.0, 512, 2);

  const DiagonalStructuredROM rom = random_pair_rom(rng);
  const GradientBundle bundle = gradients(*h, rom.to_param_sep(), grid);
  // index pair (0, 1) in the Lambda term
  CHECK(std::abs(bundle.dA[1](0, 0) - std::conj(bundle.dA[1](1, 1))) <
        1e-10 * std::max(1.0, std::abs(bundle.dA[1](0, 0))));
}

TEST_CASE("ph gradient: vanishing at the model itself, zero at B = 0") {
  const PHModel model = bench::gen_ph_random(3, 1, 31);
  const auto h = make_evaluator(model);
  const FrequencyGrid grid = default_grid(10.0, 512, 2);

  const PHGradient grad = ph_gradient(*h, model, grid);
  CHECK(grad.dJR.norm() < 1e-9);
  CHECK(grad.dB.norm() < 1e-9);

  PHModel silent = model;
  silent.B.setZero();
  const PHGradient zero_b = ph_gradient(*h, silent, grid);
  CHECK(zero_b.dJR.norm() == 0.0);
  CHECK(zero_b.dB.norm() == 0.0);
}

TEST_CASE("gradients are bitwise deterministic across thread caps") {
  SplitMix64 rng(29);
  const StateSpaceFOM fom = bench::gen_random_stable(6, 1, 1, 30);
  const auto h = make_evaluator(fom);
  const FrequencyGrid grid = default_grid(5.0, 512, 2);
  const ParamSepModel model = random_pair_rom(rng).to_param_sep();

  setenv("STRH2_THREADS", "1", 1);
  const GradientBundle serial = gradients(*h, model, grid);
  setenv("STRH2_THREADS", "2", 1);
  const GradientBundle threaded = gradients(*h, model, grid);
  unsetenv("STRH2_THREADS");

  CHECK(serial.cost == threaded.cost);
  for (size_t i = 0; i < serial.dA.size(); ++i)
    CHECK((serial.dA[i] - threaded.dA[i]).norm() == 0.0);
  for (size_t i = 0; i < serial.dB.size(); ++i)
    CHECK((serial.dB[i] - threaded.dB[i]).norm() == 0.0);
}

TEST_CASE("ph gradient matches real finite differences through J - R and B") {
  const PHModel model = bench::gen_ph_random(2, 1, 37);
  const StateSpaceFOM fom = bench::gen_random_stable(6, 1, 1, 38);
  const auto h = make_evaluator(fom);
  const FrequencyGrid grid = default_grid(8.0, 1024, 2);
  const auto h_samples = eval_on_grid(*h, grid);

  const PHGradient grad = ph_gradient(h_samples, model, grid);

  auto cost_at = [&](const RMat& a, const RMat& b) {
    PHModel perturbed;
    perturbed.J = 0.5 * (a - a.transpose());
    perturbed.R = -0.5 * (a + a.transpose());
    perturbed.B = b;
    return quadrature_cost(h_samples, perturbed.to_param_sep(), grid);
  };

  const RMat a0 = model.J - model.R;
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 2; ++j) {
      const double fd = oracles::central_fd(
          [&](double t) {
            RMat a = a0;
            a(i, j) += t;
            return cost_at(a, model.B);
          },
          0.0, 1e-5);
      CHECK(std::abs(grad.dJR(i, j) - fd) < 1e-5 * std::max(1.0, std::abs(fd)));
    }
    const double fd_b = oracles::central_fd(
        [&](double t) {
          RMat b = model.B;
          b(i, 0) += t;
          return cost_at(a0, b);
        },
        0.0, 1e-5);
    CHECK(std::abs(grad.dB(i, 0) - fd_b) < 1e-5 * std::max(1.0, std::abs(fd_b)));
  }
}
