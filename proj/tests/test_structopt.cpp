#include <doctest.h>

#include <cmath>

#include "strh2/bench.hpp"
#include "strh2/errors.hpp"
#include "strh2/h2metric.hpp"
#include "strh2/optcond.hpp"
#include "strh2/structopt.hpp"
#include "strh2/wirtinger.hpp"
#include "support/oracles.hpp"

using namespace strh2;

namespace {

double theta_cost(const Parameterization& param, const RVec& theta,
                  const std::vector<CMat>& h_samples, const FrequencyGrid& grid) {
  return quadrature_cost(h_samples, rom_param_sep(param.unpack(theta)), grid);
}

}  // namespace

TEST_CASE("structure names round-trip and unknown tags are rejected") {
  CHECK(structure_from_string("unstructured") == Structure::Unstructured);
  CHECK(structure_to_string(Structure::Delay) == "delay");
  CHECK_THROWS_AS(structure_from_string("bogus"), UnsupportedStructure);
}

TEST_CASE("parameter counts") {
  CHECK(Parameterization(Structure::PortHamiltonian, 2, 1, 1).dim() == 6);
  CHECK(Parameterization(Structure::SecondOrder, 2, 1, 1).dim() == 8);
  CHECK(Parameterization(Structure::Unstructured, 2, 1, 1).dim() == 6);
  CHECK(Parameterization(Structure::Unstructured, 3, 1, 1).dim() == 9);
  CHECK(Parameterization(Structure::Delay, 1, 1, 1, 0.5).dim() == 4);
  CHECK(Parameterization(Structure::Delay, 2, 1, 1, 0.5).dim() == 8);
}

TEST_CASE("pack and unpack are inverse on feasible models") {
  SplitMix64 rng(211);

  SUBCASE("unstructured") {
    const Parameterization param(Structure::Unstructured, 3, 2, 1);
    const RVec theta = param.initial_theta(0.5, 5.0, rng);
    const RomVariant model = param.unpack(theta);
    const RVec back = param.pack(model);
    CHECK((back - theta).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("second order") {
    const Parameterization param(Structure::SecondOrder, 3, 1, 2);
    const RVec theta = param.initial_theta(0.5, 5.0, rng);
    const RVec back = param.pack(param.unpack(theta));
    CHECK((back - theta).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("port-Hamiltonian via a generated model") {
    const Parameterization param(Structure::PortHamiltonian, 3, 2, 2);
    const PHModel model = bench::gen_ph_random(3, 2, 212);
    const RVec theta = param.pack(model);
    const PHModel rebuilt = std::get<PHModel>(param.unpack(theta));
    CHECK((rebuilt.J - model.J).norm() < 1e-12 * std::max(1.0, model.J.norm()));
    CHECK((rebuilt.R - model.R).norm() < 1e-12 * std::max(1.0, model.R.norm()));
    CHECK((rebuilt.B - model.B).norm() == 0.0);
  }
  SUBCASE("delay") {
    const Parameterization param(Structure::Delay, 2, 1, 1, 0.5);
    RVec theta = param.initial_theta(0.5, 3.0, rng);
    const RVec back = param.pack(param.unpack(theta));
    CHECK((back - theta).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("every unpacked model satisfies its structural invariants") {
  SplitMix64 rng(221);
  for (int trial = 0; trial < 10; ++trial) {
    const Parameterization pu(Structure::Unstructured, 3, 1, 1);
    std::get<DiagonalStructuredROM>(pu.unpack(pu.initial_theta(0.2, 8.0, rng))).validate();
    const Parameterization ps(Structure::SecondOrder, 2, 1, 1);
    std::get<SecondOrderROM>(ps.unpack(ps.initial_theta(0.2, 8.0, rng))).validate();
    const Parameterization pp(Structure::PortHamiltonian, 2, 1, 1);
    std::get<PHModel>(pp.unpack(pp.initial_theta(0.2, 8.0, rng))).validate();
  }
}

TEST_CASE("chain rule matches finite differences for every structure") {
  const StateSpaceFOM fom = bench::gen_random_stable(8, 1, 1, 231);
  const auto h = make_evaluator(fom);
  const FrequencyGrid grid = default_grid(4.0, 512, 2);
  const auto h_samples = eval_on_grid(*h, grid);

  auto check_structure = [&](const Parameterization& param, SplitMix64& rng) {
    const RVec theta = param.initial_theta(0.5, 4.0, rng);
    const GradientBundle bundle = gradients(h_samples, rom_param_sep(param.unpack(theta)), grid);
    const RVec grad = param.chain_gradient(theta, bundle);
    for (Index t = 0; t < param.dim(); ++t) {
      const double h_step = 1e-5 * std::max(1.0, std::abs(theta(t)));
      const double fd = oracles::central_fd(
          [&](double x) {
            RVec perturbed = theta;
            perturbed(t) = x;
            return theta_cost(param, perturbed, h_samples, grid);
          },
          theta(t), h_step);
      CHECK(std::abs(grad(t) - fd) < 1e-5 * std::max(1.0, std::abs(fd)));
    }
  };

  SplitMix64 rng(232);
  check_structure(Parameterization(Structure::Unstructured, 3, 1, 1), rng);
  check_structure(Parameterization(Structure::SecondOrder, 2, 1, 1), rng);
  check_structure(Parameterization(Structure::PortHamiltonian, 2, 1, 1), rng);
  check_structure(Parameterization(Structure::Delay, 1, 1, 1, 0.5), rng);
}

TEST_CASE("gauge rebalancing moves along the orbit without changing the model") {
  SplitMix64 rng(215);
  const StateSpaceFOM fom = bench::gen_random_stable(6, 2, 2, 216);
  const auto h = make_evaluator(fom);
  const FrequencyGrid grid = default_grid(5.0, 256, 2);
  const auto h_samples = eval_on_grid(*h, grid);

  for (const Structure structure :
       {Structure::Unstructured, Structure::SecondOrder, Structure::Delay}) {
    const double tau = structure == Structure::Delay ? 0.5 : 0.0;
    const Parameterization param(structure, 3, 2, 2, tau);
    RVec theta = param.initial_theta(0.5, 4.0, rng);
    // push the residue scales far off balance along the orbit first
    const RVec balanced = param.gauge_balanced(theta);
    const auto before = rom_param_sep(param.unpack(theta));
    const auto after = rom_param_sep(param.unpack(balanced));
    for (int k = 0; k < 6; ++k) {
      const Complex s(0.0, -4.0 + 1.7 * k);
      const CMat h0 = before.transfer(s);
      const CMat h1 = after.transfer(s);
      CHECK((h0 - h1).norm() <= 1e-12 * std::max(1.0, h0.norm()));
    }
    const double c0 = quadrature_cost(h_samples, before, grid);
    const double c1 = quadrature_cost(h_samples, after, grid);
    CHECK(std::abs(c0 - c1) <= 1e-12 * std::max(1.0, c0));
  }
}

TEST_CASE("restart layout sweep reaches optima with distinct real poles") {
  // For this system the best order-2 reduction has two distinct real poles;
  // the conjugate-pair chart alone stalls at a strictly worse infimum.
  const StateSpaceFOM fom = bench::gen_random_stable(8, 1, 1, 42);
  const auto h = make_evaluator(fom);
  const auto band = spectral_band(fom);
  const FrequencyGrid grid = default_grid(band.second, 1024, 2);
  const Parameterization param(Structure::Unstructured, 2, 1, 1);

  MinimizeOptions options;
  options.grad_tol = 1e-9;
  options.max_iterations = 300;
  RestartOptions restarts;
  restarts.restarts = 2;  // one pair-layout start, one two-real start
  restarts.seed = 1;
  restarts.band_lo = band.first;
  restarts.band_hi = band.second;

  const OptimizeResult best = minimize_restarts(*h, param, grid, options, restarts);
  CHECK(best.termination == Termination::GradientTolerance);
  CHECK(best.final_cost < 1.2e-3);  // the paired chart bottoms out near 1.64e-3

  const auto& rom = std::get<DiagonalStructuredROM>(best.model);
  std::vector<Complex> coeffs;
  REQUIRE(rom.denominator(0).polynomial_coefficients(&coeffs));
  CHECK(std::abs((-coeffs[0]).imag()) < 1e-8);  // real pole
}

TEST_CASE("reaching the model itself terminates immediately") {
  // Seeded so the diagonalized spectrum is two clean conjugate pairs.
  StateSpaceFOM fom;
  for (std::uint64_t seed = 240;; ++seed) {
    fom = bench::gen_random_stable(4, 1, 1, seed);
    try {
      const DiagonalStructuredROM rom = to_diagonal(fom).rom;
      const Parameterization param(Structure::Unstructured, 4, 1, 1);
      param.pack(rom);
      break;
    } catch (const std::exception&) {
      continue;
    }
  }
  const DiagonalStructuredROM rom = to_diagonal(fom).rom;
  const Parameterization param(Structure::Unstructured, 4, 1, 1);
  const RVec theta0 = param.pack(rom);
  const auto h = make_evaluator(fom);
  const auto band = spectral_band(fom);
  const FrequencyGrid grid = default_grid(band.second, 512, 2);

  const OptimizeResult result = minimize(*h, param, theta0, grid);
  CHECK(result.termination == Termination::GradientTolerance);
  CHECK(result.final_cost < 1e-12);
  CHECK(result.iterations <= 1);
}

TEST_CASE("cost trace is non-increasing and the result is feasible") {
  const StateSpaceFOM fom = bench::gen_random_stable(6, 1, 1, 251);
  const auto h = make_evaluator(fom);
  const auto band = spectral_band(fom);
  const FrequencyGrid grid = default_grid(band.second, 512, 2);
  const Parameterization param(Structure::Unstructured, 2, 1, 1);

  SplitMix64 rng(252);
  MinimizeOptions options;
  options.max_iterations = 120;
  options.grad_tol = 1e-7;
  const OptimizeResult result =
      minimize(*h, param, param.initial_theta(band.first, band.second, rng), grid, options);

  REQUIRE(result.trace.size() > 1);
  for (size_t k = 1; k < result.trace.size(); ++k)
    CHECK(result.trace[k].cost <= result.trace[k - 1].cost + 1e-15);
  std::get<DiagonalStructuredROM>(result.model).validate();
}

TEST_CASE("restart driver converges and certifies on a small unstructured problem") {
  const StateSpaceFOM fom = bench::gen_random_stable(8, 1, 1, 261);
  const auto h = make_evaluator(fom);
  const auto band = spectral_band(fom);
  const FrequencyGrid grid = default_grid(band.second, 1024, 2);
  const Parameterization param(Structure::Unstructured, 2, 1, 1);

  MinimizeOptions options;
  options.max_iterations = 400;
  options.grad_tol = 1e-9;
  RestartOptions restarts;
  restarts.restarts = 8;
  restarts.seed = 262;
  restarts.band_lo = band.first;
  restarts.band_hi = band.second;

  const OptimizeResult best = minimize_restarts(*h, param, grid, options, restarts);
  CHECK(best.termination == Termination::GradientTolerance);
  CHECK(best.final_grad_norm < 1e-9);

  const ConditionReport report =
      residual_unstructured(*h, std::get<DiagonalStructuredROM>(best.model));
  CHECK(report.max_relative() < 1e-5);
}

TEST_CASE("line search rejects delay steps that destabilize the rom") {
  // mu close to the axis with large sigma: instability occurs within a unit
  // step of the initial point, so the optimizer must keep iterates feasible.
  const StateSpaceFOM fom = bench::gen_delay_fom(4, 0.6, 271);
  const auto h = make_evaluator(fom);
  const FrequencyGrid grid = default_grid(8.0, 512, 2);
  const Parameterization param(Structure::Delay, 1, 1, 1, 0.6);

  SplitMix64 rng(272);
  MinimizeOptions options;
  options.max_iterations = 60;
  options.grad_tol = 1e-8;
  const OptimizeResult result =
      minimize(*h, param, param.initial_theta(0.5, 4.0, rng), grid, options);
  const auto& rom = std::get<DelayROM>(result.model);
  CHECK_NOTHROW(rom.validate(2));
}
