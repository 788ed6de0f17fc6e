#include <benchmark/benchmark.h>

#include "strh2/bench.hpp"
#include "strh2/h2metric.hpp"
#include "strh2/optcond.hpp"
#include "strh2/spectra.hpp"
#include "strh2/structopt.hpp"
#include "strh2/wirtinger.hpp"

using namespace strh2;

namespace {

void bm_transfer_eval(benchmark::State& state) {
  const StateSpaceFOM fom = bench::gen_random_stable(state.range(0), 2, 2, 1);
  Complex s(0.0, 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fom.transfer(s));
    s += Complex(0.0, 1e-6);
  }
}
BENCHMARK(bm_transfer_eval)->Arg(10)->Arg(40)->Arg(100);

void bm_lambert_w(benchmark::State& state) {
  Complex z(0.4, 0.3);
  int j = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lambert_w(j, z));
    j = (j + 1) % 5 - 2;
    z += Complex(1e-9, 0.0);
  }
}
BENCHMARK(bm_lambert_w);

void bm_delay_poles(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(delay_poles(Complex(-1.0, 0.4), Complex(0.2, 0.0), 0.7,
                                         static_cast<int>(state.range(0))));
}
BENCHMARK(bm_delay_poles)->Arg(4)->Arg(16)->Arg(64);

void bm_h2_error(benchmark::State& state) {
  const StateSpaceFOM fom = bench::gen_random_stable(12, 1, 1, 2);
  const DiagonalStructuredROM rom = to_diagonal(bench::gen_random_stable(3, 1, 1, 3)).rom;
  const auto h = make_evaluator(fom);
  const auto g = make_evaluator(rom);
  const FrequencyGrid grid = build_grid(30.0, static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(h2_error_quadrature(*h, *g, grid));
}
BENCHMARK(bm_h2_error)->Arg(256)->Arg(1024)->Arg(4096);

void bm_gradient_bundle(benchmark::State& state) {
  const StateSpaceFOM fom = bench::gen_random_stable(10, 1, 1, 4);
  const auto h = make_evaluator(fom);
  const FrequencyGrid grid = build_grid(30.0, static_cast<int>(state.range(0)), 2);
  const auto samples = eval_on_grid(*h, grid);
  const Parameterization param(Structure::Unstructured, 3, 1, 1);
  SplitMix64 rng(5);
  const ParamSepModel rom = rom_param_sep(param.unpack(param.initial_theta(0.5, 5.0, rng)));
  for (auto _ : state) benchmark::DoNotOptimize(gradients(samples, rom, grid));
}
BENCHMARK(bm_gradient_bundle)->Arg(256)->Arg(1024);

void bm_residual_unstructured(benchmark::State& state) {
  const StateSpaceFOM fom = bench::gen_random_stable(10, 1, 1, 6);
  const DiagonalStructuredROM rom = to_diagonal(bench::gen_random_stable(4, 1, 1, 7)).rom;
  const auto h = make_evaluator(fom);
  for (auto _ : state) benchmark::DoNotOptimize(residual_unstructured(*h, rom));
}
BENCHMARK(bm_residual_unstructured);

void bm_polynomial_roots(benchmark::State& state) {
  SplitMix64 rng(8);
  std::vector<Complex> coeffs(static_cast<size_t>(state.range(0)) + 1);
  for (auto& c : coeffs) c = Complex(rng.normal(), rng.normal());
  coeffs.back() = Complex(1.0, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(polynomial_roots(coeffs));
}
BENCHMARK(bm_polynomial_roots)->Arg(4)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
