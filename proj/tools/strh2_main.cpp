#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "strh2/bench.hpp"
#include "strh2/errors.hpp"
#include "strh2/h2metric.hpp"
#include "strh2/io.hpp"
#include "strh2/linalg.hpp"
#include "strh2/optcond.hpp"
#include "strh2/structopt.hpp"
#include "strh2/wirtinger.hpp"

using namespace strh2;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitUnstable = 3;
constexpr int kExitOptimizer = 4;
constexpr int kExitCertification = 5;

struct GridFlags {
  int nodes = 1024;
  double scale = 0.0;  // 0: derive from the model band
  int decay_order = 2;

  void attach(CLI::App* cmd) {
    cmd->add_option("--grid-nodes", nodes, "quadrature nodes (even, >= 16)");
    cmd->add_option("--grid-scale", scale, "substitution half-width Omega (default: 10x largest pole)");
    cmd->add_option("--decay-order", decay_order, "assumed integrand decay order (>= 2)");
  }

  FrequencyGrid make(double band_hi) const {
    const double omega = scale > 0.0 ? scale : 10.0 * std::max(band_hi, 0.1);
    return build_grid(omega, nodes, decay_order);
  }
};

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

double band_hi_of(const ModelAny& model) {
  if (const auto* fom = std::get_if<StateSpaceFOM>(&model)) return spectral_band(*fom).second;
  if (const auto* fom = std::get_if<SecondOrderFOM>(&model)) return spectral_band(*fom).second;
  if (const auto* ph = std::get_if<PHModel>(&model)) {
    const Eigendecomposition eig = eig_sorted((ph->J - ph->R).cast<Complex>());
    return eig.values.cwiseAbs().maxCoeff();
  }
  if (const auto* rom = std::get_if<DelayROM>(&model)) return rom->mu.cwiseAbs().maxCoeff() + 1.0;
  if (const auto* rom = std::get_if<SecondOrderROM>(&model)) {
    double hi = 0.0;
    for (Index l = 0; l < rom->order(); ++l) hi = std::max(hi, std::sqrt(rom->stiffness(l)));
    return hi;
  }
  return 10.0;
}

double band_lo_of(const ModelAny& model) {
  if (const auto* fom = std::get_if<StateSpaceFOM>(&model)) return spectral_band(*fom).first;
  if (const auto* fom = std::get_if<SecondOrderFOM>(&model)) return spectral_band(*fom).first;
  return 0.1 * band_hi_of(model);
}

bool model_is_stable(const ModelAny& model) {
  if (const auto* fom = std::get_if<StateSpaceFOM>(&model)) return fom->verify_stability();
  try {
    if (const auto* ph = std::get_if<PHModel>(&model)) {
      ph->validate();
      return true;
    }
    if (const auto* rom = std::get_if<DelayROM>(&model)) {
      rom->validate(4);
      return true;
    }
    if (const auto* rom = std::get_if<DiagonalStructuredROM>(&model)) {
      for (const PoleSet& set : compute_pole_sets(*rom))
        for (const Complex& pole : set.poles)
          if (!(pole.real() < 0.0)) return false;
      return true;
    }
    if (const auto* rom = std::get_if<SecondOrderROM>(&model)) {
      const SecondOrderFactors f = second_order_factorization(*rom);
      return f.lambda_plus.real().maxCoeff() < 0.0 && f.lambda_minus.real().maxCoeff() < 0.0;
    }
    if (const auto* fom = std::get_if<SecondOrderFOM>(&model)) {
      const Index n = fom->order();
      StateSpaceFOM first;
      first.E = RMat::Identity(2 * n, 2 * n);
      first.E.bottomRightCorner(n, n) = fom->M;
      first.A = RMat::Zero(2 * n, 2 * n);
      first.A.topRightCorner(n, n) = RMat::Identity(n, n);
      first.A.bottomLeftCorner(n, n) = -fom->K;
      first.A.bottomRightCorner(n, n) = -fom->E;
      first.B = RMat::Zero(2 * n, fom->inputs());
      first.C = RMat::Zero(fom->outputs(), 2 * n);
      return first.verify_stability();
    }
  } catch (const Error&) {
    return false;
  }
  return true;
}

/// First-order embedding used for the Gramian path of rational kinds.
std::optional<StateSpaceFOM> first_order_embedding(const ModelAny& model) {
  if (const auto* fom = std::get_if<StateSpaceFOM>(&model)) {
    if (fom->has_delay()) return std::nullopt;
    return *fom;
  }
  if (const auto* ph = std::get_if<PHModel>(&model)) {
    StateSpaceFOM out;
    out.E = RMat::Identity(ph->order(), ph->order());
    out.A = ph->J - ph->R;
    out.B = ph->B;
    out.C = ph->B.transpose();
    return out;
  }
  if (const auto* so = std::get_if<SecondOrderFOM>(&model)) {
    const Index n = so->order();
    StateSpaceFOM out;
    out.E = RMat::Identity(2 * n, 2 * n);
    out.E.bottomRightCorner(n, n) = so->M;
    out.A = RMat::Zero(2 * n, 2 * n);
    out.A.topRightCorner(n, n) = RMat::Identity(n, n);
    out.A.bottomLeftCorner(n, n) = -so->K;
    out.A.bottomRightCorner(n, n) = -so->E;
    out.B = RMat::Zero(2 * n, so->inputs());
    out.B.bottomRows(n) = so->B;
    out.C = RMat::Zero(so->outputs(), 2 * n);
    out.C.leftCols(n) = so->C;
    return out;
  }
  if (const auto* so = std::get_if<SecondOrderROM>(&model)) {
    SecondOrderFOM full;
    full.M = RMat::Identity(so->order(), so->order());
    full.E = so->damping.asDiagonal();
    full.K = so->stiffness.asDiagonal();
    full.B = so->B;
    full.C = so->C;
    return first_order_embedding(full);
  }
  return std::nullopt;
}

// --- generate ---

struct GenerateArgs {
  std::string kind;
  Index n = 4, m = 1, p = 1, masses = 3;
  double alpha = 0.1, beta = 0.2, tau = 0.5;
  std::uint64_t seed = 1;
  std::string output;
};

int run_generate(const GenerateArgs& args) {
  ModelAny model;
  if (args.kind == "random_stable") {
    model = bench::gen_random_stable(args.n, args.m, args.p, args.seed);
  } else if (args.kind == "msd") {
    model = bench::gen_msd_chain(args.masses, args.alpha, args.beta, args.seed);
  } else if (args.kind == "ph") {
    model = bench::gen_ph_random(args.n, args.m, args.seed);
  } else if (args.kind == "delay") {
    model = bench::gen_delay_fom(args.n, args.tau, args.seed);
  } else {
    std::cerr << "unknown kind: " << args.kind << "\n";
    return kExitUsage;
  }
  save_model(args.output, model);
  std::cout << "wrote " << model_kind(model) << " model (n = " << model_order(model) << ") to "
            << args.output << "\n";
  return kExitOk;
}

// --- h2norm ---

struct H2NormArgs {
  std::string model_path;
  GridFlags grid;
};

int run_h2norm(const H2NormArgs& args) {
  const ModelAny model = load_model(args.model_path);
  if (!model_is_stable(model)) {
    std::cerr << "model is not (verifiably) stable\n";
    return kExitUnstable;
  }
  const auto h = evaluator_for(model);
  const FrequencyGrid grid = args.grid.make(band_hi_of(model));
  const ZeroTransfer zero(h->outputs(), h->inputs());
  const QuadratureResult quad = h2_error_quadrature(*h, zero, grid);
  const double quad_norm = std::sqrt(quad.value);
  std::cout << "quadrature H2 norm: " << quad_norm << "  (tail bound "
            << std::sqrt(std::max(quad.uncertainty, 0.0)) << ", " << grid.nodes.size()
            << " nodes)\n";

  if (const auto embedded = first_order_embedding(model)) {
    const double gram = h2_norm_gramian(*embedded);
    std::cout << "Gramian H2 norm:    " << gram << "\n";
    std::cout << "discrepancy:        " << std::abs(gram - quad_norm) << "\n";
  } else {
    std::cout << "Gramian path not available for this kind (quadrature only)\n";
  }
  return kExitOk;
}

// --- reduce ---

struct ReduceArgs {
  std::string fom_path;
  std::string structure = "unstructured";
  Index order = 2;
  int restarts = 10;
  double grad_tol = 1e-9;
  int max_iter = 500;
  double tol = 1e-6;
  std::uint64_t seed = 1;
  std::string output = "rom.json";
  std::string result_path;
  std::string report_path;
  GridFlags grid;
};

json config_json(const ReduceArgs& args) {
  return json{{"subcommand", "reduce"},
              {"fom", args.fom_path},
              {"structure", args.structure},
              {"order", args.order},
              {"restarts", args.restarts},
              {"grad_tol", args.grad_tol},
              {"max_iterations", args.max_iter},
              {"tolerance", args.tol},
              {"seed", args.seed},
              {"grid_nodes", args.grid.nodes},
              {"grid_scale", args.grid.scale},
              {"decay_order", args.grid.decay_order}};
}

ConditionReport certify(const TransferEvaluator& h, const RomVariant& rom) {
  if (const auto* diag = std::get_if<DiagonalStructuredROM>(&rom)) return residual_unstructured(h, *diag);
  if (const auto* so = std::get_if<SecondOrderROM>(&rom)) return residual_second_order(h, *so);
  if (const auto* ph = std::get_if<PHModel>(&rom)) return residual_ph(h, *ph);
  return residual_delay(h, std::get<DelayROM>(rom));
}

ModelAny to_model_any(const RomVariant& rom) {
  return std::visit([](const auto& m) { return ModelAny(m); }, rom);
}

int run_reduce(const ReduceArgs& args) {
  const ModelAny fom = load_model(args.fom_path);
  if (args.order >= model_order(fom)) {
    std::cerr << "reduced order r must satisfy r < n\n";
    return kExitUsage;
  }
  if (!model_is_stable(fom)) {
    std::cerr << "full-order model failed the stability check\n";
    return kExitUnstable;
  }

  const Structure structure = structure_from_string(args.structure);
  double tau = 0.0;
  if (structure == Structure::Delay) {
    const auto* ss = std::get_if<StateSpaceFOM>(&fom);
    if (ss == nullptr || !ss->has_delay()) {
      std::cerr << "delay reduction expects a state-space FOM with a delay term\n";
      return kExitUsage;
    }
    tau = ss->tau;
  }
  if (structure == Structure::PortHamiltonian && model_inputs(fom) != model_outputs(fom)) {
    std::cerr << "pH reduction needs a square (p = m) FOM\n";
    return kExitUsage;
  }

  const auto h = evaluator_for(fom);
  const FrequencyGrid grid = args.grid.make(band_hi_of(fom));
  const Parameterization param(structure, args.order, model_inputs(fom), model_outputs(fom), tau);

  MinimizeOptions options;
  options.grad_tol = args.grad_tol;
  options.max_iterations = args.max_iter;
  RestartOptions restarts;
  restarts.restarts = args.restarts;
  restarts.seed = args.seed;
  restarts.band_lo = band_lo_of(fom);
  restarts.band_hi = band_hi_of(fom);

  OptimizeResult best;
  try {
    best = minimize_restarts(*h, param, grid, options, restarts);
  } catch (const NoConvergence& e) {
    std::cerr << "optimizer failed: " << e.what() << "\n";
    return kExitOptimizer;
  }

  save_model(args.output, to_model_any(best.model));

  json result{{"config", config_json(args)},
              {"timestamp", timestamp_now()},
              {"termination", termination_to_string(best.termination)},
              {"final_cost", best.final_cost},
              {"final_grad_norm", best.final_grad_norm},
              {"iterations", best.iterations}};
  json trace = json::array();
  for (const TraceRow& row : best.trace)
    trace.push_back({{"iteration", row.iteration},
                     {"cost", row.cost},
                     {"grad_norm", row.grad_norm},
                     {"step", row.step}});
  result["trace"] = trace;
  if (!args.result_path.empty()) write_json_file(args.result_path, result);

  const ConditionReport report = certify(*h, best.model);
  json report_json = report.to_json();
  report_json["config"] = config_json(args);
  report_json["timestamp"] = timestamp_now();
  if (!args.report_path.empty()) write_json_file(args.report_path, report_json);

  std::cout << "termination: " << termination_to_string(best.termination) << ", cost "
            << best.final_cost << ", |grad| " << best.final_grad_norm << "\n";
  std::cout << report.to_table();
  std::cout << "max relative residual: " << report.max_relative() << " (tolerance " << args.tol
            << ")\n";

  if (best.termination != Termination::GradientTolerance) {
    std::cerr << "optimizer did not reach the gradient tolerance\n";
    return kExitOptimizer;
  }
  if (!report.pass(args.tol)) return kExitCertification;
  return kExitOk;
}

// --- check-conditions ---

struct CheckArgs {
  std::string fom_path;
  std::string rom_path;
  std::string structure = "unstructured";
  double tol = 1e-6;
  std::string report_path;
};

int run_check_conditions(const CheckArgs& args) {
  const ModelAny fom = load_model(args.fom_path);
  const ModelAny rom_any = load_model(args.rom_path);
  const auto h = evaluator_for(fom);
  const Structure structure = structure_from_string(args.structure);

  ConditionReport report;
  switch (structure) {
    case Structure::Unstructured: {
      const auto* rom = std::get_if<DiagonalStructuredROM>(&rom_any);
      if (rom == nullptr) throw ParseError("expected a diagonal (param_sep) ROM file");
      report = residual_unstructured(*h, *rom);
      break;
    }
    case Structure::SecondOrder: {
      const auto* rom = std::get_if<SecondOrderROM>(&rom_any);
      if (rom == nullptr) throw ParseError("expected a diagonal second_order ROM file");
      report = residual_second_order(*h, *rom);
      const ConditionReport twod = residual_second_order_2d(*h, *rom);
      report.records.insert(report.records.end(), twod.records.begin(), twod.records.end());
      break;
    }
    case Structure::PortHamiltonian: {
      const auto* rom = std::get_if<PHModel>(&rom_any);
      if (rom == nullptr) throw ParseError("expected a ph ROM file");
      report = residual_ph(*h, *rom);
      break;
    }
    case Structure::Delay: {
      const auto* rom = std::get_if<DelayROM>(&rom_any);
      if (rom == nullptr) throw ParseError("expected a delay ROM file");
      report = residual_delay(*h, *rom);
      break;
    }
  }

  std::cout << report.to_table();
  std::cout << "max relative residual: " << report.max_relative() << " (tolerance " << args.tol
            << ")\n";
  if (!args.report_path.empty()) {
    json j = report.to_json();
    j["timestamp"] = timestamp_now();
    write_json_file(args.report_path, j);
  }
  return report.pass(args.tol) ? kExitOk : kExitCertification;
}

// --- gradcheck ---

struct GradcheckArgs {
  std::string fom_path;
  std::string rom_path;  // optional: seeded random ROM when empty
  std::string structure = "unstructured";
  Index order = 2;
  std::uint64_t seed = 1;
  GridFlags grid;
};

int run_gradcheck(const GradcheckArgs& args) {
  const ModelAny fom = load_model(args.fom_path);
  const auto h = evaluator_for(fom);
  const Structure structure = structure_from_string(args.structure);
  double tau = 0.0;
  if (structure == Structure::Delay) {
    const auto* ss = std::get_if<StateSpaceFOM>(&fom);
    if (ss == nullptr || !ss->has_delay()) throw ParseError("delay gradcheck expects a delay FOM");
    tau = ss->tau;
  }

  Parameterization param(structure, args.order, model_inputs(fom), model_outputs(fom), tau);
  RVec theta;
  if (!args.rom_path.empty()) {
    const ModelAny rom_any = load_model(args.rom_path);
    const RomVariant rom = std::visit(
        [&](const auto& m) -> RomVariant {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, DiagonalStructuredROM> ||
                        std::is_same_v<T, SecondOrderROM> || std::is_same_v<T, PHModel> ||
                        std::is_same_v<T, DelayROM>) {
            return RomVariant(m);
          } else {
            throw ParseError("rom file kind does not match the requested structure");
          }
        },
        rom_any);
    // the rom's pole layout (conjugate pairs vs real poles) fixes the chart
    bool packed = false;
    const Index r = std::visit([](const auto& m) { return m.order(); }, rom);
    for (Index pairs = r / 2; pairs >= 0 && !packed; --pairs) {
      try {
        Parameterization candidate(structure, r, model_inputs(fom), model_outputs(fom), tau, pairs);
        theta = candidate.pack(rom);
        param = candidate;
        packed = true;
      } catch (const std::invalid_argument&) {
      }
    }
    if (!packed) throw ParseError("rom file does not fit any conjugate-closed pole layout");
  } else {
    SplitMix64 rng(args.seed);
    theta = param.initial_theta(band_lo_of(fom), band_hi_of(fom), rng);
  }

  const FrequencyGrid grid = args.grid.make(band_hi_of(fom));
  const auto h_samples = eval_on_grid(*h, grid);
  const GradientBundle bundle = gradients(h_samples, rom_param_sep(param.unpack(theta)), grid);
  const RVec analytic = param.chain_gradient(theta, bundle);

  std::printf("%6s %18s %18s %12s\n", "coord", "analytic", "finite-diff", "rel.err");
  double worst = 0.0;
  for (Index t = 0; t < param.dim(); ++t) {
    const double h_step = 1e-5 * std::max(1.0, std::abs(theta(t)));
    auto cost_at = [&](double x) {
      RVec perturbed = theta;
      perturbed(t) = x;
      return quadrature_cost(h_samples, rom_param_sep(param.unpack(perturbed)), grid);
    };
    const double fd = (-cost_at(theta(t) + 2 * h_step) + 8 * cost_at(theta(t) + h_step) -
                       8 * cost_at(theta(t) - h_step) + cost_at(theta(t) - 2 * h_step)) /
                      (12 * h_step);
    const double rel = std::abs(analytic(t) - fd) / std::max(1.0, std::abs(fd));
    worst = std::max(worst, rel);
    std::printf("%6ld %18.10e %18.10e %12.3e\n", static_cast<long>(t), analytic(t), fd, rel);
  }
  std::printf("max relative error: %.3e\n", worst);
  return kExitOk;
}

// --- report ---

struct ReportArgs {
  std::string fom_path;
  std::string rom_path;
  std::string output = "report.csv";
  GridFlags grid;
};

int run_report(const ReportArgs& args) {
  const ModelAny fom = load_model(args.fom_path);
  const ModelAny rom = load_model(args.rom_path);
  const auto h = evaluator_for(fom);
  const auto hhat = evaluator_for(rom);
  const FrequencyGrid grid = args.grid.make(band_hi_of(fom));

  std::ofstream out(args.output);
  if (!out) throw ParseError("cannot open for writing: " + args.output);
  out << "omega,abs_error\n";
  for (Index k = 0; k < grid.nodes.size(); ++k) {
    const Complex s(0.0, grid.nodes(k));
    out << grid.nodes(k) << "," << (h->eval(s) - hhat->eval(s)).norm() << "\n";
  }
  std::cout << "wrote " << grid.nodes.size() << " samples to " << args.output << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structure-preserving H2-optimal reduced-order modeling"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* cmd_gen = app.add_subcommand("generate", "generate a benchmark model");
  cmd_gen->add_option("--kind", gen.kind, "random_stable | msd | ph | delay")->required();
  cmd_gen->add_option("--n", gen.n, "state dimension");
  cmd_gen->add_option("--m", gen.m, "inputs");
  cmd_gen->add_option("--p", gen.p, "outputs");
  cmd_gen->add_option("--masses", gen.masses, "msd chain length");
  cmd_gen->add_option("--alpha", gen.alpha, "Rayleigh mass coefficient");
  cmd_gen->add_option("--beta", gen.beta, "Rayleigh stiffness coefficient");
  cmd_gen->add_option("--tau", gen.tau, "delay length");
  cmd_gen->add_option("--seed", gen.seed, "RNG seed");
  cmd_gen->add_option("-o,--output", gen.output, "output model file")->required();

  H2NormArgs h2;
  auto* cmd_h2 = app.add_subcommand("h2norm", "H2 norm via quadrature and Gramian");
  cmd_h2->add_option("model", h2.model_path, "model file")->required();
  h2.grid.attach(cmd_h2);

  ReduceArgs red;
  auto* cmd_red = app.add_subcommand("reduce", "optimize a structured ROM and certify it");
  cmd_red->add_option("fom", red.fom_path, "full-order model file")->required();
  cmd_red->add_option("--structure", red.structure, "unstructured | so | ph | delay");
  cmd_red->add_option("--order", red.order, "reduced order r")->required();
  cmd_red->add_option("--restarts", red.restarts, "random restarts");
  cmd_red->add_option("--grad-tol", red.grad_tol, "gradient tolerance");
  cmd_red->add_option("--max-iter", red.max_iter, "iteration cap per restart");
  cmd_red->add_option("--tol", red.tol, "certification tolerance");
  cmd_red->add_option("--seed", red.seed, "restart seed");
  cmd_red->add_option("-o,--output", red.output, "ROM output file");
  cmd_red->add_option("--result", red.result_path, "OptimizeResult JSON path");
  cmd_red->add_option("--report", red.report_path, "ConditionReport JSON path");
  red.grid.attach(cmd_red);

  CheckArgs chk;
  auto* cmd_chk = app.add_subcommand("check-conditions", "evaluate interpolatory residuals");
  cmd_chk->add_option("fom", chk.fom_path, "full-order model file")->required();
  cmd_chk->add_option("rom", chk.rom_path, "reduced model file")->required();
  cmd_chk->add_option("--structure", chk.structure, "unstructured | so | ph | delay");
  cmd_chk->add_option("--tol", chk.tol, "pass/fail tolerance");
  cmd_chk->add_option("--report", chk.report_path, "ConditionReport JSON path");

  GradcheckArgs grc;
  auto* cmd_grc = app.add_subcommand("gradcheck", "analytic vs finite-difference gradients");
  cmd_grc->add_option("fom", grc.fom_path, "full-order model file")->required();
  cmd_grc->add_option("rom", grc.rom_path, "optional ROM file (random when absent)");
  cmd_grc->add_option("--structure", grc.structure, "unstructured | so | ph | delay");
  cmd_grc->add_option("--order", grc.order, "order of the random ROM");
  cmd_grc->add_option("--seed", grc.seed, "seed for the random ROM");
  grc.grid.attach(cmd_grc);

  ReportArgs rep;
  auto* cmd_rep = app.add_subcommand("report", "CSV of |H - Hhat| over the grid");
  cmd_rep->add_option("fom", rep.fom_path, "full-order model file")->required();
  cmd_rep->add_option("rom", rep.rom_path, "reduced model file")->required();
  cmd_rep->add_option("-o,--output", rep.output, "CSV output path");
  rep.grid.attach(cmd_rep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cmd_gen->parsed()) return run_generate(gen);
    if (cmd_h2->parsed()) return run_h2norm(h2);
    if (cmd_red->parsed()) return run_reduce(red);
    if (cmd_chk->parsed()) return run_check_conditions(chk);
    if (cmd_grc->parsed()) return run_gradcheck(grc);
    if (cmd_rep->parsed()) return run_report(rep);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UnstableSystem& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnstable;
  } catch (const UnstablePole& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnstable;
  } catch (const StabilityCheckFailed& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnstable;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOptimizer;
  }
  return kExitUsage;
}
