#include <doctest.h>

#include <nlohmann/json.hpp>

#include "strh2/bench.hpp"
#include "strh2/errors.hpp"
#include "strh2/io.hpp"
#include "strh2/structopt.hpp"

using namespace strh2;

namespace {

void check_transfer_match(const ModelAny& a, const ModelAny& b) {
  const auto ea = evaluator_for(a);
  const auto eb = evaluator_for(b);
  for (int k = 0; k < 5; ++k) {
    const Complex s(0.1, -3.0 + 1.4 * k);
    CHECK((ea->eval(s) - eb->eval(s)).norm() < 1e-14 * std::max(1.0, ea->eval(s).norm()));
  }
}

}  // namespace

TEST_CASE("round trips per kind") {
  SUBCASE("state space") {
    const ModelAny model = bench::gen_random_stable(4, 2, 1, 401);
    const ModelAny back = model_from_json(model_to_json(model));
    CHECK(model_kind(back) == "state_space");
    check_transfer_match(model, back);
  }
  SUBCASE("state space with delay") {
    const ModelAny model = bench::gen_delay_fom(3, 0.4, 402);
    const ModelAny back = model_from_json(model_to_json(model));
    CHECK(model_kind(back) == "state_space+delay");
    check_transfer_match(model, back);
  }
  SUBCASE("second-order chain") {
    const ModelAny model = bench::gen_msd_chain(3, 0.1, 0.3, 0);
    const ModelAny back = model_from_json(model_to_json(model));
    CHECK(model_kind(back) == "second_order");
    check_transfer_match(model, back);
  }
  SUBCASE("second-order diagonal rom") {
    SecondOrderROM rom;
    rom.damping = RVec(2);
    rom.damping << 1.0, 2.0;
    rom.stiffness = RVec(2);
    rom.stiffness << 3.0, 4.0;
    rom.B = RMat::Ones(2, 1);
    rom.C = RMat::Ones(1, 2);
    const ModelAny back = model_from_json(model_to_json(rom));
    CHECK(model_kind(back) == "second_order_rom");
    check_transfer_match(rom, back);
  }
  SUBCASE("port-Hamiltonian") {
    const ModelAny model = bench::gen_ph_random(3, 1, 403);
    const ModelAny back = model_from_json(model_to_json(model));
    CHECK(model_kind(back) == "ph");
    check_transfer_match(model, back);
  }
  SUBCASE("delay rom") {
    DelayROM rom;
    rom.mu = CVec(2);
    rom.mu << Complex(-1, 2), Complex(-1, -2);
    rom.sigma = CVec(2);
    rom.sigma << Complex(0.1, 0.05), Complex(0.1, -0.05);
    rom.tau = 0.5;
    rom.B = CMat::Ones(2, 1);
    rom.C = CMat::Ones(1, 2);
    const ModelAny back = model_from_json(model_to_json(rom));
    CHECK(model_kind(back) == "delay");
    check_transfer_match(rom, back);
  }
  SUBCASE("diagonal rom through param_sep") {
    const Parameterization param(Structure::Unstructured, 2, 1, 1);
    SplitMix64 rng(404);
    const auto rom = std::get<DiagonalStructuredROM>(param.unpack(param.initial_theta(0.5, 3.0, rng)));
    const nlohmann::json j = model_to_json(rom);
    CHECK(j.at("kind") == "param_sep");
    const ModelAny back = model_from_json(j);
    CHECK(model_kind(back) == "diag_rom");
    check_transfer_match(rom, back);
  }
}

TEST_CASE("serialization is deterministic") {
  const ModelAny model = bench::gen_random_stable(3, 1, 1, 405);
  CHECK(model_to_json(model).dump() == model_to_json(model).dump());
}

TEST_CASE("parse failures carry ParseError") {
  CHECK_THROWS_AS(model_from_json(nlohmann::json{{"kind", "unknown"}}), ParseError);
  CHECK_THROWS_AS(model_from_json(nlohmann::json::array()), ParseError);
  CHECK_THROWS_AS(model_from_json(nlohmann::json{{"kind", "ph"}}), ParseError);
  nlohmann::json ragged{{"kind", "state_space"},
                        {"E", {{1.0, 0.0}, {0.0}}},
                        {"A", {{-1.0}}},
                        {"B", {{1.0}}},
                        {"C", {{1.0}}}};
  CHECK_THROWS_AS(model_from_json(ragged), ParseError);
}

TEST_CASE("file round trip") {
  const std::string path = "/tmp/strh2_test_model.json";
  const ModelAny model = bench::gen_ph_random(2, 1, 406);
  save_model(path, model);
  const ModelAny back = load_model(path);
  CHECK(model_kind(back) == "ph");
  check_transfer_match(model, back);
  CHECK_THROWS_AS(load_model("/tmp/strh2_really_missing.json"), ParseError);
}
