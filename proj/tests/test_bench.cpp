#include <doctest.h>

#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "strh2/bench.hpp"
#include "strh2/errors.hpp"
#include "strh2/spectra.hpp"

using namespace strh2;

TEST_CASE("random stable: stability and determinism") {
  const StateSpaceFOM a = bench::gen_random_stable(8, 2, 3, 301);
  const StateSpaceFOM b = bench::gen_random_stable(8, 2, 3, 301);
  CHECK((a.A - b.A).norm() == 0.0);
  CHECK((a.B - b.B).norm() == 0.0);
  CHECK((a.C - b.C).norm() == 0.0);

  Eigen::ComplexEigenSolver<CMat> es(a.A.cast<Complex>(), false);
  CHECK(es.eigenvalues().real().maxCoeff() < 0.0);

  const StateSpaceFOM c = bench::gen_random_stable(8, 2, 3, 302);
  CHECK((a.A - c.A).norm() > 0.0);

  const StateSpaceFOM tiny = bench::gen_random_stable(1, 1, 1, 303);
  CHECK(tiny.A(0, 0) < 0.0);
}

TEST_CASE("msd chain: stiffness spectrum and modal damping") {
  const SecondOrderFOM fom = bench::gen_msd_chain(2, 0.1, 0.2, 0);
  CHECK(fom.K(0, 0) == 2.0);
  CHECK(fom.K(0, 1) == -1.0);

  Eigen::SelfAdjointEigenSolver<RMat> es(fom.K);
  REQUIRE(es.info() == Eigen::Success);
  CHECK(std::abs(es.eigenvalues()(0) - 1.0) < 1e-14);
  CHECK(std::abs(es.eigenvalues()(1) - 3.0) < 1e-14);

  // proportional damping commutes with the stiffness map
  const RMat me = fom.M.inverse() * fom.E;
  const RMat mk = fom.M.inverse() * fom.K;
  CHECK((me * mk - mk * me).norm() < 1e-12);

  CHECK_THROWS_AS(bench::gen_msd_chain(2, 0.0, 0.0, 0), std::invalid_argument);
}

TEST_CASE("ph generator: structure by construction") {
  const PHModel model = bench::gen_ph_random(3, 2, 311);
  CHECK((model.J + model.J.transpose()).norm() < 1e-14);
  Eigen::SelfAdjointEigenSolver<RMat> es(model.R);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  CHECK_NOTHROW(model.validate());

  const PHModel again = bench::gen_ph_random(3, 2, 311);
  CHECK((model.J - again.J).norm() == 0.0);
}

TEST_CASE("delay generator: verified stable draw") {
  const StateSpaceFOM fom = bench::gen_delay_fom(4, 0.8, 321);
  REQUIRE(fom.has_delay());
  CHECK(fom.tau == 0.8);
  CHECK(std::abs(fom.A_tau.norm() - 0.3 * fom.A.norm()) < 1e-12 * fom.A.norm());
  CHECK(fom.verify_stability());

  const StateSpaceFOM again = bench::gen_delay_fom(4, 0.8, 321);
  CHECK((fom.A_tau - again.A_tau).norm() == 0.0);
}

#ifdef STRH2_CORPUS_DIR
#include <nlohmann/json.hpp>

#include "strh2/io.hpp"

TEST_CASE("the shipped corpus regenerates byte-identically from its manifest") {
  const std::string dir = STRH2_CORPUS_DIR;
  const nlohmann::json manifest = read_json_file(dir + "/manifest.json");
  for (const auto& entry : manifest.at("models")) {
    const std::string kind = entry.at("kind").get<std::string>();
    const std::uint64_t seed = entry.at("seed").get<std::uint64_t>();
    ModelAny model;
    if (kind == "random_stable") {
      model = bench::gen_random_stable(entry.at("n").get<Index>(), entry.at("m").get<Index>(),
                                       entry.at("p").get<Index>(), seed);
    } else if (kind == "msd") {
      model = bench::gen_msd_chain(entry.at("masses").get<Index>(), entry.at("alpha").get<double>(),
                                   entry.at("beta").get<double>(), seed);
    } else if (kind == "ph") {
      model = bench::gen_ph_random(entry.at("n").get<Index>(), entry.at("m").get<Index>(), seed);
    } else {
      model = bench::gen_delay_fom(entry.at("n").get<Index>(), entry.at("tau").get<double>(), seed);
    }
    const std::string regenerated = "/tmp/strh2_corpus_check.json";
    save_model(regenerated, model);
    std::ifstream a(regenerated), b(dir + "/" + entry.at("file").get<std::string>());
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    REQUIRE(sb.str().size() > 0);
    CHECK(sa.str() == sb.str());
  }
}
#endif

TEST_CASE("a scalar delay example validated through the pole formula") {
  // x' = -x + 0.3 x(t - 1): the dominant pole solves l + 1 = 0.3 e^{-l}.
  StateSpaceFOM fom;
  fom.E = RMat::Constant(1, 1, 1.0);
  fom.A = RMat::Constant(1, 1, -1.0);
  fom.A_tau = RMat::Constant(1, 1, 0.3);
  fom.tau = 1.0;
  fom.B = RMat::Constant(1, 1, 1.0);
  fom.C = RMat::Constant(1, 1, 1.0);

  const PoleSet set = delay_poles(Complex(-1, 0), Complex(0.3, 0), 1.0, 3);
  for (const Complex& pole : set.poles) CHECK(pole.real() < 0.0);
  CHECK(fom.verify_stability());
}
