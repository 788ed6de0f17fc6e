#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

namespace {

const std::string cli = STRH2_CLI_PATH;
const std::string dir = "/tmp/strh2_cli_tests";

int run(const std::string& args, const std::string& log = "/dev/null") {
  const std::string cmd = cli + " " + args + " > " + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

nlohmann::json without_timestamps(nlohmann::json j) {
  j.erase("timestamp");
  return j;
}

struct Setup {
  Setup() { [[maybe_unused]] const int rc = std::system(("mkdir -p " + dir).c_str()); }
};
const Setup setup;

}  // namespace

TEST_CASE("h2norm: closed form, both paths agree") {
  write_file(dir + "/spring.json",
             R"({"kind":"state_space","E":[[1.0]],"A":[[-1.0]],"B":[[1.0]],"C":[[1.0]]})");
  REQUIRE(run("h2norm " + dir + "/spring.json", dir + "/h2.log") == 0);
  const std::string log = slurp(dir + "/h2.log");
  CHECK(log.find("0.70710") != std::string::npos);
  CHECK(log.find("Gramian") != std::string::npos);
}

TEST_CASE("exit codes: instability and parse errors") {
  write_file(dir + "/unstable.json",
             R"({"kind":"state_space","E":[[1.0]],"A":[[1.0]],"B":[[1.0]],"C":[[1.0]]})");
  CHECK(run("h2norm " + dir + "/unstable.json") == 3);
  CHECK(run("h2norm " + dir + "/missing.json") == 2);
  write_file(dir + "/garbage.json", "not json at all");
  CHECK(run("h2norm " + dir + "/garbage.json") == 2);
  CHECK(run("definitely-not-a-subcommand") == 2);
}

TEST_CASE("generate: deterministic per seed") {
  REQUIRE(run("generate --kind random_stable --n 5 --seed 7 -o " + dir + "/a.json") == 0);
  REQUIRE(run("generate --kind random_stable --n 5 --seed 7 -o " + dir + "/b.json") == 0);
  REQUIRE(run("generate --kind random_stable --n 5 --seed 8 -o " + dir + "/c.json") == 0);
  CHECK(slurp(dir + "/a.json") == slurp(dir + "/b.json"));
  CHECK(slurp(dir + "/a.json") != slurp(dir + "/c.json"));

  REQUIRE(run("generate --kind msd --masses 3 --alpha 0.1 --beta 0.2 -o " + dir + "/msd.json") == 0);
  REQUIRE(run("generate --kind ph --n 4 --m 1 --seed 3 -o " + dir + "/ph.json") == 0);
  REQUIRE(run("generate --kind delay --n 3 --tau 0.4 --seed 3 -o " + dir + "/dly.json") == 0);
  CHECK(slurp(dir + "/dly.json").find("A_tau") != std::string::npos);
}

TEST_CASE("reduce: converges, certifies, and is deterministic modulo timestamps") {
  REQUIRE(run("generate --kind random_stable --n 6 --seed 11 -o " + dir + "/fom6.json") == 0);
  const std::string flags = " --structure unstructured --order 2 --restarts 4 --grad-tol 1e-9"
                            " --tol 1e-6 --seed 5 --grid-nodes 1024";
  REQUIRE(run("reduce " + dir + "/fom6.json" + flags + " -o " + dir + "/rom_a.json --result " +
              dir + "/opt_a.json --report " + dir + "/rep_a.json", dir + "/red_a.log") == 0);
  REQUIRE(run("reduce " + dir + "/fom6.json" + flags + " -o " + dir + "/rom_b.json --result " +
              dir + "/opt_b.json --report " + dir + "/rep_b.json", dir + "/red_b.log") == 0);

  CHECK(slurp(dir + "/rom_a.json") == slurp(dir + "/rom_b.json"));
  const auto opt_a = nlohmann::json::parse(slurp(dir + "/opt_a.json"));
  const auto opt_b = nlohmann::json::parse(slurp(dir + "/opt_b.json"));
  CHECK(without_timestamps(opt_a) == without_timestamps(opt_b));
  const auto rep_a = nlohmann::json::parse(slurp(dir + "/rep_a.json"));
  const auto rep_b = nlohmann::json::parse(slurp(dir + "/rep_b.json"));
  CHECK(without_timestamps(rep_a) == without_timestamps(rep_b));
  CHECK(rep_a.at("max_relative").get<double>() < 1e-6);
  CHECK(opt_a.at("config").at("seed") == 5);
}

TEST_CASE("reduce: modally damped second-order chain certifies at 1e-5") {
  REQUIRE(run("generate --kind msd --masses 3 --alpha 0.1 --beta 0.2 -o " + dir + "/chain.json") == 0);
  // resonance-resolving grid: the chain peaks sit below |omega| ~ 1.9
  CHECK(run("reduce " + dir + "/chain.json --structure so --order 1 --restarts 6"
            " --grad-tol 1e-9 --tol 1e-5 --seed 2 --grid-scale 3.7 --grid-nodes 8192 -o " +
            dir + "/chain_rom.json --report " + dir + "/chain_rep.json", dir + "/chain.log") == 0);
  const auto rep = nlohmann::json::parse(slurp(dir + "/chain_rep.json"));
  CHECK(rep.at("max_relative").get<double>() < 1e-5);
}

TEST_CASE("reduce: r >= n is a usage error") {
  CHECK(run("reduce " + dir + "/fom6.json --structure unstructured --order 6") == 2);
}

TEST_CASE("check-conditions: self pair passes, perturbed model fails") {
  // a modally damped second-order model serving as its own reduction
  write_file(dir + "/so.json",
             R"({"kind":"second_order","E":[[1.0,0.0],[0.0,2.5]],"K":[[2.0,0.0],[0.0,5.0]],)"
             R"("B":[[1.0],[0.5]],"C":[[1.0,-0.4]]})");
  CHECK(run("check-conditions " + dir + "/so.json " + dir + "/so.json --structure so --tol 1e-8",
            dir + "/chk.log") == 0);
  CHECK(slurp(dir + "/chk.log").find("soc1") != std::string::npos);
  CHECK(slurp(dir + "/chk.log").find("sobh1") != std::string::npos);

  write_file(dir + "/so_perturbed.json",
             R"({"kind":"second_order","E":[[1.001,0.0],[0.0,2.5]],"K":[[2.0,0.0],[0.0,5.0]],)"
             R"("B":[[1.0],[0.5]],"C":[[1.0,-0.4]]})");
  CHECK(run("check-conditions " + dir + "/so.json " + dir + "/so_perturbed.json --structure so"
            " --tol 1e-6") == 5);
}

TEST_CASE("gradcheck: analytic and fd agree for every structure") {
  for (const std::string structure : {"unstructured", "so", "ph"}) {
    const std::string fom = structure == "ph" ? dir + "/ph.json" : dir + "/fom6.json";
    REQUIRE(run("gradcheck " + fom + " --structure " + structure +
                " --order 2 --seed 4 --grid-nodes 256", dir + "/grad.log") == 0);
    const std::string log = slurp(dir + "/grad.log");
    const auto pos = log.find("max relative error: ");
    REQUIRE(pos != std::string::npos);
    const double worst = std::stod(log.substr(pos + 20));
    CHECK(worst < 1e-5);
  }
  REQUIRE(run("gradcheck " + dir + "/dly.json --structure delay --order 1 --seed 4"
              " --grid-nodes 256", dir + "/grad.log") == 0);
  const std::string log = slurp(dir + "/grad.log");
  const double worst = std::stod(log.substr(log.find("max relative error: ") + 20));
  CHECK(worst < 1e-5);
}

TEST_CASE("gradcheck accepts an explicit rom file") {
  REQUIRE(run("gradcheck " + dir + "/fom6.json " + dir + "/rom_a.json --structure unstructured"
              " --order 2 --grid-nodes 256", dir + "/gradrom.log") == 0);
  const std::string log = slurp(dir + "/gradrom.log");
  const double worst = std::stod(log.substr(log.find("max relative error: ") + 20));
  CHECK(worst < 1e-5);
}

TEST_CASE("check-conditions reads the certified unstructured rom back") {
  CHECK(run("check-conditions " + dir + "/fom6.json " + dir + "/rom_a.json"
            " --structure unstructured --tol 1e-4 --report " + dir + "/chk.json") == 0);
  const auto rep = nlohmann::json::parse(slurp(dir + "/chk.json"));
  CHECK(rep.at("structure") == "unstructured");
}

TEST_CASE("report: csv of the pointwise error") {
  REQUIRE(run("report " + dir + "/fom6.json " + dir + "/rom_a.json --grid-nodes 64 -o " + dir +
              "/err.csv") == 0);
  const std::string csv = slurp(dir + "/err.csv");
  CHECK(csv.rfind("omega,abs_error", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 65);
}

TEST_CASE("delay h2norm falls back to quadrature only") {
  REQUIRE(run("h2norm " + dir + "/dly.json", dir + "/h2d.log") == 0);
  CHECK(slurp(dir + "/h2d.log").find("quadrature only") != std::string::npos);
}
