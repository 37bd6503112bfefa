#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using Catch::Matchers::WithinAbs;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "ringflow_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  const auto err = scratch() / "stderr.txt";
  const std::string cmd = std::string(RINGFLOW_CLI) + " " + args + " 2>" + err.string();
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out, slurp(err)};
}

// Drops the leading "# {json}" metadata line of a CSV document.
std::pair<nlohmann::json, std::string> split_csv(const std::string& doc) {
  REQUIRE(doc.rfind("# ", 0) == 0);
  const auto nl = doc.find('\n');
  return {nlohmann::json::parse(doc.substr(2, nl - 2)), doc.substr(nl + 1)};
}

}  // namespace

TEST_CASE("bound subcommands") {
  auto r = run("fermion --n 1 --alpha 0.5 --format json");
  REQUIRE(r.status == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK_THAT(j["q_f"].get<double>(), WithinAbs(1.0 / std::numbers::pi, 1e-15));
  CHECK(j["metadata"]["seed"] == 0);
  CHECK(j["metadata"]["command"] == "fermion");

  r = run("boson --alpha 3.14159265 --n 1 --format json");
  REQUIRE(r.status == 0);
  CHECK(std::abs(nlohmann::json::parse(r.out)["q_b"].get<double>()) < 1e-9);

  r = run("single --n 12 --scan 0.5:2 --step 0.05 --format json");
  REQUIRE(r.status == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(j["grid"].size() == 31);
  CHECK(j["q_min"].get<double>() < -0.11);

  r = run("fermion --n-range 6:9 --extrapolate --scan 0.3:0.5 --step 0.02 --format csv");
  REQUIRE(r.status == 0);
  const auto [meta, body] = split_csv(r.out);
  CHECK(meta["config"]["extrapolate"] == true);
  CHECK(body.rfind("n,inv_n,q_f,alpha_star\n", 0) == 0);
  CHECK(std::count(body.begin(), body.end(), '\n') == 6);
}

TEST_CASE("kernel dump") {
  const auto r = run("kernel dump --alpha 0.5 --n 2 --format csv");
  REQUIRE(r.status == 0);
  const auto [meta, body] = split_csv(r.out);
  CHECK(meta["tool"] == "ringflow");
  CHECK(meta["config"]["n"] == 2);
  std::istringstream in(body);
  std::string line;
  std::getline(in, line);
  CHECK(line == "m,n,value");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    const auto c1 = line.find(','), c2 = line.rfind(',');
    const int m = std::stoi(line.substr(0, c1)), n = std::stoi(line.substr(c1 + 1, c2 - c1 - 1));
    const double v = std::stod(line.substr(c2 + 1));
    const double z = 0.5 * (m * m - n * n);
    const double expect = 0.5 / std::numbers::pi * (m + n) * (z == 0 ? 1.0 : std::sin(z) / z);
    CHECK(v == expect);
  }
  CHECK(rows == 9);
}

TEST_CASE("flag errors exit 2 with usage") {
  for (const char* args : {"", "single --n 5 --alpha 0.3 --scan 0.1:1", "single --n 5", "figures fig7",
                           "--format xml single --n 3 --alpha 1", "single --n 3 --alpha -1", "nonsense",
                           "fermion --n-range 5 --extrapolate", "kernel dump --n 2"}) {
    const auto r = run(args);
    INFO(args);
    CHECK(r.status == 2);
    CHECK(r.err.find("Usage") != std::string::npos);
  }
}

TEST_CASE("numerical failure exits 1 with JSON diagnostics") {
  const auto r = run("single --n 40 --alpha 0.5 --tol 1e-30 --dense-limit 0");
  CHECK(r.status == 1);
  const auto j = nlohmann::json::parse(r.err);
  CHECK(j["error"] == "numerical_failure");
  CHECK(j.contains("best_residual"));
}

TEST_CASE("state dump feeds observables") {
  const auto state = scratch() / "state.json";
  REQUIRE(run("fermion --n 4 --alpha 0.39 --dump-state " + state.string()).status == 0);
  const auto s = nlohmann::json::parse(slurp(state));
  CHECK(s["sigma"] == -1);
  CHECK(s["coefficients"].size() == 25);

  const auto r = run("observables --state " + state.string() + " --theta-points 128 --t-points 2 --format csv");
  REQUIRE(r.status == 0);
  const auto [meta, body] = split_csv(r.out);
  CHECK(meta["config"]["sigma"] == -1);
  std::istringstream in(body);
  std::string line;
  std::getline(in, line);
  CHECK(line == "theta,t,J,rho");
  double rho_sum = 0.0;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    if (rows <= 128) rho_sum += std::stod(line.substr(line.rfind(',') + 1));
  }
  CHECK(rows == 256);
  CHECK_THAT(rho_sum * 2 * std::numbers::pi / 128, WithinAbs(2.0, 1e-10));

  std::ofstream(scratch() / "broken.json") << R"({"n_max": 1, "sigma": -1, "coefficients": [0, 1, 1, 0]})";
  CHECK(run("observables --state " + (scratch() / "broken.json").string()).status == 1);
}

TEST_CASE("output files are independent of the thread count") {
  const auto a = scratch() / "a.csv", b = scratch() / "b.csv";
  REQUIRE(run("--threads 1 --output " + a.string() + " figures fig1b --n-list 4,9 --step 0.05").status == 0);
  REQUIRE(run("--threads 3 --output " + b.string() + " figures fig1b --n-list 4,9 --step 0.05").status == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).find("\"ns\":[4,9]") != std::string::npos);
}

TEST_CASE("verify --quick passes") {
  const auto r = run("verify --quick");
  INFO(r.out);
  CHECK(r.status == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
}
