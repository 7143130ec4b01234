#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "mvsde/errors.hpp"
#include "mvsde/io.hpp"

using namespace mvsde;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  fs::path p = fs::temp_directory_path() / "mvsde_io_test";
  fs::create_directories(p);
  return p;
}

std::string write_config(const std::string& name, const std::string& body) {
  fs::path p = scratch() / name;
  std::ofstream(p) << body;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(MVSDE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return rc < 0 ? rc : WEXITSTATUS(rc);
}

const char* kBistableModel = R"({
  "v_prime": {"poly": [0.0, -1.0, 0.0, 1.0]},
  "p_prime": {"poly": [0.0, 1.0]},
  "theta": 2.0
})";

std::string bistable_config(const std::string& extra) {
  return std::string("{\"model\": ") + kBistableModel + ", " + extra + "}";
}

}  // namespace

TEST_CASE("parse_model strictness") {
  json good = json::parse(kBistableModel);
  ModelSpec m = io::parse_model(good);
  CHECK(m.theta == 2.0);
  CHECK(m.v_prime(2.0) == doctest::Approx(6.0));

  json unknown = good;
  unknown["v_pime"] = good["v_prime"];
  CHECK_THROWS_AS(io::parse_model(unknown), ValidationError);

  json missing = good;
  missing.erase("p_prime");
  CHECK_THROWS_AS(io::parse_model(missing), ValidationError);

  json bad_theta = good;
  bad_theta["theta"] = -1.0;
  CHECK_THROWS_AS(io::parse_model(bad_theta), ValidationError);
}

TEST_CASE("model_to_json round trip") {
  json good = json::parse(kBistableModel);
  ModelSpec m = io::parse_model(good);
  ModelSpec m2 = io::parse_model(io::model_to_json(m));
  CHECK(m2.theta == m.theta);
  for (double x : {-1.5, 0.3, 2.0}) {
    CHECK(m2.v_prime(x) == m.v_prime(x));
    CHECK(m2.p_prime(x) == m.p_prime(x));
    CHECK(m2.diffusion.k2(x) == m.diffusion.k2(x));
  }
}

TEST_CASE("parse_config defaults and grids") {
  std::string path = write_config(
      "roots.json", bistable_config("\"command\": \"roots\", \"sigma\": 0.5"));
  io::JobConfig cfg = io::parse_config(path);
  CHECK(cfg.command == "roots");
  CHECK(cfg.sigma == 0.5);
  CHECK(cfg.grid_points == 401);
  CHECK(cfg.format == "json");
  CHECK(cfg.n_particles == 10000);
  CHECK(cfg.resolved.contains("model"));
  CHECK(cfg.resolved["grid_points"] == 401);

  std::string gpath = write_config(
      "grid.json", bistable_config("\"command\": \"phase-diagram\", "
                                   "\"sigma_grid\": {\"start\": 0.5, \"stop\": 1.5, \"count\": 5}"));
  io::JobConfig gcfg = io::parse_config(gpath);
  REQUIRE(gcfg.sigma_grid.size() == 5);
  CHECK(gcfg.sigma_grid.front() == 0.5);
  CHECK(gcfg.sigma_grid.back() == 1.5);
  CHECK(gcfg.sigma_grid[2] == doctest::Approx(1.0));
}

TEST_CASE("parse_config validation errors name the field") {
  std::string neg = write_config(
      "neg.json",
      bistable_config("\"command\": \"phase-diagram\", \"sigma_grid\": [0.5, -1.0]"));
  CHECK_THROWS_WITH_AS(io::parse_config(neg),
                       doctest::Contains("sigma_grid"), ValidationError);

  std::string unknown = write_config(
      "unk.json", bistable_config("\"command\": \"roots\", \"sigmma\": 0.5"));
  CHECK_THROWS_WITH_AS(io::parse_config(unknown), doctest::Contains("sigmma"), ValidationError);

  std::string badcmd = write_config(
      "cmd.json", bistable_config("\"command\": \"rootz\""));
  CHECK_THROWS_AS(io::parse_config(badcmd), ValidationError);

  std::string nomodel = write_config("nomodel.json", R"({"command": "roots"})");
  CHECK_THROWS_AS(io::parse_config(nomodel), ValidationError);

  std::string garbled = write_config("garbled.json", "{ not json");
  CHECK_THROWS_AS(io::parse_config(garbled), ParseError);
}

TEST_CASE("atomic_write leaves no temp file and replaces content") {
  fs::path target = scratch() / "atomic.txt";
  io::atomic_write(target.string(), "first\n");
  CHECK(slurp(target) == "first\n");
  io::atomic_write(target.string(), "second\n");
  CHECK(slurp(target) == "second\n");
  CHECK(!fs::exists(target.string() + ".tmp"));
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.6789, -0.0}) {
    CHECK(std::stod(io::format_double(v)) == v);
  }
}

TEST_CASE("cli: exit codes") {
  fs::current_path(scratch());
  // success
  std::string ok = write_config(
      "cli_ok.json", bistable_config("\"command\": \"roots\", \"sigma\": 0.5, "
                                     "\"output\": \"cli_ok\", \"format\": \"both\""));
  CHECK(run_cli("--config " + ok) == 0);
  CHECK(fs::exists(scratch() / "cli_ok.json.out") == false);
  CHECK(fs::exists(scratch() / "cli_ok.csv"));
  CHECK(fs::exists(scratch() / "cli_ok.json"));

  // config error: malformed
  std::string bad = write_config("cli_bad.json", "{ nope");
  CHECK(run_cli("--config " + bad) == 1);

  // config error: validation
  std::string val = write_config(
      "cli_val.json", bistable_config("\"command\": \"roots\", \"sigma\": -0.5"));
  CHECK(run_cli("--config " + val) == 1);

  // missing required flag
  CHECK(run_cli("") == 1);

  // numerical failure: unconfined model
  std::string unconfined = write_config("cli_unconfined.json", R"({
    "model": {
      "v_prime": {"poly": [0.0, -1.0]},
      "p_prime": {"poly": [0.0, 0.5]},
      "theta": 1.0
    },
    "command": "roots",
    "sigma": 1.0,
    "output": "cli_unconfined"
  })");
  CHECK(run_cli("--config " + unconfined) == 2);
}

TEST_CASE("cli: outputs embed version and resolved config") {
  fs::current_path(scratch());
  std::string ok = write_config(
      "cli_embed.json", bistable_config("\"command\": \"roots\", \"sigma\": 0.5, "
                                        "\"output\": \"cli_embed\", \"format\": \"both\""));
  REQUIRE(run_cli("--config " + ok) == 0);
  json doc = json::parse(slurp(scratch() / "cli_embed.json"));
  CHECK(doc["version"] == io::kVersion);
  CHECK(doc["config"]["sigma"] == 0.5);
  CHECK(doc["config"]["model"]["theta"] == 2.0);
  REQUIRE(doc["results"]["roots"].is_array());
  CHECK(doc["results"]["roots"].size() == 3);

  std::string csv = slurp(scratch() / "cli_embed.csv");
  CHECK(csv.find("# version: ") != std::string::npos);
  CHECK(csv.find("# config: ") != std::string::npos);
  CHECK(csv.find("m,residual,slope_sign") != std::string::npos);
}

TEST_CASE("cli: audit on the reference Gaussian config holds") {
  fs::current_path(scratch());
  std::string cfg = std::string(MVSDE_CONFIG_DIR) + "/gaussian_audit.json";
  REQUIRE(run_cli("--config " + cfg + " --output cli_audit") == 0);
  json doc = json::parse(slurp(scratch() / "cli_audit.json"));
  CHECK(doc["results"]["all_hold"] == true);
  for (const auto& e : doc["results"]["entries"]) CHECK(e["status"] == "holds");
}

TEST_CASE("cli: phase diagram shows the 3 -> 1 transition") {
  fs::current_path(scratch());
  std::string cfg = std::string(MVSDE_CONFIG_DIR) + "/bistable_phase.json";
  REQUIRE(run_cli("--config " + cfg + " --output cli_phase") == 0);
  json doc = json::parse(slurp(scratch() / "cli_phase.json"));
  const auto& reports = doc["results"]["reports"];
  REQUIRE(reports.size() == 13);
  CHECK(reports.front()["roots"].size() == 3);
  CHECK(reports.back()["roots"].size() == 1);
  REQUIRE(doc["results"]["transitions"].size() == 1);

  std::string csv = slurp(scratch() / "cli_phase.csv");
  CHECK(csv.find("sigma,n_roots,m_1,m_2,m_3") != std::string::npos);
  // first data row has 3 roots, last has 1
  std::istringstream is(csv);
  std::string line, first_data, last_data;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("sigma", 0) == 0) continue;
    if (first_data.empty()) first_data = line;
    last_data = line;
  }
  CHECK(first_data.find(",3,") != std::string::npos);
  CHECK(last_data.find(",1,") != std::string::npos);
}

TEST_CASE("cli: critical curve is monotone with 6 rows") {
  fs::current_path(scratch());
  std::string cfg = std::string(MVSDE_CONFIG_DIR) + "/bistable_curve.json";
  REQUIRE(run_cli("--config " + cfg + " --output cli_curve") == 0);
  json doc = json::parse(slurp(scratch() / "cli_curve.json"));
  CHECK(doc["results"]["monotone"] == true);
  REQUIRE(doc["results"]["sigma_stars"].size() == 6);
  double prev = 0.0;
  for (double s : doc["results"]["sigma_stars"]) {
    CHECK(s > prev);
    prev = s;
  }
}

TEST_CASE("cli: reruns are byte-identical") {
  fs::current_path(scratch());
  std::string ok = write_config(
      "cli_rerun.json", bistable_config("\"command\": \"roots\", \"sigma\": 0.7, "
                                        "\"format\": \"both\""));
  REQUIRE(run_cli("--config " + ok + " --output rerun_a") == 0);
  REQUIRE(run_cli("--config " + ok + " --output rerun_b --threads 3") == 0);
  std::string a = slurp(scratch() / "rerun_a.csv"), b = slurp(scratch() / "rerun_b.csv");
  CHECK(a == b);
  json ja = json::parse(slurp(scratch() / "rerun_a.json"));
  json jb = json::parse(slurp(scratch() / "rerun_b.json"));
  CHECK(ja["results"] == jb["results"]);
}

TEST_CASE("cli: command and sigma overrides") {
  fs::current_path(scratch());
  std::string cfg = write_config(
      "cli_over.json", bistable_config("\"command\": \"roots\", \"sigma\": 0.5"));
  REQUIRE(run_cli("critical --config " + cfg + " --output cli_over --format json") == 0);
  json doc = json::parse(slurp(scratch() / "cli_over.json"));
  CHECK(doc["config"]["command"] == "critical");
  CHECK(doc["results"]["has_sigma_c"] == true);
  CHECK(std::abs(doc["results"]["sigma_c"].get<double>() - 1.2773304906) < 1e-6);
}
