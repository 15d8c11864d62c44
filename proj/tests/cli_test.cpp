#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dyadim/config.hpp"
#include "dyadim/runner.hpp"
#include "dyadim/weights.hpp"

using dyadim::ConfigError;
using dyadim::ExperimentConfig;
using dyadim::WeightsDecl;

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path("cli_test_tmp") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream stream(line);
  std::string field;
  while (std::getline(stream, field, ',')) {
    fields.push_back(field);
  }
  return fields;
}

int call_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("dyadim");
  for (const std::string& arg : args) {
    argv.push_back(arg.c_str());
  }
  return dyadim::run_cli(static_cast<int>(argv.size()), argv.data());
}

// checks that parsing fails and the diagnostic names the offender
void expect_config_error(const std::string& text, const std::string& needle) {
  try {
    dyadim::parse_config_text(text, "test");
    FAIL("expected a config error mentioning '" << needle << "'");
  } catch (const ConfigError& error) {
    CHECK(std::string(error.what()).find(needle) != std::string::npos);
  }
}

constexpr const char* kEntropyIni =
    "[experiment]\n"
    "command = entropy\n"
    "horizon = 12\n"
    "\n"
    "[weights]\n"
    "kind = constant\n"
    "pairs = 0.3,0.7\n";

}  // namespace

TEST_CASE("ini configs parse with defaults applied") {
  const ExperimentConfig config = dyadim::parse_config_text(kEntropyIni, "test");
  CHECK(config.command == "entropy");
  CHECK(config.horizon == 12);
  CHECK(config.window == 1000);   // default
  CHECK(config.depth == 10000);   // default
  CHECK(config.paths == 200);     // default
  CHECK(config.seed == 0);        // default
  CHECK(config.output_dir == "out");
  CHECK_FALSE(config.oracle);
  CHECK(config.has_weights);
  CHECK(config.weights.kind == "constant");
  REQUIRE(config.weights.pairs.size() == 1);
  CHECK(config.weights.pairs[0].p == 0.3);
  CHECK(config.weights.pairs[0].q == 0.7);
}

TEST_CASE("ini configs support lists, comments and tails") {
  const ExperimentConfig config = dyadim::parse_config_text(
      "[experiment]\n"
      "command = continuity  # trailing comment\n"
      "checkpoints = 100, 1000\n"
      "zetas = 0.1, 0.01\n"
      "perturb_mode = seeded-random\n"
      "\n"
      "[weights]\n"
      "kind = explicit\n"
      "pairs = 0.1,0.9\n"
      "tail = periodic: 0.3,0.3; 0.8,0.8\n",
      "test");
  CHECK(config.checkpoints == std::vector<std::uint64_t>{100, 1000});
  REQUIRE(config.zetas.size() == 2);
  CHECK(config.zetas[0] == 0.1);
  CHECK(config.perturb_mode == "seeded-random");
  CHECK(config.weights.tail_kind == "periodic");
  REQUIRE(config.weights.tail.size() == 2);

  const dyadim::WeightSequence w = config.weights.build();
  CHECK(w.at(0).p == 0.1);
  CHECK(w.at(1).p == 0.3);
  CHECK(w.at(2).p == 0.8);
  CHECK(w.at(3).p == 0.3);
}

TEST_CASE("strict parsing names the offending key") {
  expect_config_error("[experiment]\nhorzon = 5\n", "horzon");
  expect_config_error("[weights]\nflavor = hot\n", "flavor");
  expect_config_error("[cheese]\nkind = brie\n", "cheese");
  expect_config_error("command = entropy\n", "before any section");
  expect_config_error("[experiment]\nhorizon = twelve\n", "horizon");
  expect_config_error("[experiment]\nhorizon = -4\n", "horizon");
  expect_config_error("[experiment]\noracle = maybe\n", "oracle");
  expect_config_error("[weights]\nkind = constant\npairs = 0.5\n", "pairs");
  expect_config_error("[weights]\nkind = explicit\npairs = 0.1,0.9\ntail = 0.5,0.5\n", "tail");
  expect_config_error("[experiment]\ncommand = explode\n", "explode");
  expect_config_error("[experiment]\nperturb_mode = sideways\n", "sideways");
}

TEST_CASE("weight shapes are validated against their kind") {
  expect_config_error("[weights]\nkind = constant\npairs = 0.1,0.9; 0.2,0.8\n", "constant");
  expect_config_error("[weights]\nkind = explicit\npairs = 0.1,0.9\n", "tail");
  expect_config_error("[weights]\nkind = random\n", "period");
  expect_config_error("[weights]\nkind = constant\npairs = 1.5,0.5\n", "[0, 1]");
  expect_config_error("[weights]\nkind = jittery\npairs = 0.5,0.5\n", "jittery");
}

TEST_CASE("json configs mirror the ini shapes") {
  const ExperimentConfig config = dyadim::parse_config_text(
      R"({
        "experiment": {"command": "entropy", "horizon": 9, "checkpoints": [10, 20]},
        "weights": {"kind": "periodic", "pairs": [[0.2, 0.8], [0.6, 0.4]]}
      })",
      "test");
  CHECK(config.command == "entropy");
  CHECK(config.horizon == 9);
  CHECK(config.checkpoints == std::vector<std::uint64_t>{10, 20});
  REQUIRE(config.weights.pairs.size() == 2);
  CHECK(config.weights.pairs[1].p == 0.6);

  const ExperimentConfig tailed = dyadim::parse_config_text(
      R"({
        "experiment": {"command": "entropy"},
        "weights": {"kind": "explicit", "pairs": [[0.1, 0.9]],
                    "tail": {"kind": "constant", "pairs": [[0.5, 0.5]]}}
      })",
      "test");
  CHECK(tailed.weights.build().at(7).p == 0.5);

  expect_config_error(R"({"experiment": {"horzon": 5}})", "horzon");
  expect_config_error(R"({"experiment": {}, "extras": {}})", "extras");
  expect_config_error(
      R"({"experiment": {}, "weights": {"kind": "constant", "pairs": [[0.5, 0.5]],
          "tail": {"flavor": "hot"}}})",
      "'kind' and 'pairs'");
  expect_config_error(
      R"({"experiment": {}, "weights": {"kind": "constant", "pairs": [[0.5, 0.5]],
          "tail": {"kind": "constant", "pairs": [[0.5, 0.5]], "flavor": "hot"}}})",
      "flavor");
}

TEST_CASE("weight declarations build every kind") {
  WeightsDecl constant;
  constant.kind = "constant";
  constant.pairs = {{0.3, 0.7}};
  CHECK(constant.build().at(5).p == 0.3);

  WeightsDecl periodic;
  periodic.kind = "periodic";
  periodic.pairs = {{0.2, 0.8}, {0.6, 0.4}};
  CHECK(periodic.build().at(3).q == 0.4);

  WeightsDecl random;
  random.kind = "random";
  random.period = 8;
  random.seed = 3;
  const dyadim::WeightSequence r = random.build();
  CHECK(r.at(0).p == r.at(8).p);

  WeightsDecl unknown;
  unknown.kind = "nope";
  unknown.pairs = {{0.5, 0.5}};
  CHECK_THROWS_AS(unknown.build(), ConfigError);
}

TEST_CASE("resolved configs echo every field as json") {
  const auto echo = nlohmann::json::parse(
      dyadim::config_to_json(dyadim::parse_config_text(kEntropyIni, "test")));
  CHECK(echo["experiment"]["command"] == "entropy");
  CHECK(echo["experiment"]["horizon"] == 12);
  CHECK(echo["experiment"]["window"] == 1000);
  CHECK(echo["experiment"]["seed"] == 0);
  CHECK(echo["experiment"]["output_dir"] == "out");
  CHECK(echo["weights"]["kind"] == "constant");
  CHECK(echo["weights"]["pairs"][0][1] == 0.7);
}

TEST_CASE("the cli cross-checks entropy against brute force") {
  const fs::path dir = fresh_dir("entropy");
  write_file(dir / "config.ini", kEntropyIni);
  const int status = call_cli({"entropy", "--config", (dir / "config.ini").string(),
                               "--output-dir", (dir / "out").string(), "--oracle"});
  REQUIRE(status == 0);

  const auto rows = lines_of(slurp(dir / "out" / "entropy.csv"));
  REQUIRE(rows.size() == 13);
  CHECK(rows[0] == "n,H_nats,c_n,pi0,H_bruteforce");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto fields = fields_of(rows[i]);
    REQUIRE(fields.size() == 5);
    const double recursive = std::strtod(fields[1].c_str(), nullptr);
    const double bruteforce = std::strtod(fields[4].c_str(), nullptr);
    CHECK(std::abs(recursive - bruteforce) <= 1e-10);
  }

  const auto manifest = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
  CHECK(manifest["config"]["experiment"]["horizon"] == 12);
  CHECK(manifest["config"]["experiment"]["oracle"] == true);  // flag folded in
  CHECK(manifest["timestamp"].is_string());
  bool listed = false;
  for (const auto& name : manifest["files"]) {
    listed = listed || name == "entropy.csv";
    CHECK(name != "manifest.json");  // the manifest never lists itself
  }
  CHECK(listed);
}

TEST_CASE("the cli reports the exact dimension for the uniform measure") {
  const fs::path dir = fresh_dir("dimension");
  write_file(dir / "config.ini",
             "[experiment]\n"
             "command = dimension\n"
             "[weights]\n"
             "kind = constant\n"
             "pairs = 0.5,0.5\n");
  REQUIRE(call_cli({"dimension", "--config", (dir / "config.ini").string(), "--output-dir",
                    (dir / "out").string()}) == 0);
  const auto rows = lines_of(slurp(dir / "out" / "dimension.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "lower,upper,mode,horizon,window");
  const auto fields = fields_of(rows[1]);
  REQUIRE(fields.size() == 5);
  CHECK(std::strtod(fields[0].c_str(), nullptr) == 1.0);
  CHECK(std::strtod(fields[1].c_str(), nullptr) == 1.0);
  CHECK(fields[2] == "exact-periodic");
}

TEST_CASE("identical configs reproduce byte-identical data files") {
  const fs::path dir = fresh_dir("repro");
  const std::string config =
      "[experiment]\n"
      "command = dimension\n"
      "depth = 400\n"
      "paths = 32\n"
      "checkpoints = 40, 400\n"
      "seed = 7\n"
      "[weights]\n"
      "kind = constant\n"
      "pairs = 0.3,0.7\n";
  write_file(dir / "config.ini", config);
  for (const char* run : {"a", "b"}) {
    REQUIRE(call_cli({"dimension", "--config", (dir / "config.ini").string(), "--output-dir",
                      (dir / run).string()}) == 0);
  }
  CHECK(slurp(dir / "a" / "dimension.csv") == slurp(dir / "b" / "dimension.csv"));
  CHECK(slurp(dir / "a" / "smb.csv") == slurp(dir / "b" / "smb.csv"));

  auto manifest_a = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
  auto manifest_b = nlohmann::json::parse(slurp(dir / "b" / "manifest.json"));
  // only the timestamp and the overridden destination may differ
  manifest_a.erase("timestamp");
  manifest_b.erase("timestamp");
  manifest_a["config"]["experiment"].erase("output_dir");
  manifest_b["config"]["experiment"].erase("output_dir");
  CHECK(manifest_a == manifest_b);

  // a different seed must change the sampled statistics
  REQUIRE(call_cli({"dimension", "--config", (dir / "config.ini").string(), "--output-dir",
                    (dir / "c").string(), "--seed", "8"}) == 0);
  CHECK(slurp(dir / "a" / "smb.csv") != slurp(dir / "c" / "smb.csv"));
}

TEST_CASE("the worker cap never changes the numbers") {
  const fs::path dir = fresh_dir("threads");
  write_file(dir / "config.ini",
             "[experiment]\n"
             "command = dimension\n"
             "depth = 300\n"
             "paths = 48\n"
             "checkpoints = 300\n"
             "[weights]\n"
             "kind = constant\n"
             "pairs = 0.3,0.7\n");
  setenv("DYADIM_THREADS", "1", 1);
  const int first = call_cli({"dimension", "--config", (dir / "config.ini").string(),
                              "--output-dir", (dir / "one").string()});
  setenv("DYADIM_THREADS", "3", 1);
  const int second = call_cli({"dimension", "--config", (dir / "config.ini").string(),
                               "--output-dir", (dir / "three").string()});
  unsetenv("DYADIM_THREADS");
  REQUIRE(first == 0);
  REQUIRE(second == 0);
  CHECK(slurp(dir / "one" / "smb.csv") == slurp(dir / "three" / "smb.csv"));
}

TEST_CASE("sampling writes one trace per path") {
  const fs::path dir = fresh_dir("sample");
  write_file(dir / "config.ini",
             "[experiment]\n"
             "command = sample\n"
             "depth = 50\n"
             "paths = 3\n"
             "seed = 9\n"
             "[weights]\n"
             "kind = constant\n"
             "pairs = 0.3,0.7\n");
  REQUIRE(call_cli({"sample", "--config", (dir / "config.ini").string(), "--output-dir",
                    (dir / "out").string()}) == 0);
  for (const char* name : {"path_0.csv", "path_1.csv", "path_2.csv"}) {
    const auto rows = lines_of(slurp(dir / "out" / name));
    REQUIRE(rows.size() == 51);
    CHECK(rows[0] == "n,bit,x_n_nats,log_mass_nats");
  }
  // distinct paths use distinct substreams
  CHECK(slurp(dir / "out" / "path_0.csv") != slurp(dir / "out" / "path_1.csv"));
}

TEST_CASE("bad invocations exit with a diagnostic status") {
  const fs::path dir = fresh_dir("errors");

  write_file(dir / "broken.ini", "[experiment]\nhorzon = 5\n");
  CHECK(call_cli({"entropy", "--config", (dir / "broken.ini").string()}) == 2);

  CHECK(call_cli({"explode", "--config", (dir / "broken.ini").string()}) == 2);
  CHECK(call_cli({"entropy"}) == 2);  // --config is required
  CHECK(call_cli({"entropy", "--config", (dir / "missing.ini").string()}) == 2);

  write_file(dir / "noweights.ini", "[experiment]\ncommand = entropy\n");
  CHECK(call_cli({"entropy", "--config", (dir / "noweights.ini").string(), "--output-dir",
                  (dir / "o1").string()}) == 2);

  write_file(dir / "mismatch.ini", kEntropyIni);
  CHECK(call_cli({"dimension", "--config", (dir / "mismatch.ini").string(), "--output-dir",
                  (dir / "o2").string()}) == 2);

  write_file(dir / "badeps.ini",
             "[experiment]\n"
             "command = counterexample\n"
             "epsilon = 0.5\n"
             "delta = 0.01\n"
             "stages = 1\n");
  CHECK(call_cli({"counterexample", "--config", (dir / "badeps.ini").string(), "--output-dir",
                  (dir / "o3").string()}) == 2);
}
