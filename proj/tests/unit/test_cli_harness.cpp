#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "genmarket/checkpoint.hpp"
#include "genmarket/errors.hpp"
#include "genmarket/scenario.hpp"

using namespace genmarket;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json tiny_scenario() {
  return json::parse(R"({
    "name": "tiny",
    "dimension": 2,
    "clip_threshold": 2.0,
    "domain": [[-1, 1], [-1, 1]],
    "delta": 0.1,
    "horizon": 1.0,
    "seed": 3,
    "coefficients": {
      "mu": {"constant": [0.05, -0.02]},
      "m": {"constant": [[-0.5, 0.1], [0.1, -0.3]]},
      "sigma": {"breakpoints": [0.0, 1.0], "values": [[[0.3, 0.05], [0.05, 0.2]], [[0.35, 0.0], [0.0, 0.25]]]}
    },
    "training": {"n_x": 12, "n_t": 4, "width": 8, "depth": 2, "epochs": 15, "patience": 0},
    "eval_grid": {"n_x": 3, "n_t": 2},
    "payoff": {"kind": "call_on_avg", "strike": 1.0},
    "portfolio": {"gamma": 0.5, "mu": [0.05, 0.02], "sigma": [[0.04, 0.01], [0.01, 0.09]]}
  })");
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("genmarket_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write_scenario(tiny_scenario());
  }
  void TearDown() override { fs::remove_all(dir_); }

  void write_scenario(const json& j) { std::ofstream(dir_ / "scenario.json") << j.dump(2); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "genmarket");
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  std::vector<std::string> with(const std::string& cmd, const std::string& out_dir,
                                std::vector<std::string> extra = {}) {
    std::vector<std::string> a{cmd, "--scenario", (dir_ / "scenario.json").string(), "--out-dir",
                               (dir_ / out_dir).string()};
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST(Scenario, ParsesAndHashes) {
  auto s = parse_scenario(tiny_scenario());
  EXPECT_EQ(s.dimension, 2);
  EXPECT_EQ(s.training_set.n_x, 12);
  EXPECT_EQ(s.hash.size(), 16u);
  EXPECT_EQ(parse_scenario(tiny_scenario()).hash, s.hash);
  auto j = tiny_scenario();
  j["seed"] = 4;
  EXPECT_NE(parse_scenario(j).hash, s.hash);
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
}

TEST(Scenario, ErrorsNameTheField) {
  auto expect_field = [](json j, const std::string& field) {
    try {
      parse_scenario(j);
      ADD_FAILURE() << "expected ConfigError for " << field;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find("'" + field), std::string::npos) << e.what();
    }
  };
  auto j = tiny_scenario();
  j.erase("delta");
  expect_field(j, "delta");
  j = tiny_scenario();
  j["horizon"] = 0.05;
  expect_field(j, "horizon");
  j = tiny_scenario();
  j["domain"][1] = {1, -1};
  expect_field(j, "domain");
  j = tiny_scenario();
  j["coefficients"]["sigma"] = {{"constant", {{1.0, 0.0}, {0.0, -1.0}}}};
  expect_field(j, "coefficients");
  j = tiny_scenario();
  j["payoff"] = {{"kind", "custom_table"}, {"tables", {{{"knots", {0, 1}}, {"values", {0, 1}}}, {{"knots", {0, 1}}, {"values", {0, 1}}}}}};
  expect_field(j, "payoff.lip_const");
  j = tiny_scenario();
  j["clip_threshold"] = "two";
  expect_field(j, "clip_threshold");
}

TEST(Checkpoint, RoundTrip) {
  auto p = GDNParams::initialize(gdn_layer_dims(2, 6, 3), Activation::kSoftplus, 8);
  p.declared_width = 6;
  const auto path = fs::temp_directory_path() / "genmarket_ckpt_roundtrip.json";
  save_checkpoint({p, "0123456789abcdef", 8}, path);
  auto c = load_checkpoint(path);
  fs::remove(path);
  EXPECT_EQ(c.params.layer_dims, p.layer_dims);
  EXPECT_EQ(c.params.activation, Activation::kSoftplus);
  EXPECT_TRUE(c.params.flatten() == p.flatten());
  EXPECT_EQ(c.scenario_hash, "0123456789abcdef");
  EXPECT_EQ(c.seed, 8u);
}

TEST_F(CliTest, FullPipelineAndDeterminism) {
  for (const char* run_dir : {"a", "b"}) {
    ASSERT_EQ(run(with("simulate", run_dir, {"--paths", "500", "--steps", "20"})), 0) << err_.str();
    ASSERT_EQ(run(with("fit", run_dir)), 0) << err_.str();
    ASSERT_EQ(run(with("eval", run_dir, {"--spot-checks", "2", "--spot-samples", "64"})), 0) << err_.str();
    ASSERT_EQ(run(with("price", run_dir, {"--n", "2000", "--x", "0.1,0.2", "--t", "0.5"})), 0) << err_.str();
    ASSERT_EQ(run(with("portfolio", run_dir)), 0) << err_.str();
  }
  const auto hash = parse_scenario(tiny_scenario()).hash;
  for (const char* f : {"terminal_states.csv", "exact_marginal.json", "checkpoint.json",
                        "training_report.csv", "eval_report.csv", "eval_summary.json", "pricing.json",
                        "portfolio.json"}) {
    const std::string a = slurp(dir_ / "a" / f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, slurp(dir_ / "b" / f)) << f;
    EXPECT_NE(a.find(hash), std::string::npos) << f;
  }

  // One row per grid point plus the hash comment and header lines.
  std::ifstream report(dir_ / "a" / "eval_report.csv");
  int lines = 0;
  for (std::string line; std::getline(report, line);) ++lines;
  EXPECT_EQ(lines, 2 + 9 * 2);

  auto summary = json::parse(slurp(dir_ / "a" / "eval_summary.json"));
  EXPECT_NEAR(summary["s_law_max"].get<double>(),
              std::sqrt(2.0) * std::exp(2.0) * summary["epsilon"].get<double>(), 1e-12);

  auto portfolio = json::parse(slurp(dir_ / "a" / "portfolio.json"));
  double budget = 0.0;
  for (const auto& w : portfolio["weights"]) budget += w.get<double>();
  EXPECT_NEAR(budget, 1.0, 1e-12);
}

TEST_F(CliTest, ModelPortfolioAndThreadIndependence) {
  ASSERT_EQ(run(with("fit", "m")), 0) << err_.str();
  ASSERT_EQ(run(with("portfolio", "m", {"--checkpoint", (dir_ / "m" / "checkpoint.json").string(),
                                        "--x", "0,0", "--t", "0.5"})),
            0)
      << err_.str();
  auto doc = json::parse(slurp(dir_ / "m" / "portfolio.json"));
  EXPECT_EQ(doc["source"], "model");
}

TEST_F(CliTest, SigmaZeroSimulationIsDegenerate) {
  auto j = tiny_scenario();
  j["coefficients"]["sigma"] = {{"constant", {{1e-150, 0.0}, {0.0, 1e-150}}}};
  write_scenario(j);
  // sigma must be SPD, so a vanishing sigma is the degenerate limit.
  ASSERT_EQ(run(with("simulate", "z", {"--paths", "50", "--steps", "10", "--t", "0.5"})), 0) << err_.str();
  std::ifstream in(dir_ / "z" / "terminal_states.csv");
  std::string line, first;
  std::getline(in, line);
  std::getline(in, line);
  std::getline(in, first);
  while (std::getline(in, line)) EXPECT_EQ(line, first);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({"price", "--scenario", (dir_ / "scenario.json").string(), "--out-dir",
                 (dir_ / "none").string()}),
            cli::kExitConfig);
  EXPECT_NE(err_.str().find("evaluation report"), std::string::npos);

  EXPECT_EQ(run({"fit", "--scenario", (dir_ / "missing.json").string()}), cli::kExitConfig);
  EXPECT_EQ(run({"frobnicate"}), cli::kExitConfig);
  EXPECT_EQ(run({"fit"}), cli::kExitConfig);
  EXPECT_EQ(run({"--help"}), cli::kExitOk);

  auto j = tiny_scenario();
  j["training"]["n_x"] = "many";
  write_scenario(j);
  EXPECT_EQ(run(with("fit", "x")), cli::kExitConfig);
  EXPECT_NE(err_.str().find("training.n_x"), std::string::npos) << err_.str();

  j = tiny_scenario();
  j["training"]["learning_rate"] = 500.0;
  write_scenario(j);
  EXPECT_EQ(run(with("fit", "x")), cli::kExitNumeric);

  j = tiny_scenario();
  j["portfolio"]["sigma"] = {{1.0, 0.0}, {0.0, 1e-16}};
  write_scenario(j);
  EXPECT_EQ(run(with("portfolio", "x")), cli::kExitNumeric);
}
