// Copyright 2026 The causal_act Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "causal_act/experiment.hpp"

namespace ca = causal_act;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  fs::path p = fs::temp_directory_path() / "causal_act_tests" /
               (std::string(info->test_suite_name()) + "_" + info->name());
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::size_t count_lines(const fs::path& p) {
  const std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

ca::ExperimentConfig tiny_config() {
  ca::ExperimentConfig c;
  c.demos = 12;
  c.eval_episodes = 5;
  c.seeds = {3};
  c.train.epochs = 30;
  c.train.hidden = {16};
  c.train.z_dim = 2;
  c.train.chunk = 5;
  c.intervention.iterations = 4;
  return c;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CAUSAL_ACT_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_json(const fs::path& p, const nlohmann::json& j) {
  std::ofstream os(p, std::ios::binary);
  os << j.dump(2);
}

}  // namespace

TEST(ExperimentConfig, JsonRoundTrip) {
  ca::ExperimentConfig c = tiny_config();
  c.method = ca::Method::kActDr;
  c.dr_exponent = ca::kInfiniteExponent;
  c.dr_exponents = {0.0, 2.5, ca::kInfiniteExponent};
  c.intervene_out_of_distribution = true;
  c.env.distractor_mode = ca::DistractorMode::kActionCorrelated;
  const auto j = ca::experiment_config_to_json(c);
  const auto back = ca::experiment_config_from_json(j);
  EXPECT_EQ(ca::experiment_config_to_json(back).dump(), j.dump());
  EXPECT_TRUE(std::isinf(back.dr_exponent));
  EXPECT_EQ(back.seeds, c.seeds);
  EXPECT_EQ(back.train.hidden, c.train.hidden);
}

TEST(ExperimentConfig, SingleSeedKeyAndDefaults) {
  const auto c = ca::experiment_config_from_json({{"seed", 9}});
  EXPECT_EQ(c.seeds, std::vector<std::uint64_t>{9});
  EXPECT_EQ(c.eval_episodes, 50u);
  EXPECT_EQ(c.demos, 200u);
}

TEST(ExperimentConfig, InvalidValuesRejected) {
  EXPECT_THROW(ca::experiment_config_from_json({{"eval_episodes", 0}}), ca::UsageError);
  EXPECT_THROW(ca::experiment_config_from_json({{"seeds", nlohmann::json::array()}}), ca::UsageError);
  EXPECT_THROW(ca::experiment_config_from_json({{"method", "bogus"}}), ca::UsageError);
  EXPECT_THROW(ca::experiment_config_from_json({{"demos", "many"}}), ca::UsageError);
  EXPECT_THROW(ca::load_experiment_config("/nonexistent/cfg.json"), ca::UsageError);
}

TEST(ExperimentConfig, SeedOverrideShiftsList) {
  ca::ExperimentConfig c;
  c.seeds = {0, 1, 2};
  ca::apply_seed_override(c, 40);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{40, 41, 42}));

  ::setenv(ca::kSeedEnvVar, "7", 1);
  EXPECT_TRUE(ca::apply_seed_env(c));
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{7, 8, 9}));
  ::setenv(ca::kSeedEnvVar, "7x", 1);
  EXPECT_THROW(ca::apply_seed_env(c), ca::UsageError);
  ::unsetenv(ca::kSeedEnvVar);
  EXPECT_FALSE(ca::apply_seed_env(c));
}

TEST(GenDemos, LineCountAndRerunIdentical) {
  const auto dir = scratch_dir();
  ca::ExperimentConfig c = tiny_config();
  c.demos = 200;
  std::ostringstream log;
  ca::cmd_gen_demos(c, (dir / "a.jsonl").string(), log);
  ca::cmd_gen_demos(c, (dir / "b.jsonl").string(), log);
  EXPECT_EQ(count_lines(dir / "a.jsonl"), 201u);
  EXPECT_EQ(slurp(dir / "a.jsonl"), slurp(dir / "b.jsonl"));
  EXPECT_NE(log.str().find("reward 4 x200"), std::string::npos) << log.str();
}

TEST(GenDemos, DrZeroCountsUniform) {
  const auto dir = scratch_dir();
  ca::ExperimentConfig c = tiny_config();
  c.demos = 200;
  c.method = ca::Method::kActDr;
  c.dr_exponent = 0.0;
  std::ostringstream log;
  const auto ds = ca::cmd_gen_demos(c, (dir / "dr.jsonl").string(), log);
  std::vector<double> observed(6, 0.0);
  for (const auto& ep : ds.episodes) {
    ASSERT_GE(ep.distractor_count, 1);
    ASSERT_LE(ep.distractor_count, 6);
    observed[ep.distractor_count - 1] += 1.0;
  }
  const double expected = 200.0 / 6.0;
  double chi2 = 0.0;
  for (double o : observed) chi2 += (o - expected) * (o - expected) / expected;
  // chi-square upper 1% point with 5 degrees of freedom
  EXPECT_LT(chi2, 15.086) << "chi2 = " << chi2;
}

class TrainedCheckpoints : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "causal_act_tests" / "trained";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    std::ostringstream log;
    cfg_ = tiny_config();
    ca::cmd_gen_demos(cfg_, (dir_ / "demos.jsonl").string(), log);
    cfg_.method = ca::Method::kAct;
    act_ = ca::cmd_train(cfg_, (dir_ / "demos.jsonl").string(), (dir_ / "act.json").string(),
                         (dir_ / "act_log.csv").string(), log);
    cfg_.method = ca::Method::kCausalAct;
    causal_ = ca::cmd_train(cfg_, (dir_ / "demos.jsonl").string(), (dir_ / "causal.json").string(),
                            (dir_ / "causal_log.csv").string(), log);
  }

  static inline fs::path dir_;
  static inline ca::ExperimentConfig cfg_;
  static inline ca::TrainResult act_;
  static inline ca::TrainResult causal_;
};

TEST_F(TrainedCheckpoints, LogHasOneRowPerEpoch) {
  EXPECT_EQ(count_lines(dir_ / "act_log.csv"), cfg_.train.epochs + 1);
  EXPECT_EQ(count_lines(dir_ / "causal_log.csv"), cfg_.train.epochs + 1);
}

TEST_F(TrainedCheckpoints, MethodsProduceDifferentCheckpoints) {
  EXPECT_NE(slurp(dir_ / "act.json"), slurp(dir_ / "causal.json"));
  EXPECT_EQ(ca::checkpoint_method(ca::load_json_file((dir_ / "act.json").string())), "act");
  EXPECT_EQ(ca::checkpoint_method(ca::load_json_file((dir_ / "causal.json").string())), "causal-act");
}

TEST_F(TrainedCheckpoints, LossDecreases) {
  EXPECT_LT(act_.log.back().total, act_.log.front().total);
  EXPECT_LT(causal_.log.back().total, causal_.log.front().total);
}

TEST_F(TrainedCheckpoints, DatasetMismatchRejected) {
  ca::ExperimentConfig c = cfg_;
  c.env.n_distractors = 3;
  std::ostringstream log;
  EXPECT_THROW(ca::cmd_train(c, (dir_ / "demos.jsonl").string(), (dir_ / "x.json").string(), "", log),
               ca::DataError);
}

TEST_F(TrainedCheckpoints, InterveneRefusesActCheckpoint) {
  std::ostringstream log;
  try {
    ca::cmd_intervene(cfg_, (dir_ / "act.json").string(), "", "", log);
    FAIL() << "expected UsageError";
  } catch (const ca::UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("causal-act"), std::string::npos);
  }
}

TEST_F(TrainedCheckpoints, InterveneTrailHasNRows) {
  const auto dir = scratch_dir();
  std::ostringstream log;
  const auto r = ca::cmd_intervene(cfg_, (dir_ / "causal.json").string(), (dir / "trail.csv").string(),
                                   (dir / "model.json").string(), log);
  EXPECT_EQ(count_lines(dir / "trail.csv"), cfg_.intervention.iterations + 1);
  const auto model = ca::load_json_file((dir / "model.json").string());
  EXPECT_EQ(model.at("best_graph").get<std::string>(), r.best.to_string());
  const auto g = ca::graph_from_source("file:" + (dir / "model.json").string(), r.best.size(), 0);
  EXPECT_EQ(g, r.best);
}

TEST_F(TrainedCheckpoints, EvalRatesAreCountsOverFifty) {
  ca::ExperimentConfig c = cfg_;
  c.eval_episodes = 50;
  std::ostringstream log;
  const auto rows = ca::cmd_eval(c, (dir_ / "causal.json").string(), "all-ones", "", log);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.ladder_ok());
    for (double v : {r.touched, r.lifted, r.transfer}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      EXPECT_NEAR(v * 50.0, std::round(v * 50.0), 1e-9);
    }
  }
}

TEST_F(TrainedCheckpoints, RandomGraphPerSeedIsLogged) {
  const auto dir = scratch_dir();
  ca::ExperimentConfig c = cfg_;
  c.seeds = {0, 1, 2, 3};
  c.eval_episodes = 1;
  std::ostringstream log;
  const auto rows = ca::cmd_eval(c, (dir_ / "causal.json").string(), "random", (dir / "r.csv").string(), log);
  ASSERT_EQ(rows.size(), 8u);
  const std::size_t n = causal_.params.dims.feature_dim;
  for (const auto& r : rows) {
    EXPECT_EQ(r.graph_source, "random");
    EXPECT_EQ(r.graph, ca::random_graph_for_seed(n, r.seed).to_string());
  }
  EXPECT_EQ(rows[0].graph, rows[1].graph);
  EXPECT_NE(rows[0].graph, rows[2].graph);
  EXPECT_EQ(count_lines(dir / "r.csv"), 9u);
}

TEST_F(TrainedCheckpoints, MissingGraphFile) {
  std::ostringstream log;
  EXPECT_THROW(ca::cmd_eval(cfg_, (dir_ / "causal.json").string(), "file:/nonexistent/g.json", "", log),
               ca::DataError);
  EXPECT_THROW(ca::graph_from_source("sometimes", 4, 0), ca::UsageError);
}

TEST_F(TrainedCheckpoints, CliExitCodes) {
  const auto dir = scratch_dir();
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli("no-such-command"), 1);
  EXPECT_EQ(run_cli("eval --checkpoint " + (dir_ / "causal.json").string() + " -g file:/nonexistent/g"), 2);
  EXPECT_EQ(run_cli("train -d /nonexistent/demos.jsonl -o " + (dir / "c.json").string()), 2);
}

TEST_F(TrainedCheckpoints, CliSeedEnvMatchesFlag) {
  const auto dir = scratch_dir();
  write_json(dir / "cfg.json", ca::experiment_config_to_json(cfg_));
  const std::string base = "gen-demos -c " + (dir / "cfg.json").string() + " -n 5 -o ";
  ASSERT_EQ(run_cli(base + (dir / "flag.jsonl").string() + " --seed 11"), 0);
  ::setenv(ca::kSeedEnvVar, "11", 1);
  const int rc = run_cli(base + (dir / "env.jsonl").string());
  ::unsetenv(ca::kSeedEnvVar);
  ASSERT_EQ(rc, 0);
  ASSERT_EQ(run_cli(base + (dir / "plain.jsonl").string()), 0);
  EXPECT_EQ(slurp(dir / "flag.jsonl"), slurp(dir / "env.jsonl"));
  EXPECT_NE(slurp(dir / "flag.jsonl"), slurp(dir / "plain.jsonl"));
}

TEST(Experiment, GridReportLayoutAndDeterminism) {
  const auto dir = scratch_dir();
  ca::ExperimentConfig c = tiny_config();
  c.eval_episodes = 2;
  c.train.epochs = 10;
  c.intervention.iterations = 2;
  std::ostringstream log;
  c.output_dir = (dir / "a").string();
  const auto a = ca::cmd_experiment(c, log);
  c.output_dir = (dir / "b").string();
  const auto b = ca::cmd_experiment(c, log);
  EXPECT_EQ(slurp(dir / "a" / "report.txt"), slurp(dir / "b" / "report.txt"));
  EXPECT_EQ(slurp(dir / "a" / "results.csv"), slurp(dir / "b" / "results.csv"));
  EXPECT_EQ(a.report, b.report);

  // ACT, four DR exponents, g*, random and full graphs
  const auto pos = a.report.find("Table 2");
  ASSERT_NE(pos, std::string::npos);
  std::istringstream table(a.report.substr(pos));
  std::string line;
  std::getline(table, line);
  std::getline(table, line);
  int rows = 0;
  while (std::getline(table, line) && !line.empty()) ++rows;
  EXPECT_EQ(rows, 8);

  // 2 conditions x (act + 4 dr + 3 causal variants)
  EXPECT_EQ(a.rows.size(), 16u);
  for (const auto& r : a.rows) {
    EXPECT_TRUE(r.ladder_ok());
    if (r.method == "causal-act-full-graph") {
      EXPECT_EQ(r.graph_source, "all-ones");
      EXPECT_EQ(r.graph, std::string(r.graph.size(), '1'));
    }
  }
  EXPECT_TRUE(fs::exists(dir / "a" / "seed_3" / "causal_act.json"));
  EXPECT_EQ(ca::checkpoint_method(ca::load_json_file((dir / "a" / "seed_3" / "causal_act.json").string())),
            "causal-act");
}
