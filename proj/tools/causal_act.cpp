// Copyright 2026 The causal_act Authors.
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

// Batch command line front end. Exit codes: 0 success, 1 usage, 2 data,
// 3 numeric failure.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "causal_act/causal_core.hpp"
#include "causal_act/experiment.hpp"
#include "causal_act/scm_check.hpp"

namespace {

using namespace causal_act;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string distractor_mode;
  std::string method;
  std::string dr_k;
  std::optional<std::size_t> episodes;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config_path, "experiment config (JSON)");
  cmd->add_option("--seed", o.seed, "master seed (overrides config and CAUSAL_ACT_SEED)");
  cmd->add_option("--distractor-mode", o.distractor_mode, "fixed | absent | randomized | action-correlated");
}

ExperimentConfig resolve_config(const CommonOptions& o) {
  ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig{} : load_experiment_config(o.config_path);
  apply_seed_env(cfg);
  if (o.seed) apply_seed_override(cfg, *o.seed);
  if (!o.distractor_mode.empty()) cfg.env.distractor_mode = distractor_mode_from_string(o.distractor_mode);
  if (!o.method.empty()) cfg.method = method_from_string(o.method);
  if (!o.dr_k.empty()) cfg.dr_exponent = exponent_from_json(nlohmann::json(o.dr_k));
  cfg.validate();
  return cfg;
}

int run_scm_check(std::size_t graphs, std::size_t trials, std::size_t samples, double alpha, std::uint64_t seed,
                  const std::string& dataset_path, const std::string& csv_path) {
  bool ok = true;
  const auto family = policy_graph_family_check(graphs, seed);
  std::cout << "policy graph family: " << family.solvable << "/" << family.graphs
            << " uniquely solvable w.r.t. A; " << family.mutated_rejected << "/" << family.graphs
            << " rejected after adding A->A\n";
  ok = ok && family.ok();

  const auto markov = chain_markov_fixture(trials, samples, seed, alpha);
  std::cout << "local Markov chain fixture: " << markov.passed << "/" << markov.trials << " trials passed (rate "
            << format_double(markov.pass_rate()) << ", need >= 0.95)\n";
  ok = ok && markov.ok();

  if (!dataset_path.empty()) {
    const Dataset ds = load_dataset(dataset_path);
    const auto d = check_disentanglement(ds, alpha);
    std::cout << "disentanglement scan of " << dataset_path << ": " << d.reports.size()
              << " pairs, dependent fraction " << format_double(d.dependent_fraction) << '\n';
    if (!csv_path.empty()) {
      std::ofstream os(csv_path, std::ios::binary);
      if (!os) throw DataError("cannot open '" + csv_path + "' for writing");
      write_ci_csv_header(os);
      for (const auto& r : d.reports) write_ci_csv_row(os, r);
    }
  }
  std::cout << (ok ? "scm-check: all checks passed\n" : "scm-check: FAILED\n");
  return ok ? 0 : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causal_act: graph-masked imitation learning with targeted intervention"};
  app.require_subcommand(1);

  CommonOptions gen_o, train_o, iv_o, eval_o, exp_o;
  std::string out_path, dataset_path, checkpoint_path, log_path, trail_path, model_path, graph_source = "all-ones",
                                                                                       results_path, output_dir;
  std::optional<std::size_t> epochs;

  auto* gen = app.add_subcommand("gen-demos", "generate scripted expert demonstrations (JSONL)");
  add_common(gen, gen_o);
  gen->add_option("--method", gen_o.method, "act-dr selects the domain-randomized environment");
  gen->add_option("--dr-k", gen_o.dr_k, "DR exponent for act-dr (number or inf)");
  gen->add_option("-n,--episodes", gen_o.episodes, "number of episodes");
  gen->add_option("-o,--out", out_path, "output dataset path")->required();

  auto* tr = app.add_subcommand("train", "train a policy checkpoint");
  add_common(tr, train_o);
  tr->add_option("--method", train_o.method, "act | act-dr | causal-act");
  tr->add_option("--dr-k", train_o.dr_k, "DR exponent for act-dr (number or inf)");
  tr->add_option("-d,--dataset", dataset_path, "dataset path")->required();
  tr->add_option("-o,--out", checkpoint_path, "checkpoint output path")->required();
  tr->add_option("--log", log_path, "training log CSV (epoch, mse, kl, total)");
  tr->add_option("--epochs", epochs, "override training epochs");

  auto* iv = app.add_subcommand("intervene", "targeted intervention over graph masks");
  add_common(iv, iv_o);
  iv->add_option("--checkpoint", checkpoint_path, "causal-act checkpoint")->required();
  iv->add_option("--trail", trail_path, "intervention trail CSV")->required();
  iv->add_option("--model", model_path, "energy model JSON (includes best_graph)")->required();

  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint in- and out-of-distribution");
  add_common(ev, eval_o);
  ev->add_option("--method", eval_o.method, "method of the checkpoint (act-dr selects the DR environment)");
  ev->add_option("--dr-k", eval_o.dr_k, "DR exponent for act-dr (number or inf)");
  ev->add_option("--checkpoint", checkpoint_path, "policy checkpoint")->required();
  ev->add_option("-g,--graph", graph_source, "all-ones | all-zeros | random | file:<path>");
  ev->add_option("-n,--episodes", eval_o.episodes, "evaluation episodes per seed");
  ev->add_option("-o,--results", results_path, "results CSV");

  auto* ex = app.add_subcommand("experiment", "run the full method grid and write the report");
  add_common(ex, exp_o);
  ex->add_option("-o,--output-dir", output_dir, "output directory (overrides config)");

  std::size_t graphs = 1000, trials = 100, samples = 10000;
  double alpha = kDefaultAlpha;
  std::uint64_t check_seed = 0;
  std::string ci_csv;
  auto* sc = app.add_subcommand("scm-check", "causal-core verification suite");
  sc->add_option("--graphs", graphs, "random policy graphs for the solvability family check");
  sc->add_option("--trials", trials, "seeded local Markov trials");
  sc->add_option("--samples", samples, "samples per trial");
  sc->add_option("--alpha", alpha, "significance level");
  sc->add_option("--seed", check_seed, "seed");
  sc->add_option("-d,--dataset", dataset_path, "dataset for the disentanglement scan");
  sc->add_option("--csv", ci_csv, "CI report CSV for the disentanglement scan");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) {
      auto cfg = resolve_config(gen_o);
      if (gen_o.episodes) cfg.demos = *gen_o.episodes;
      cmd_gen_demos(cfg, out_path, std::cout);
    } else if (*tr) {
      auto cfg = resolve_config(train_o);
      if (epochs) cfg.train.epochs = *epochs;
      cmd_train(cfg, dataset_path, checkpoint_path, log_path, std::cout);
    } else if (*iv) {
      cmd_intervene(resolve_config(iv_o), checkpoint_path, trail_path, model_path, std::cout);
    } else if (*ev) {
      auto cfg = resolve_config(eval_o);
      if (eval_o.episodes) cfg.eval_episodes = *eval_o.episodes;
      cmd_eval(cfg, checkpoint_path, graph_source, results_path, std::cout);
    } else if (*ex) {
      auto cfg = resolve_config(exp_o);
      if (!output_dir.empty()) cfg.output_dir = output_dir;
      const auto out = cmd_experiment(cfg, std::cerr);
      std::cout << out.report;
    } else if (*sc) {
      return run_scm_check(graphs, trials, samples, alpha, check_seed, dataset_path, ci_csv);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
