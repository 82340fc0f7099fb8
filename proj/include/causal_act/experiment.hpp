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

// Experiment orchestration: demo generation, training, intervention,
// evaluation and the ACT / DR / Causal-ACT / ablation grid with its report.

#ifndef CAUSAL_ACT_EXPERIMENT_HPP_
#define CAUSAL_ACT_EXPERIMENT_HPP_

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "causal_act/common.hpp"
#include "causal_act/dataset.hpp"
#include "causal_act/graph_mask.hpp"
#include "causal_act/graph_policy.hpp"
#include "causal_act/intervention.hpp"
#include "causal_act/transfer_env.hpp"

namespace causal_act {

enum class Method { kAct, kActDr, kCausalAct, kCausalActRandomGraph, kCausalActFullGraph };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::kAct: return "act";
    case Method::kActDr: return "act-dr";
    case Method::kCausalAct: return "causal-act";
    case Method::kCausalActRandomGraph: return "causal-act-random-graph";
    case Method::kCausalActFullGraph: return "causal-act-full-graph";
  }
  return "?";
}

inline Method method_from_string(const std::string& s) {
  if (s == "act") return Method::kAct;
  if (s == "act-dr") return Method::kActDr;
  if (s == "causal-act") return Method::kCausalAct;
  if (s == "causal-act-random-graph") return Method::kCausalActRandomGraph;
  if (s == "causal-act-full-graph") return Method::kCausalActFullGraph;
  throw UsageError("unknown method '" + s +
                   "' (expected act, act-dr, causal-act, causal-act-random-graph, causal-act-full-graph)");
}

/// act and act-dr train on all-ones graphs; the causal-act family on
/// uniformly sampled graphs.
inline GraphSampling graph_sampling_for(Method m) {
  return (m == Method::kAct || m == Method::kActDr) ? GraphSampling::kAllOnes : GraphSampling::kUniform;
}

enum class Condition { kInDistribution, kOutOfDistribution };

inline std::string to_string(Condition c) {
  return c == Condition::kInDistribution ? "in-distribution" : "out-of-distribution";
}

inline constexpr char kSeedEnvVar[] = "CAUSAL_ACT_SEED";

struct ExperimentConfig {
  EnvConfig env;  // training environment for act / causal-act
  TrainConfig train;
  InterventionConfig intervention;
  std::size_t demos = 200;
  std::size_t eval_episodes = 50;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  Method method = Method::kCausalAct;  // single-run commands
  double dr_exponent = 0.0;            // act-dr single runs
  std::vector<double> dr_exponents{0.0, 3.0, 6.0, kInfiniteExponent};
  DistractorPayload dr_payload = DistractorPayload::kAction;
  bool intervene_out_of_distribution = false;  // ablation override
  std::string output_dir = "results";

  void validate() const {
    env.validate();
    train.validate();
    intervention.validate();
    if (demos < 1) throw UsageError("ExperimentConfig: demos must be >= 1");
    if (eval_episodes < 1) throw UsageError("ExperimentConfig: evaluation episodes must be >= 1");
    if (seeds.empty()) throw UsageError("ExperimentConfig: seeds must be non-empty");
    if (dr_exponent < 0.0) throw UsageError("ExperimentConfig: DR exponent must be >= 0");
    for (double k : dr_exponents)
      if (k < 0.0) throw UsageError("ExperimentConfig: DR exponents must be >= 0");
  }

  std::uint64_t seed() const { return seeds.front(); }

  /// Domain-randomized variant of the training environment with exponent k.
  EnvConfig dr_env(double k) const {
    EnvConfig c = env;
    c.distractor_mode = DistractorMode::kRandomized;
    c.dr_exponent = k;
    c.randomized_payload = dr_payload;
    return c;
  }

  /// Training (and in-distribution evaluation) environment of `method`.
  EnvConfig training_env() const { return method == Method::kActDr ? dr_env(dr_exponent) : env; }

  /// Same task with every distractor removed.
  EnvConfig ood_env() const {
    EnvConfig c = env;
    c.distractor_mode = DistractorMode::kAbsent;
    return c;
  }

  EnvConfig intervention_env() const { return intervene_out_of_distribution ? ood_env() : env; }
};

/// Replaces the seed list with s, s+1, ... keeping its length.
inline void apply_seed_override(ExperimentConfig& cfg, std::uint64_t s) {
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) cfg.seeds[i] = s + i;
}

/// Applies CAUSAL_ACT_SEED when set. Returns true if it was applied.
inline bool apply_seed_env(ExperimentConfig& cfg) {
  const char* v = std::getenv(kSeedEnvVar);
  if (!v || !*v) return false;
  std::size_t pos = 0;
  unsigned long long s = 0;
  try {
    s = std::stoull(v, &pos);
  } catch (const std::exception&) {
    throw UsageError(std::string(kSeedEnvVar) + " must be an unsigned integer, got '" + v + "'");
  }
  if (pos != std::string(v).size())
    throw UsageError(std::string(kSeedEnvVar) + " must be an unsigned integer, got '" + v + "'");
  apply_seed_override(cfg, s);
  return true;
}

// ---------------------------------------------------------------------------
// Config JSON

inline nlohmann::json train_config_to_json(const TrainConfig& t) {
  return {{"epochs", t.epochs},
          {"batch_size", t.batch_size},
          {"chunk", t.chunk},
          {"beta", t.beta},
          {"learning_rate", t.learning_rate},
          {"encoder_mode", to_string(t.encoder_mode)},
          {"feature_dim", t.feature_dim},
          {"z_dim", t.z_dim},
          {"hidden", t.hidden},
          {"zero_init_output", t.zero_init_output}};
}

inline TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig t = {}) {
  if (j.contains("epochs")) t.epochs = j["epochs"].get<std::size_t>();
  if (j.contains("batch_size")) t.batch_size = j["batch_size"].get<std::size_t>();
  if (j.contains("chunk")) t.chunk = j["chunk"].get<std::size_t>();
  if (j.contains("beta")) t.beta = j["beta"].get<double>();
  if (j.contains("learning_rate")) t.learning_rate = j["learning_rate"].get<double>();
  if (j.contains("encoder_mode")) t.encoder_mode = encoder_mode_from_string(j["encoder_mode"].get<std::string>());
  if (j.contains("feature_dim")) t.feature_dim = j["feature_dim"].get<std::size_t>();
  if (j.contains("z_dim")) t.z_dim = j["z_dim"].get<std::size_t>();
  if (j.contains("hidden")) t.hidden = j["hidden"].get<std::vector<std::size_t>>();
  if (j.contains("zero_init_output")) t.zero_init_output = j["zero_init_output"].get<bool>();
  return t;
}

inline nlohmann::json intervention_config_to_json(const InterventionConfig& c) {
  return {{"iterations", c.iterations},
          {"episodes_per_eval", c.episodes_per_eval},
          {"ridge", c.ridge},
          {"tau", c.tau}};
}

inline InterventionConfig intervention_config_from_json(const nlohmann::json& j, InterventionConfig c = {}) {
  if (j.contains("iterations")) c.iterations = j["iterations"].get<std::size_t>();
  if (j.contains("episodes_per_eval")) c.episodes_per_eval = j["episodes_per_eval"].get<std::size_t>();
  if (j.contains("ridge")) c.ridge = j["ridge"].get<double>();
  if (j.contains("tau")) c.tau = j["tau"].get<double>();
  return c;
}

inline nlohmann::json experiment_config_to_json(const ExperimentConfig& c) {
  nlohmann::json dr = nlohmann::json::array();
  for (double k : c.dr_exponents) dr.push_back(exponent_to_json(k));
  return {{"env", env_config_to_json(c.env)},
          {"train", train_config_to_json(c.train)},
          {"intervention", intervention_config_to_json(c.intervention)},
          {"demos", c.demos},
          {"eval_episodes", c.eval_episodes},
          {"seeds", c.seeds},
          {"method", to_string(c.method)},
          {"dr_exponent", exponent_to_json(c.dr_exponent)},
          {"dr_exponents", dr},
          {"dr_payload", to_string(c.dr_payload)},
          {"intervene_out_of_distribution", c.intervene_out_of_distribution},
          {"output_dir", c.output_dir}};
}

/// Missing keys keep their defaults. "seed" alone sets a one-element seed list.
inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    if (!j.is_object()) throw UsageError("experiment config must be a JSON object");
    if (j.contains("env")) c.env = env_config_from_json(j["env"]);
    if (j.contains("train")) c.train = train_config_from_json(j["train"]);
    if (j.contains("intervention")) c.intervention = intervention_config_from_json(j["intervention"]);
    if (j.contains("demos")) c.demos = j["demos"].get<std::size_t>();
    if (j.contains("eval_episodes")) c.eval_episodes = j["eval_episodes"].get<std::size_t>();
    if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    else if (j.contains("seed")) c.seeds = {j["seed"].get<std::uint64_t>()};
    if (j.contains("method")) c.method = method_from_string(j["method"].get<std::string>());
    if (j.contains("dr_exponent")) c.dr_exponent = exponent_from_json(j["dr_exponent"]);
    if (j.contains("dr_exponents")) {
      c.dr_exponents.clear();
      for (const auto& k : j["dr_exponents"]) c.dr_exponents.push_back(exponent_from_json(k));
    }
    if (j.contains("dr_payload"))
      c.dr_payload = distractor_payload_from_string(j["dr_payload"].get<std::string>());
    if (j.contains("intervene_out_of_distribution"))
      c.intervene_out_of_distribution = j["intervene_out_of_distribution"].get<bool>();
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw UsageError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config '" + path + "': malformed JSON: " + e.what());
  }
  return experiment_config_from_json(j);
}

// ---------------------------------------------------------------------------
// Evaluation

struct ResultRow {
  std::string method;
  std::optional<double> dr_k;
  Condition condition = Condition::kInDistribution;
  std::uint64_t seed = 0;
  std::string graph_source;
  std::string graph;
  std::size_t episodes = 0;
  double touched = 0.0;
  double lifted = 0.0;
  double transfer = 0.0;

  bool ladder_ok() const { return touched >= lifted && lifted >= transfer; }
};

inline void write_result_csv_header(std::ostream& os) {
  os << "method,dr_k,condition,seed,graph_source,graph,episodes,touched,lifted,transfer\n";
}

inline std::string format_exponent(double k) { return std::isinf(k) ? "inf" : format_double(k); }

inline void write_result_csv_row(std::ostream& os, const ResultRow& r) {
  os << r.method << ',' << (r.dr_k ? format_exponent(*r.dr_k) : "") << ',' << to_string(r.condition) << ','
     << r.seed << ',' << r.graph_source << ',' << r.graph << ',' << r.episodes << ','
     << format_double(r.touched) << ',' << format_double(r.lifted) << ',' << format_double(r.transfer)
     << '\n';
}

/// Episode e of an evaluation under `seed` uses derive_seed(derive_seed(seed, 401), e),
/// so every method is scored on the same episodes.
inline std::uint64_t eval_episode_seed(std::uint64_t seed, std::size_t e) {
  return derive_seed(derive_seed(seed, 401), e);
}

struct StageRates {
  double touched = 0.0;
  double lifted = 0.0;
  double transfer = 0.0;
};

inline StageRates evaluate_policy(const PolicyParams& p, const EnvConfig& env, const GraphMask& g,
                                  std::size_t episodes, std::uint64_t seed) {
  std::size_t touched = 0, lifted = 0, transferred = 0;
  for (std::size_t e = 0; e < episodes; ++e) {
    const auto r = rollout(p, env, g, eval_episode_seed(seed, e));
    touched += r.flags.touched;
    lifted += r.flags.lifted;
    transferred += r.flags.transferred;
  }
  const auto n = static_cast<double>(episodes);
  return {static_cast<double>(touched) / n, static_cast<double>(lifted) / n, static_cast<double>(transferred) / n};
}

inline ResultRow make_row(const std::string& method, std::optional<double> dr_k, Condition c, std::uint64_t seed,
                          const std::string& source, const GraphMask& g, std::size_t episodes,
                          const StageRates& r) {
  return {method, dr_k, c, seed, source, g.to_string(), episodes, r.touched, r.lifted, r.transfer};
}

/// One uniform graph per seed for the random-graph ablation.
inline GraphMask random_graph_for_seed(std::size_t feature_dim, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 301));
  return sample_uniform_graph(feature_dim, rng);
}

// ---------------------------------------------------------------------------
// Single-step commands

inline std::string checkpoint_method(const nlohmann::json& checkpoint) {
  if (!checkpoint.contains("policy")) return "";
  return checkpoint["policy"].value("method", std::string());
}

inline Dataset cmd_gen_demos(const ExperimentConfig& cfg, const std::string& out_path, std::ostream& log) {
  cfg.validate();
  const EnvConfig env = cfg.training_env();
  Dataset ds = generate_demos(env, cfg.demos, cfg.seed());
  save_dataset(out_path, ds);
  std::map<int, std::size_t> rewards, counts;
  for (const auto& ep : ds.episodes) {
    ++rewards[ep.reward];
    ++counts[ep.distractor_count];
  }
  log << "wrote " << ds.episodes.size() << " episodes to " << out_path << " (mode "
      << to_string(env.distractor_mode) << ")\n";
  log << "reward audit:";
  for (const auto& [r, n] : rewards) log << " reward " << r << " x" << n;
  log << '\n';
  if (env.distractor_mode == DistractorMode::kRandomized) {
    log << "distractor counts:";
    for (const auto& [c, n] : counts) log << ' ' << c << ":" << n;
    log << '\n';
  }
  return ds;
}

inline TrainConfig train_config_for(const ExperimentConfig& cfg, Method m, std::uint64_t seed) {
  TrainConfig t = cfg.train;
  t.graph_sampling = graph_sampling_for(m);
  t.seed = seed;
  return t;
}

inline TrainResult cmd_train(const ExperimentConfig& cfg, const std::string& dataset_path,
                             const std::string& checkpoint_path, const std::string& log_csv_path,
                             std::ostream& log) {
  cfg.validate();
  const Dataset ds = load_dataset(dataset_path);
  const EnvConfig env = cfg.training_env();
  if (ds.obs_dim != env.obs_dim())
    throw DataError("dataset observation size " + std::to_string(ds.obs_dim) + " does not match config (" +
                    std::to_string(env.obs_dim()) + " for " + std::to_string(env.n_distractors) +
                    " distractor slots)");
  if (ds.act_dim != kActDim || ds.joints_dim != kJointsDim)
    throw DataError("dataset action/joint sizes do not match the environment");
  if (cfg.train.chunk > ds.horizon)
    throw UsageError("chunk size " + std::to_string(cfg.train.chunk) + " exceeds episode length " +
                     std::to_string(ds.horizon));
  TrainResult r = train(ds, train_config_for(cfg, cfg.method, cfg.seed()), &log);
  save_policy(checkpoint_path, r, to_string(cfg.method));
  if (!log_csv_path.empty()) {
    std::ofstream os(log_csv_path, std::ios::binary);
    if (!os) throw DataError("cannot open '" + log_csv_path + "' for writing");
    write_train_log_csv(os, r.log);
  }
  log << "trained " << to_string(cfg.method) << " for " << r.log.size() << " epochs; final loss "
      << format_double(r.log.back().total) << '\n';
  return r;
}

inline void write_intervention_outputs(const InterventionResult& r, const std::string& trail_path,
                                       const std::string& model_path) {
  if (!trail_path.empty()) {
    std::ofstream os(trail_path, std::ios::binary);
    if (!os) throw DataError("cannot open '" + trail_path + "' for writing");
    write_trail_csv(os, r.records);
  }
  if (!model_path.empty()) {
    std::ofstream os(model_path, std::ios::binary);
    if (!os) throw DataError("cannot open '" + model_path + "' for writing");
    os << energy_model_to_json(r.model).dump(2) << '\n';
  }
}

inline InterventionResult cmd_intervene(const ExperimentConfig& cfg, const std::string& checkpoint_path,
                                        const std::string& trail_path, const std::string& model_path,
                                        std::ostream& log) {
  cfg.validate();
  const auto j = load_json_file(checkpoint_path);
  const PolicyParams p = policy_from_json(j);
  const std::string method = checkpoint_method(j);
  if (p.graph_sampling == GraphSampling::kAllOnes)
    throw UsageError("checkpoint '" + checkpoint_path + "' was trained with all-ones graphs (method " +
                     (method.empty() ? "act" : method) +
                     "); it has no graph conditioning to intervene on. Train with method causal-act.");
  InterventionConfig ic = cfg.intervention;
  ic.seed = cfg.seed();
  const InterventionResult r = targeted_intervention(p, cfg.intervention_env(), ic, &log);
  write_intervention_outputs(r, trail_path, model_path);
  log << "g* = " << r.best.to_string() << " (" << r.best.count() << "/" << r.best.size() << " features)\n";
  return r;
}

/// all-ones | all-zeros | random | file:<path>. The file holds either an
/// energy-model JSON with "best_graph" or a bare 0/1 string.
inline GraphMask graph_from_source(const std::string& source, std::size_t feature_dim, std::uint64_t seed) {
  if (source == "all-ones") return GraphMask::ones(feature_dim);
  if (source == "all-zeros") return GraphMask::zeros(feature_dim);
  if (source == "random") return random_graph_for_seed(feature_dim, seed);
  if (source.rfind("file:", 0) == 0) {
    const std::string path = source.substr(5);
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("graph file '" + path + "' not found");
    std::stringstream buf;
    buf << is.rdbuf();
    std::string text = buf.str();
    GraphMask g;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
      try {
        g = GraphMask::from_string(nlohmann::json::parse(text).at("best_graph").get<std::string>());
      } catch (const nlohmann::json::exception& e) {
        throw DataError("graph file '" + path + "': " + e.what());
      }
    } else {
      text.erase(std::remove_if(text.begin(), text.end(), [](char c) { return std::isspace(
                     static_cast<unsigned char>(c)); }),
                 text.end());
      g = GraphMask::from_string(text);
    }
    if (g.size() != feature_dim)
      throw DataError("graph file '" + path + "' has " + std::to_string(g.size()) + " bits, policy expects " +
                      std::to_string(feature_dim));
    return g;
  }
  throw UsageError("unknown graph source '" + source + "' (expected all-ones, all-zeros, random, file:<path>)");
}

/// Evaluates one checkpoint under both conditions for every configured seed.
inline std::vector<ResultRow> cmd_eval(const ExperimentConfig& cfg, const std::string& checkpoint_path,
                                       const std::string& graph_source, const std::string& results_path,
                                       std::ostream& log) {
  cfg.validate();
  const auto j = load_json_file(checkpoint_path);
  const PolicyParams p = policy_from_json(j);
  std::string method = checkpoint_method(j);
  if (method.empty()) method = p.graph_sampling == GraphSampling::kAllOnes ? "act" : "causal-act";
  std::optional<double> dr_k;
  if (method == "act-dr") dr_k = cfg.dr_exponent;
  std::vector<ResultRow> rows;
  for (auto seed : cfg.seeds) {
    const GraphMask g = graph_from_source(graph_source, p.dims.feature_dim, seed);
    for (auto c : {Condition::kInDistribution, Condition::kOutOfDistribution}) {
      const EnvConfig env = c == Condition::kInDistribution ? cfg.training_env() : cfg.ood_env();
      rows.push_back(make_row(method, dr_k, c, seed, graph_source, g, cfg.eval_episodes,
                              evaluate_policy(p, env, g, cfg.eval_episodes, seed)));
      const auto& r = rows.back();
      log << method << ' ' << to_string(c) << " seed " << seed << ": touched " << format_double(r.touched)
          << " lifted " << format_double(r.lifted) << " transfer " << format_double(r.transfer) << '\n';
    }
  }
  if (!results_path.empty()) {
    std::ofstream os(results_path, std::ios::binary);
    if (!os) throw DataError("cannot open '" + results_path + "' for writing");
    write_result_csv_header(os);
    for (const auto& r : rows) write_result_csv_row(os, r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Full grid

struct SeedTiming {
  std::uint64_t seed = 0;
  double causal_train_seconds = 0.0;
  double intervene_seconds = 0.0;
};

struct ExperimentOutcome {
  std::vector<ResultRow> rows;
  std::vector<GraphMask> best_graphs;  // per seed, Causal-ACT g*
  std::vector<SeedTiming> timings;
  std::string report;
  double total_seconds = 0.0;

  /// Mean of `field` over seeds for one (method, dr_k, condition) cell.
  double mean(const std::string& method, Condition c, double ResultRow::*field,
              std::optional<double> dr_k = std::nullopt) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : rows) {
      if (r.method != method || r.condition != c) continue;
      if (dr_k.has_value() != r.dr_k.has_value()) continue;
      if (dr_k && *dr_k != *r.dr_k && !(std::isinf(*dr_k) && std::isinf(*r.dr_k))) continue;
      sum += r.*field;
      ++n;
    }
    if (n == 0) throw UsageError("no result rows for method '" + method + "'");
    return sum / static_cast<double>(n);
  }
};

namespace detail {

inline std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace detail

inline std::string build_report(const ExperimentConfig& cfg, const ExperimentOutcome& out) {
  using detail::fixed3;
  using detail::pad;
  std::ostringstream os;
  os << "Stage success rates, mean over seeds {";
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) os << (i ? ", " : "") << cfg.seeds[i];
  os << "} x " << cfg.eval_episodes << " evaluation episodes\n";
  os << "training distractor mode: " << to_string(cfg.env.distractor_mode)
     << "; out-of-distribution: distractors absent; encoder: " << to_string(cfg.train.encoder_mode) << "\n\n";

  auto line = [&](const std::string& label, const std::string& method, Condition c,
                  std::optional<double> k = std::nullopt) {
    os << label << fixed3(out.mean(method, c, &ResultRow::touched, k)) << "    "
       << fixed3(out.mean(method, c, &ResultRow::lifted, k)) << "    "
       << fixed3(out.mean(method, c, &ResultRow::transfer, k)) << '\n';
  };

  os << "Table 1: ACT vs Causal-ACT\n";
  os << pad("method", 14) << pad("condition", 22) << "touched  lifted   transfer\n";
  for (auto c : {Condition::kInDistribution, Condition::kOutOfDistribution}) {
    line(pad("ACT", 14) + pad(to_string(c), 22), "act", c);
    line(pad("Causal-ACT", 14) + pad(to_string(c), 22), "causal-act", c);
  }

  os << "\nTable 2: out-of-distribution success\n";
  os << pad("row", 5) << pad("method", 36) << "touched  lifted   transfer\n";
  int row = 1;
  auto ood = [&](const std::string& label, const std::string& method, std::optional<double> k = std::nullopt) {
    line(pad(std::to_string(row++), 5) + pad(label, 36), method, Condition::kOutOfDistribution, k);
  };
  ood("ACT", "act");
  for (double k : cfg.dr_exponents) ood("ACT + DR (k=" + format_exponent(k) + ")", "act-dr", k);
  ood("Causal-ACT (g*)", "causal-act");
  ood("Causal-ACT, random graph", "causal-act-random-graph");
  ood("Causal-ACT, full-connection graph", "causal-act-full-graph");

  os << "\nRecovered graphs\n";
  for (std::size_t i = 0; i < out.best_graphs.size(); ++i) {
    const auto& g = out.best_graphs[i];
    os << "seed " << cfg.seeds[i] << ": g* = " << g.to_string();
    if (cfg.train.encoder_mode == EncoderMode::kIdentity && g.size() == cfg.env.obs_dim()) {
      std::size_t task = 0, distractor = 0;
      for (std::size_t b = 0; b < g.size(); ++b) (b < kTaskObsDims ? task : distractor) += g[b];
      os << "  (task " << task << "/" << kTaskObsDims << ", distractor " << distractor << "/"
         << g.size() - kTaskObsDims << ")";
    }
    os << '\n';
  }
  return os.str();
}

/// Runs the grid seed by seed. Result rows are appended to
/// <output_dir>/results.csv as they are produced, so a failure leaves the
/// finished cells on disk; report.txt is written at the end.
inline ExperimentOutcome cmd_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  namespace fs = std::filesystem;
  using clock = std::chrono::steady_clock;
  const auto seconds_since = [](clock::time_point t) {
    return std::chrono::duration<double>(clock::now() - t).count();
  };
  const auto start = clock::now();
  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);
  std::ofstream csv(dir / "results.csv", std::ios::binary);
  if (!csv) throw DataError("cannot write results in '" + cfg.output_dir + "'");
  write_result_csv_header(csv);

  ExperimentOutcome out;
  auto emit = [&](ResultRow r) {
    if (!r.ladder_ok()) throw NumericError("result row violates touched >= lifted >= transfer");
    write_result_csv_row(csv, r);
    csv.flush();
    out.rows.push_back(std::move(r));
  };
  auto eval_both = [&](const std::string& method, std::optional<double> k, const PolicyParams& p,
                       const EnvConfig& id_env, const GraphMask& g, const std::string& source, std::uint64_t seed) {
    emit(make_row(method, k, Condition::kInDistribution, seed, source, g, cfg.eval_episodes,
                  evaluate_policy(p, id_env, g, cfg.eval_episodes, seed)));
    emit(make_row(method, k, Condition::kOutOfDistribution, seed, source, g, cfg.eval_episodes,
                  evaluate_policy(p, cfg.ood_env(), g, cfg.eval_episodes, seed)));
  };

  for (auto seed : cfg.seeds) {
    const fs::path seed_dir = dir / ("seed_" + std::to_string(seed));
    fs::create_directories(seed_dir);
    log << "seed " << seed << ": generating " << cfg.demos << " demonstrations\n";
    const Dataset demos = generate_demos(cfg.env, cfg.demos, seed);
    const GraphMask ones = GraphMask::ones(demos.obs_dim);

    // ACT baseline.
    auto t0 = clock::now();
    const TrainResult act = train(demos, train_config_for(cfg, Method::kAct, seed));
    save_policy((seed_dir / "act.json").string(), act, "act");
    eval_both("act", std::nullopt, act.params, cfg.env, ones, "all-ones", seed);
    log << "seed " << seed << ": act done (" << detail::fixed3(seconds_since(t0)) << " s)\n";

    // ACT + domain randomization, equal demo count.
    for (double k : cfg.dr_exponents) {
      t0 = clock::now();
      const EnvConfig env_k = cfg.dr_env(k);
      const Dataset dr_demos = generate_demos(env_k, cfg.demos, seed);
      const TrainResult dr = train(dr_demos, train_config_for(cfg, Method::kActDr, seed));
      eval_both("act-dr", k, dr.params, env_k, ones, "all-ones", seed);
      log << "seed " << seed << ": act-dr k=" << format_exponent(k) << " done ("
          << detail::fixed3(seconds_since(t0)) << " s)\n";
    }

    // Causal-ACT: train on uniform graphs, intervene, evaluate with g*.
    SeedTiming timing{seed, 0.0, 0.0};
    t0 = clock::now();
    const TrainResult causal = train(demos, train_config_for(cfg, Method::kCausalAct, seed));
    timing.causal_train_seconds = seconds_since(t0);
    save_policy((seed_dir / "causal_act.json").string(), causal, "causal-act");
    t0 = clock::now();
    InterventionConfig ic = cfg.intervention;
    ic.seed = seed;
    const InterventionResult iv = targeted_intervention(causal.params, cfg.intervention_env(), ic, &log);
    timing.intervene_seconds = seconds_since(t0);
    write_intervention_outputs(iv, (seed_dir / "intervention_trail.csv").string(),
                               (seed_dir / "energy_model.json").string());
    out.best_graphs.push_back(iv.best);
    out.timings.push_back(timing);
    eval_both("causal-act", std::nullopt, causal.params, cfg.env, iv.best, "g*", seed);
    const GraphMask random = random_graph_for_seed(causal.params.dims.feature_dim, seed);
    eval_both("causal-act-random-graph", std::nullopt, causal.params, cfg.env, random, "random", seed);
    eval_both("causal-act-full-graph", std::nullopt, causal.params, cfg.env,
              GraphMask::ones(causal.params.dims.feature_dim), "all-ones", seed);
    log << "seed " << seed << ": causal-act done, g* = " << iv.best.to_string() << " (train "
        << detail::fixed3(timing.causal_train_seconds) << " s, intervene "
        << detail::fixed3(timing.intervene_seconds) << " s)\n";
  }

  out.report = build_report(cfg, out);
  std::ofstream rep(dir / "report.txt", std::ios::binary);
  if (!rep) throw DataError("cannot write report in '" + cfg.output_dir + "'");
  rep << out.report;
  out.total_seconds = seconds_since(start);
  return out;
}

}  // namespace causal_act

#endif  // CAUSAL_ACT_EXPERIMENT_HPP_
