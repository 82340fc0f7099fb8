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

// Targeted intervention over graph masks with a linear energy model
// p(g) ~ exp(<w, g> / tau), refit by ridge regression on episodic rewards.

#ifndef CAUSAL_ACT_INTERVENTION_HPP_
#define CAUSAL_ACT_INTERVENTION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "causal_act/common.hpp"
#include "causal_act/graph_mask.hpp"
#include "causal_act/graph_policy.hpp"
#include "causal_act/transfer_env.hpp"

namespace causal_act {

struct EnergyModel {
  Eigen::VectorXd omega;
  double bias = 0.0;
  double tau = 1.0;

  static EnergyModel zeros(std::size_t n, double tau = 1.0) {
    return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)), 0.0, tau};
  }

  std::size_t size() const { return static_cast<std::size_t>(omega.size()); }

  void validate() const {
    if (!(tau > 0.0)) throw UsageError("EnergyModel: temperature must be > 0");
    if (!omega.allFinite() || !std::isfinite(bias)) throw NumericError("EnergyModel: non-finite weights");
  }
};

struct InterventionRecord {
  GraphMask graph;
  double reward = 0.0;  // mean episodic reward
  std::size_t episodes = 1;
};

struct InterventionConfig {
  std::size_t iterations = 50;
  std::size_t episodes_per_eval = 1;
  double ridge = 1e-3;
  double tau = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (iterations < 1) throw UsageError("InterventionConfig: iterations must be >= 1");
    if (episodes_per_eval < 1) throw UsageError("InterventionConfig: episodes per evaluation must be >= 1");
    if (!(ridge >= 0.0)) throw UsageError("InterventionConfig: ridge strength must be >= 0");
    if (!(tau > 0.0)) throw UsageError("InterventionConfig: tau must be > 0");
  }
};

inline constexpr std::size_t kMaxEnumerationDim = 20;
inline constexpr double kFallbackRidge = 1e-3;

/// <w, g> / tau.
inline double log_unnormalized(const EnergyModel& m, const GraphMask& g) {
  if (g.size() != m.size())
    throw UsageError("graph length " + std::to_string(g.size()) + " != model size " + std::to_string(m.size()));
  double e = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i]) e += m.omega(static_cast<Eigen::Index>(i));
  return e / m.tau;
}

/// Exact probability, normalized by enumerating all 2^n graphs.
inline double graph_prob(const EnergyModel& m, const GraphMask& g) {
  m.validate();
  const std::size_t n = m.size();
  if (n > kMaxEnumerationDim)
    throw UsageError("graph_prob: " + std::to_string(n) + " dimensions is too many to enumerate (max " +
                     std::to_string(kMaxEnumerationDim) +
                     "); use log_unnormalized or the factorized sample_graph instead");
  const double target = log_unnormalized(m, g);
  const std::uint64_t total = std::uint64_t{1} << n;
  std::vector<double> logs(total);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::uint64_t code = 0; code < total; ++code) {
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if ((code >> i) & 1u) e += m.omega(static_cast<Eigen::Index>(i));
    logs[code] = e / m.tau;
    mx = std::max(mx, logs[code]);
  }
  double z = 0.0;
  for (double l : logs) z += std::exp(l - mx);
  return std::exp(target - mx) / z;
}

/// The linear energy factorizes: bits are independent with
/// P(g_i = 1) = logistic(w_i / tau).
inline GraphMask sample_graph(const EnergyModel& m, Rng& rng) {
  m.validate();
  GraphMask g(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double a = m.omega(static_cast<Eigen::Index>(i)) / m.tau;
    const double p = a >= 0.0 ? 1.0 / (1.0 + std::exp(-a)) : std::exp(a) / (1.0 + std::exp(a));
    g.set(i, rng.uniform() < p);
  }
  return g;
}

/// argmax_g p(g), elementwise: bit i set iff w_i > 0 (ties excluded).
inline GraphMask best_graph(const EnergyModel& m) {
  if (!m.omega.allFinite()) throw NumericError("best_graph: non-finite weights");
  GraphMask g(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) g.set(i, m.omega(static_cast<Eigen::Index>(i)) > 0.0);
  return g;
}

/// Ridge least squares R ~ <w, g> + b, penalizing ||w||^2 only, via the
/// normal equations.
inline EnergyModel fit_energy(const std::vector<InterventionRecord>& records, double ridge, double tau = 1.0) {
  if (records.empty()) throw UsageError("fit_energy: need at least one record");
  if (!(ridge >= 0.0)) throw UsageError("fit_energy: ridge strength must be >= 0");
  const std::size_t n = records.front().graph.size();
  const auto dim = static_cast<Eigen::Index>(n + 1);
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd row(dim);
  for (const auto& r : records) {
    if (r.graph.size() != n) throw UsageError("fit_energy: records have different graph lengths");
    for (std::size_t i = 0; i < n; ++i) row(static_cast<Eigen::Index>(i)) = r.graph[i] ? 1.0 : 0.0;
    row(dim - 1) = 1.0;
    normal.noalias() += row * row.transpose();
    rhs.noalias() += r.reward * row;
  }
  for (Eigen::Index i = 0; i + 1 < dim; ++i) normal(i, i) += ridge;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible())
    throw NumericError("fit_energy: normal equations are singular (rank " + std::to_string(lu.rank()) +
                       " of " + std::to_string(dim) + "); use a ridge strength > 0");
  const Eigen::VectorXd sol = lu.solve(rhs);
  EnergyModel m{sol.head(dim - 1), sol(dim - 1), tau};
  m.validate();
  return m;
}

struct InterventionResult {
  GraphMask best;
  EnergyModel model;
  std::vector<InterventionRecord> records;
  double ridge_used = 0.0;
  bool ridge_fallback = false;
};

/// Reward of executing the frozen policy with graph g for one episode.
using RewardOracle = std::function<double(const GraphMask& g, std::uint64_t episode_seed)>;

/// Starts from w = 0; each iteration samples g ~ p(g), averages E episodic
/// rewards, appends the record and refits on the full history. Episode e of
/// iteration i uses derive_seed(derive_seed(seed, 202), i * E + e).
inline InterventionResult targeted_intervention(std::size_t feature_dim, const RewardOracle& reward,
                                                const InterventionConfig& cfg,
                                                std::ostream* log = nullptr) {
  cfg.validate();
  InterventionResult r;
  r.model = EnergyModel::zeros(feature_dim, cfg.tau);
  r.ridge_used = cfg.ridge;
  Rng rng(derive_seed(cfg.seed, 201));
  const std::uint64_t episode_root = derive_seed(cfg.seed, 202);
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    InterventionRecord rec;
    rec.graph = sample_graph(r.model, rng);
    rec.episodes = cfg.episodes_per_eval;
    double sum = 0.0;
    for (std::size_t e = 0; e < cfg.episodes_per_eval; ++e) {
      const double v = reward(rec.graph, derive_seed(episode_root, it * cfg.episodes_per_eval + e));
      if (!(v >= 0.0 && v <= 4.0))
        throw NumericError("targeted_intervention: reward " + format_double(v) + " outside [0, 4]");
      sum += v;
    }
    rec.reward = sum / static_cast<double>(cfg.episodes_per_eval);
    r.records.push_back(rec);
    try {
      r.model = fit_energy(r.records, r.ridge_used, cfg.tau);
    } catch (const NumericError&) {
      if (r.ridge_used > 0.0) throw;
      r.ridge_used = kFallbackRidge;
      r.ridge_fallback = true;
      if (log)
        *log << "intervention: singular least squares at iteration " << it + 1
             << ", falling back to ridge " << kFallbackRidge << '\n';
      r.model = fit_energy(r.records, r.ridge_used, cfg.tau);
    }
  }
  r.best = best_graph(r.model);
  return r;
}

/// Policy form: rewards come from z = 0 rollouts of the frozen policy.
inline InterventionResult targeted_intervention(const PolicyParams& params, const EnvConfig& env_config,
                                                const InterventionConfig& cfg, std::ostream* log = nullptr) {
  const RewardOracle oracle = [&](const GraphMask& g, std::uint64_t seed) {
    return static_cast<double>(rollout(params, env_config, g, seed).reward);
  };
  return targeted_intervention(params.dims.feature_dim, oracle, cfg, log);
}

// ---------------------------------------------------------------------------
// Outputs

inline void write_trail_csv(std::ostream& os, const std::vector<InterventionRecord>& records) {
  os << "iteration,graph,mean_reward,episodes\n";
  for (std::size_t i = 0; i < records.size(); ++i)
    os << i + 1 << ',' << records[i].graph.to_string() << ',' << format_double(records[i].reward) << ','
       << records[i].episodes << '\n';
}

inline nlohmann::json energy_model_to_json(const EnergyModel& m) {
  std::vector<double> w(m.omega.data(), m.omega.data() + m.omega.size());
  return {{"omega", w}, {"bias", m.bias}, {"tau", m.tau}, {"best_graph", best_graph(m).to_string()}};
}

inline EnergyModel energy_model_from_json(const nlohmann::json& j) {
  try {
    const auto w = j.at("omega").get<std::vector<double>>();
    EnergyModel m{Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())),
                  j.at("bias").get<double>(), j.value("tau", 1.0)};
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("energy model JSON: ") + e.what());
  }
}

}  // namespace causal_act

#endif  // CAUSAL_ACT_INTERVENTION_HPP_
