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

// Randomized verification fixtures over causal-core: the policy-graph
// solvability family and seeded local Markov trials on chain SCMs.

#ifndef CAUSAL_ACT_SCM_CHECK_HPP_
#define CAUSAL_ACT_SCM_CHECK_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "causal_act/causal_core.hpp"
#include "causal_act/common.hpp"
#include "causal_act/graph_mask.hpp"

namespace causal_act {

struct RandomPolicyGraph {
  std::size_t n_obs = 0;
  GraphMask mask;
  std::vector<std::pair<std::size_t, std::size_t>> intra;
  CausalGraph graph;
};

/// 1..max_obs observation nodes, a uniform mask and up to 2 n_obs random
/// intra-observation edges (self edges and cycles among X allowed).
inline RandomPolicyGraph random_policy_graph(Rng& rng, std::size_t max_obs = 8) {
  RandomPolicyGraph r;
  r.n_obs = 1 + static_cast<std::size_t>(rng.below(max_obs));
  r.mask = sample_uniform_graph(r.n_obs, rng);
  const auto n_intra = static_cast<std::size_t>(rng.below(2 * r.n_obs + 1));
  for (std::size_t e = 0; e < n_intra; ++e)
    r.intra.emplace_back(static_cast<std::size_t>(rng.below(r.n_obs)),
                         static_cast<std::size_t>(rng.below(r.n_obs)));
  r.graph = build_policy_graph(r.n_obs, r.mask, r.intra);
  return r;
}

struct FamilyCheckResult {
  std::size_t graphs = 0;
  std::size_t solvable = 0;          // graphs with is_uniquely_solvable_single(., A)
  std::size_t mutated_rejected = 0;  // copies with an extra A->A edge judged unsolvable

  bool ok() const { return solvable == graphs && mutated_rejected == graphs; }
};

inline FamilyCheckResult policy_graph_family_check(std::size_t n_graphs, std::uint64_t seed) {
  Rng rng(seed);
  FamilyCheckResult r;
  for (std::size_t i = 0; i < n_graphs; ++i) {
    auto pg = random_policy_graph(rng);
    ++r.graphs;
    if (is_uniquely_solvable_single(pg.graph, kActionNode)) ++r.solvable;
    CausalGraph mutated = pg.graph;
    mutated.add_edge(kActionNode, kActionNode);
    if (!is_uniquely_solvable_single(mutated, kActionNode)) ++r.mutated_rejected;
  }
  return r;
}

/// Chain X1 -> ... -> X_{length-1} -> A with coefficients of magnitude in
/// [0.5, 2], random sign, unit noise.
inline Scm random_chain_scm(std::size_t length, Rng& rng) {
  if (length < 2) throw UsageError("random_chain_scm: length must be >= 2");
  std::vector<std::string> names;
  for (std::size_t i = 0; i + 1 < length; ++i) names.push_back(obs_node_name(i));
  names.push_back(kActionNode);
  Scm scm;
  for (const auto& n : names) scm.graph.add_node(n);
  for (std::size_t i = 0; i < length; ++i) {
    LinearMechanism m;
    m.intercept = rng.uniform(-1.0, 1.0);
    m.noise_sd = 1.0;
    if (i > 0) {
      scm.graph.add_edge(names[i - 1], names[i]);
      const double mag = rng.uniform(0.5, 2.0);
      m.coefficients[names[i - 1]] = rng.bernoulli(0.5) ? mag : -mag;
    }
    scm.mechanisms[names[i]] = m;
  }
  return scm;
}

/// One trial passes when every local Markov test accepts independence and
/// every direct parent is judged dependent given the node's other parents.
inline bool local_markov_trial(const Scm& scm, std::size_t n_samples, std::uint64_t seed, double alpha) {
  const Eigen::MatrixXd data = sample_scm(scm, n_samples, seed);
  const auto& g = scm.graph;
  for (const auto& node : g.nodes()) {
    for (const auto& r : check_local_markov(data, g, node, alpha))
      if (!r.independent) return false;
    const NodeSet pa = parents(g, node);
    for (const auto& p : pa) {
      std::vector<Eigen::Index> cond;
      for (const auto& q : pa)
        if (q != p) cond.push_back(static_cast<Eigen::Index>(g.index_of(q)));
      const auto r = ci_test(data, static_cast<Eigen::Index>(g.index_of(node)),
                             static_cast<Eigen::Index>(g.index_of(p)), cond, alpha, g.nodes());
      if (r.independent) return false;
    }
  }
  return true;
}

struct MarkovFixtureResult {
  std::size_t trials = 0;
  std::size_t passed = 0;

  double pass_rate() const { return trials ? static_cast<double>(passed) / static_cast<double>(trials) : 0.0; }
  bool ok(double required = 0.95) const { return pass_rate() >= required; }
};

/// Trials alternate between 3- and 4-node chains.
inline MarkovFixtureResult chain_markov_fixture(std::size_t trials, std::size_t n_samples, std::uint64_t seed,
                                                double alpha = kDefaultAlpha) {
  MarkovFixtureResult r;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    const Scm scm = random_chain_scm(3 + t % 2, rng);
    ++r.trials;
    if (local_markov_trial(scm, n_samples, derive_seed(seed ^ 0x5eedull, t), alpha)) ++r.passed;
  }
  return r;
}

}  // namespace causal_act

#endif  // CAUSAL_ACT_SCM_CHECK_HPP_
