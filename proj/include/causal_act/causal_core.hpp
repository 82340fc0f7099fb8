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

// Causal graphs, linear-Gaussian structural causal models and the
// conditional-independence machinery used to check them.

#ifndef CAUSAL_ACT_CAUSAL_CORE_HPP_
#define CAUSAL_ACT_CAUSAL_CORE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "causal_act/common.hpp"
#include "causal_act/dataset.hpp"
#include "causal_act/graph_mask.hpp"

namespace causal_act {

using NodeSet = std::set<std::string>;

/// Named-node directed graph. Self edges and cycles are allowed; sampling
/// code checks acyclicity where it needs it.
class CausalGraph {
 public:
  CausalGraph() = default;

  CausalGraph(std::vector<std::string> nodes,
              const std::vector<std::pair<std::string, std::string>>& edges) {
    for (auto& n : nodes) add_node(std::move(n));
    for (const auto& [from, to] : edges) add_edge(from, to);
  }

  void add_node(std::string name) {
    if (index_.count(name)) throw UsageError("duplicate node '" + name + "'");
    index_.emplace(name, nodes_.size());
    nodes_.push_back(std::move(name));
    out_.emplace_back();
    in_.emplace_back();
  }

  // Returns false when the edge already exists.
  bool add_edge(const std::string& from, const std::string& to) {
    const std::size_t f = index_of(from);
    const std::size_t t = index_of(to);
    if (!edges_.insert({f, t}).second) return false;
    out_[f].push_back(t);
    in_[t].push_back(f);
    return true;
  }

  bool has_node(const std::string& name) const { return index_.count(name) != 0; }

  bool has_edge(const std::string& from, const std::string& to) const {
    return edges_.count({index_of(from), index_of(to)}) != 0;
  }

  std::size_t index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw UsageError("unknown node '" + name + "'");
    return it->second;
  }

  const std::vector<std::string>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  std::vector<std::pair<std::string, std::string>> edges() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(edges_.size());
    for (const auto& [f, t] : edges_) out.emplace_back(nodes_[f], nodes_[t]);
    return out;
  }
  std::size_t edge_count() const { return edges_.size(); }

  const std::vector<std::size_t>& children_of(std::size_t i) const { return out_[i]; }
  const std::vector<std::size_t>& parents_of(std::size_t i) const { return in_[i]; }

 private:
  std::vector<std::string> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::set<std::pair<std::size_t, std::size_t>> edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
};

inline NodeSet parents(const CausalGraph& g, const std::string& node) {
  NodeSet out;
  for (auto p : g.parents_of(g.index_of(node))) out.insert(g.nodes()[p]);
  return out;
}

/// Nodes reachable by a directed path of length >= 1. The node itself is
/// included only when it lies on a cycle.
inline NodeSet descendants(const CausalGraph& g, const std::string& node) {
  const std::size_t start = g.index_of(node);
  std::vector<char> seen(g.size(), 0);
  std::vector<std::size_t> stack(g.children_of(start).begin(), g.children_of(start).end());
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (seen[v]) continue;
    seen[v] = 1;
    for (auto c : g.children_of(v))
      if (!seen[c]) stack.push_back(c);
  }
  NodeSet out;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (seen[i]) out.insert(g.nodes()[i]);
  return out;
}

inline NodeSet non_descendants(const CausalGraph& g, const std::string& node) {
  const NodeSet de = descendants(g, node);
  NodeSet out;
  for (const auto& n : g.nodes())
    if (n != node && !de.count(n)) out.insert(n);
  return out;
}

/// A self cycle is a direct edge V -> V; longer cycles through V do not count.
inline bool has_self_cycle(const CausalGraph& g, const std::string& node) {
  return g.has_edge(node, node);
}

/// Single-variable unique solvability: holds iff the node has no self cycle.
inline bool is_uniquely_solvable_single(const CausalGraph& g, const std::string& node) {
  return !has_self_cycle(g, node);
}

/// Kahn's algorithm; std::nullopt when the graph has a cycle.
inline std::optional<std::vector<std::size_t>> topological_order(const CausalGraph& g) {
  std::vector<std::size_t> indegree(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) indegree[i] = g.parents_of(i).size();
  std::vector<std::size_t> ready;
  for (std::size_t i = g.size(); i-- > 0;)
    if (indegree[i] == 0) ready.push_back(i);
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    const std::size_t v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (auto c : g.children_of(v))
      if (--indegree[c] == 0) ready.push_back(c);
  }
  if (order.size() != g.size()) return std::nullopt;
  return order;
}

inline bool is_acyclic(const CausalGraph& g) { return topological_order(g).has_value(); }

inline std::string obs_node_name(std::size_t i) { return "X" + std::to_string(i + 1); }
inline const std::string kActionNode = "A";
inline const std::string kExogenousNode = "U";

/// Single-timestep imitation-policy graph: observation nodes X1..Xn, the
/// action A and the exogenous U. Xi -> A iff parent_mask[i]; U -> Xi for all
/// i; plus the given (0-based) intra-observation edges, which may form
/// cycles. Nothing points out of A and A never points to itself.
inline CausalGraph build_policy_graph(
    std::size_t n_obs, const GraphMask& parent_mask,
    const std::vector<std::pair<std::size_t, std::size_t>>& intra_obs_edges = {}) {
  if (parent_mask.size() != n_obs)
    throw UsageError("build_policy_graph: mask length " + std::to_string(parent_mask.size()) +
                     " != n_obs " + std::to_string(n_obs));
  CausalGraph g;
  for (std::size_t i = 0; i < n_obs; ++i) g.add_node(obs_node_name(i));
  g.add_node(kActionNode);
  g.add_node(kExogenousNode);
  for (std::size_t i = 0; i < n_obs; ++i) {
    if (parent_mask[i]) g.add_edge(obs_node_name(i), kActionNode);
    g.add_edge(kExogenousNode, obs_node_name(i));
  }
  for (const auto& [from, to] : intra_obs_edges) {
    if (from >= n_obs || to >= n_obs)
      throw UsageError("build_policy_graph: intra-observation edge (" + std::to_string(from) +
                       "," + std::to_string(to) + ") out of range for n_obs " +
                       std::to_string(n_obs));
    g.add_edge(obs_node_name(from), obs_node_name(to));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Structural causal models

struct LinearMechanism {
  double intercept = 0.0;
  std::map<std::string, double> coefficients;  // keyed by parent name
  double noise_sd = 1.0;
};

/// Linear-Gaussian SCM: V = intercept + sum(coeff * parent) + noise_sd * N(0,1)
/// with mutually independent noise terms.
struct Scm {
  CausalGraph graph;
  std::map<std::string, LinearMechanism> mechanisms;

  void validate() const {
    if (mechanisms.size() != graph.size())
      throw UsageError("Scm: every node needs exactly one mechanism");
    for (const auto& n : graph.nodes()) {
      auto it = mechanisms.find(n);
      if (it == mechanisms.end()) throw UsageError("Scm: no mechanism for node '" + n + "'");
      if (!(it->second.noise_sd >= 0.0)) throw UsageError("Scm: negative noise sd for '" + n + "'");
      const NodeSet pa = parents(graph, n);
      for (const auto& [p, c] : it->second.coefficients)
        if (!pa.count(p))
          throw UsageError("Scm: coefficient for non-parent '" + p + "' of '" + n + "'");
    }
  }
};

/// Ancestral sampling; rows are samples, columns follow graph.nodes() order.
inline Eigen::MatrixXd sample_scm(const Scm& scm, std::size_t n_samples, std::uint64_t seed) {
  scm.validate();
  const auto order = topological_order(scm.graph);
  if (!order) throw UsageError("sampling requires acyclic graph");
  const auto& names = scm.graph.nodes();
  Eigen::MatrixXd data(static_cast<Eigen::Index>(n_samples), static_cast<Eigen::Index>(names.size()));

  struct Term {
    Eigen::Index column;
    double coeff;
  };
  std::vector<std::vector<Term>> terms(names.size());
  for (std::size_t v = 0; v < names.size(); ++v)
    for (const auto& [p, c] : scm.mechanisms.at(names[v]).coefficients)
      terms[v].push_back({static_cast<Eigen::Index>(scm.graph.index_of(p)), c});

  Rng rng(seed);
  for (Eigen::Index s = 0; s < data.rows(); ++s) {
    for (auto v : *order) {
      const auto& mech = scm.mechanisms.at(names[v]);
      double value = mech.intercept;
      for (const auto& t : terms[v]) value += t.coeff * data(s, t.column);
      // Noise is drawn even when sd is 0 so streams stay aligned.
      value += mech.noise_sd * rng.normal();
      data(s, static_cast<Eigen::Index>(v)) = value;
    }
  }
  return data;
}

// ---------------------------------------------------------------------------
// Conditional independence

struct CiReport {
  std::string node_a;
  std::string node_b;
  std::vector<std::string> cond_set;
  double statistic = 0.0;  // partial correlation
  double p_value = 1.0;
  std::size_t n = 0;
  double alpha = 0.01;
  bool independent = true;

  std::string verdict() const { return independent ? "independent" : "dependent"; }
};

inline constexpr double kDefaultAlpha = 0.01;

inline void write_ci_csv_header(std::ostream& os) {
  os << "node_a,node_b,cond_set,stat,n,alpha,verdict\n";
}

inline void write_ci_csv_row(std::ostream& os, const CiReport& r) {
  std::string cond;
  for (std::size_t i = 0; i < r.cond_set.size(); ++i) cond += (i ? ";" : "") + r.cond_set[i];
  os << r.node_a << ',' << r.node_b << ',' << cond << ',' << format_double(r.statistic) << ','
     << r.n << ',' << format_double(r.alpha) << ',' << r.verdict() << '\n';
}

namespace detail {

// Residual of column `target` after least-squares regression on [1, cond].
inline Eigen::VectorXd residualize(const Eigen::MatrixXd& data, Eigen::Index target,
                                   const std::vector<Eigen::Index>& cond) {
  const Eigen::Index n = data.rows();
  Eigen::MatrixXd design(n, static_cast<Eigen::Index>(cond.size()) + 1);
  design.col(0).setOnes();
  for (std::size_t i = 0; i < cond.size(); ++i)
    design.col(static_cast<Eigen::Index>(i) + 1) = data.col(cond[i]);
  const Eigen::VectorXd y = data.col(target);
  const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(y);
  return y - design * beta;
}

}  // namespace detail

/// Fisher-z test of column a _||_ column b | cond on continuous data. If either
/// residual is (numerically) constant, the variable is a deterministic function
/// of the conditioning set and the pair is reported independent with
/// statistic 0.
inline CiReport ci_test(const Eigen::MatrixXd& data, Eigen::Index a, Eigen::Index b,
                        const std::vector<Eigen::Index>& cond, double alpha,
                        const std::vector<std::string>& names = {}) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("ci_test: alpha must lie in (0,1)");
  const auto n = static_cast<std::size_t>(data.rows());
  if (n < 3) throw DataError("ci_test: need at least 3 samples");
  const double dof = static_cast<double>(n) - static_cast<double>(cond.size()) - 3.0;
  if (dof < 1.0)
    throw DataError("ci_test: conditioning set of size " + std::to_string(cond.size()) +
                    " too large for " + std::to_string(n) + " samples");
  auto name = [&](Eigen::Index i) {
    return names.empty() ? obs_node_name(static_cast<std::size_t>(i))
                         : names.at(static_cast<std::size_t>(i));
  };
  CiReport r;
  r.node_a = name(a);
  r.node_b = name(b);
  for (auto c : cond) r.cond_set.push_back(name(c));
  r.n = n;
  r.alpha = alpha;

  const Eigen::VectorXd ra = detail::residualize(data, a, cond);
  const Eigen::VectorXd rb = detail::residualize(data, b, cond);
  const auto scale = [&](Eigen::Index col) {
    const Eigen::VectorXd c = data.col(col).array() - data.col(col).mean();
    return std::max(c.squaredNorm(), 1.0);
  };
  const double va = ra.squaredNorm();
  const double vb = rb.squaredNorm();
  constexpr double kDegenerate = 1e-20;
  if (va <= kDegenerate * scale(a) || vb <= kDegenerate * scale(b)) {
    r.statistic = 0.0;
    r.p_value = 1.0;
    r.independent = true;
    return r;
  }
  double rho = ra.dot(rb) / std::sqrt(va * vb);
  rho = std::clamp(rho, -1.0, 1.0);
  r.statistic = rho;
  const double clipped = std::clamp(rho, -1.0 + 1e-15, 1.0 - 1e-15);
  const double z = std::atanh(clipped) * std::sqrt(dof);
  r.p_value = std::erfc(std::abs(z) / std::numbers::sqrt2);
  r.independent = r.p_value > alpha;
  return r;
}

/// Tests node _||_ w | parents(node) for every non-descendant w that is not
/// itself a parent. Data columns follow graph.nodes() order.
inline std::vector<CiReport> check_local_markov(const Eigen::MatrixXd& data,
                                                const CausalGraph& graph,
                                                const std::string& node,
                                                double alpha = kDefaultAlpha) {
  if (static_cast<std::size_t>(data.cols()) != graph.size())
    throw UsageError("check_local_markov: data has " + std::to_string(data.cols()) +
                     " columns, graph has " + std::to_string(graph.size()) + " nodes");
  const auto v = static_cast<Eigen::Index>(graph.index_of(node));
  const NodeSet pa = parents(graph, node);
  std::vector<Eigen::Index> cond;
  for (const auto& p : pa) cond.push_back(static_cast<Eigen::Index>(graph.index_of(p)));
  std::vector<CiReport> out;
  for (const auto& w : non_descendants(graph, node)) {
    if (pa.count(w)) continue;
    out.push_back(ci_test(data, v, static_cast<Eigen::Index>(graph.index_of(w)), cond, alpha,
                          graph.nodes()));
  }
  return out;
}

struct DisentanglementReport {
  std::vector<CiReport> reports;
  double dependent_fraction = 0.0;
};

/// Pairwise X_i _||_ X_j | A_prev over observation columns. `observations` and
/// `prev_actions` are row-aligned samples.
inline DisentanglementReport check_disentanglement(const Eigen::MatrixXd& observations,
                                                   const Eigen::MatrixXd& prev_actions,
                                                   double alpha = kDefaultAlpha) {
  if (observations.rows() != prev_actions.rows())
    throw UsageError("check_disentanglement: row count mismatch");
  if (observations.rows() < 3) throw DataError("check_disentanglement: fewer than 3 samples");
  const Eigen::Index d = observations.cols();
  const Eigen::Index m = prev_actions.cols();
  Eigen::MatrixXd joint(observations.rows(), d + m);
  joint << observations, prev_actions;
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < d; ++i) names.push_back(obs_node_name(static_cast<std::size_t>(i)));
  for (Eigen::Index i = 0; i < m; ++i) names.push_back("Aprev" + std::to_string(i + 1));
  std::vector<Eigen::Index> cond;
  for (Eigen::Index i = 0; i < m; ++i) cond.push_back(d + i);

  DisentanglementReport out;
  std::size_t dependent = 0;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) {
      out.reports.push_back(ci_test(joint, i, j, cond, alpha, names));
      if (!out.reports.back().independent) ++dependent;
    }
  out.dependent_fraction =
      out.reports.empty() ? 0.0 : static_cast<double>(dependent) / static_cast<double>(out.reports.size());
  return out;
}

/// Dataset form: samples are (obs_t, action_{t-1}) for t >= 1 of every episode.
inline DisentanglementReport check_disentanglement(const Dataset& ds, double alpha = kDefaultAlpha) {
  if (ds.horizon < 2) throw DataError("check_disentanglement: need >= 2 timesteps per episode");
  const auto rows = static_cast<Eigen::Index>(ds.episodes.size() * (ds.horizon - 1));
  if (rows < 3) throw DataError("check_disentanglement: fewer than 3 samples");
  Eigen::MatrixXd obs(rows, static_cast<Eigen::Index>(ds.obs_dim));
  Eigen::MatrixXd prev(rows, static_cast<Eigen::Index>(ds.act_dim));
  Eigen::Index r = 0;
  for (const auto& ep : ds.episodes)
    for (std::size_t t = 1; t < ds.horizon; ++t, ++r) {
      for (std::size_t i = 0; i < ds.obs_dim; ++i) obs(r, static_cast<Eigen::Index>(i)) = ep.obs[t][i];
      for (std::size_t i = 0; i < ds.act_dim; ++i)
        prev(r, static_cast<Eigen::Index>(i)) = ep.actions[t - 1][i];
    }
  return check_disentanglement(obs, prev, alpha);
}

// ---------------------------------------------------------------------------
// Serialization: {"nodes": [...], "edges": [[from, to], ...]}

inline nlohmann::json graph_to_json(const CausalGraph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [f, t] : g.edges()) edges.push_back({f, t});
  return {{"nodes", g.nodes()}, {"edges", edges}};
}

inline CausalGraph graph_from_json(const nlohmann::json& j) {
  try {
    CausalGraph g;
    for (const auto& n : j.at("nodes")) g.add_node(n.get<std::string>());
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw DataError("graph edge must be [from, to]");
      if (!g.add_edge(e[0].get<std::string>(), e[1].get<std::string>()))
        throw DataError("duplicate edge in graph JSON");
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("graph JSON: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("graph JSON: ") + e.what());
  }
}

}  // namespace causal_act

#endif  // CAUSAL_ACT_CAUSAL_CORE_HPP_
