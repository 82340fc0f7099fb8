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

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "causal_act/intervention.hpp"

namespace causal_act {
namespace {

GraphMask from_code(std::uint64_t code, std::size_t n) {
  GraphMask g(n);
  for (std::size_t i = 0; i < n; ++i) g.set(i, (code >> i) & 1u);
  return g;
}

EnergyModel model_of(std::vector<double> w, double tau = 1.0) {
  return {Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())), 0.0, tau};
}

// Gauss-Jordan elimination with partial pivoting.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

TEST(GraphProb, Examples) {
  const auto flat = EnergyModel::zeros(2);
  for (std::uint64_t c = 0; c < 4; ++c) EXPECT_DOUBLE_EQ(graph_prob(flat, from_code(c, 2)), 0.25);
  const auto m = model_of({std::log(3.0), 0.0});
  EXPECT_NEAR(graph_prob(m, GraphMask::from_string("10")), 3.0 / 8.0, 1e-15);
  EXPECT_THROW(graph_prob(EnergyModel::zeros(21), GraphMask::zeros(21)), UsageError);
  EXPECT_THROW(graph_prob(m, GraphMask::zeros(3)), UsageError);
}

TEST(GraphProb, SumsToOne) {
  Rng rng(1);
  for (std::size_t n = 1; n <= 10; ++n) {
    std::vector<double> w(n);
    for (auto& v : w) v = rng.uniform(-3.0, 3.0);
    const auto m = model_of(w, rng.uniform(0.5, 2.0));
    double total = 0.0;
    for (std::uint64_t c = 0; c < (1u << n); ++c) total += graph_prob(m, from_code(c, n));
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(SampleGraph, FactorizationMatchesEnumeration) {
  Rng rng(2);
  constexpr std::size_t n = 8;
  std::vector<double> w(n);
  for (auto& v : w) v = rng.uniform(-2.0, 2.0);
  const auto m = model_of(w);
  std::vector<double> hist(1u << n, 0.0);
  constexpr int draws = 1000000;
  for (int i = 0; i < draws; ++i) {
    const auto g = sample_graph(m, rng);
    std::uint64_t code = 0;
    for (std::size_t b = 0; b < n; ++b) code |= static_cast<std::uint64_t>(g[b]) << b;
    hist[code] += 1.0 / draws;
  }
  double tv = 0.0;
  for (std::uint64_t c = 0; c < hist.size(); ++c) tv += std::abs(hist[c] - graph_prob(m, from_code(c, n)));
  EXPECT_LT(0.5 * tv, 0.01);
}

TEST(SampleGraph, FairCoinsAndSaturation) {
  Rng rng(3);
  const auto flat = EnergyModel::zeros(4);
  std::array<int, 4> ones{};
  for (int i = 0; i < 10000; ++i) {
    const auto g = sample_graph(flat, rng);
    for (std::size_t b = 0; b < 4; ++b) ones[b] += g[b];
  }
  for (int c : ones) EXPECT_NEAR(c / 10000.0, 0.5, 0.02);
  const auto sat = model_of({20.0, -20.0});
  for (int i = 0; i < 10000; ++i) {
    const auto g = sample_graph(sat, rng);
    ASSERT_TRUE(g[0]);
    ASSERT_FALSE(g[1]);
  }
}

TEST(FitEnergy, ExactOnNoiselessFullRankSystem) {
  const std::array<double, 3> w{2.0, -1.0, 0.5};
  const double b = 1.0;
  std::vector<InterventionRecord> recs;
  for (std::uint64_t c = 0; c < 8; ++c) {
    const auto g = from_code(c, 3);
    recs.push_back({g, w[0] * g[0] + w[1] * g[1] + w[2] * g[2] + b, 1});
  }
  const auto m = fit_energy(recs, 0.0);
  // Normal equations assembled and solved here without Eigen.
  std::vector<std::vector<double>> a(4, std::vector<double>(4, 0.0));
  std::vector<double> rhs(4, 0.0);
  for (const auto& r : recs) {
    const std::array<double, 4> x{double(r.graph[0]), double(r.graph[1]), double(r.graph[2]), 1.0};
    for (int i = 0; i < 4; ++i) {
      rhs[i] += x[i] * r.reward;
      for (int j = 0; j < 4; ++j) a[i][j] += x[i] * x[j];
    }
  }
  const auto sol = solve_dense(a, rhs);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(m.omega(i), w[static_cast<std::size_t>(i)], 1e-8);
    EXPECT_NEAR(sol[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(i)], 1e-8);
  }
  EXPECT_NEAR(m.bias, b, 1e-8);
  EXPECT_NEAR(sol[3], b, 1e-8);
}

TEST(FitEnergy, ConstantRewards) {
  Rng rng(4);
  std::vector<InterventionRecord> recs;
  for (int i = 0; i < 30; ++i) recs.push_back({sample_uniform_graph(5, rng), 2.5, 1});
  const auto m = fit_energy(recs, 1e-3);
  EXPECT_LT(m.omega.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(m.bias, 2.5, 1e-10);
}

TEST(FitEnergy, RidgeShrinks) {
  Rng rng(5);
  std::vector<InterventionRecord> recs;
  for (int i = 0; i < 40; ++i) {
    const auto g = sample_uniform_graph(6, rng);
    recs.push_back({g, std::clamp(1.0 + g[0] - 0.5 * g[3] + 0.3 * rng.normal(), 0.0, 4.0), 1});
  }
  double prev = fit_energy(recs, 0.0).omega.norm();
  for (double lambda : {0.1, 1.0, 10.0, 100.0}) {
    const double n = fit_energy(recs, lambda).omega.norm();
    EXPECT_LT(n, prev) << lambda;
    prev = n;
  }
}

TEST(FitEnergy, SingularWithoutRidge) {
  std::vector<InterventionRecord> recs = {{GraphMask::from_string("101"), 1.0, 1}};
  try {
    fit_energy(recs, 0.0);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("ridge"), std::string::npos);
  }
  EXPECT_NO_THROW(fit_energy(recs, 1e-3));
  EXPECT_THROW(fit_energy({}, 1e-3), UsageError);
}

TEST(BestGraph, ExamplesAndScaleInvariance) {
  EXPECT_EQ(best_graph(model_of({1.2, -0.5, 0.0})), GraphMask::from_string("100"));
  EXPECT_EQ(best_graph(model_of({-1.0, -2.0, -0.1})), GraphMask::zeros(3));
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(10);
    std::vector<double> w(n);
    for (auto& v : w) v = rng.uniform(-2.0, 2.0);
    const auto m = model_of(w);
    std::uint64_t arg = 0;
    double best = -1.0;
    for (std::uint64_t c = 0; c < (1u << n); ++c) {
      const double p = graph_prob(m, from_code(c, n));
      if (p > best) {
        best = p;
        arg = c;
      }
    }
    EXPECT_EQ(best_graph(m), from_code(arg, n));
    const double s = rng.uniform(0.1, 10.0);
    std::vector<double> scaled(w);
    for (auto& v : scaled) v *= s;
    EXPECT_EQ(best_graph(model_of(scaled, s)), best_graph(m));
  }
}

// Linear oracle 2 + <w, g> with |w| summing below 2 keeps rewards in [0, 4].
std::vector<double> planted_weights(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<double> w(n);
  for (auto& v : w) v = (rng.bernoulli(0.5) ? 1.0 : -1.0) * rng.uniform(0.05, 1.9 / static_cast<double>(n));
  return w;
}

TEST(TargetedIntervention, PlantedRecovery) {
  constexpr std::size_t n = 12;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto w = planted_weights(100 + seed, n);
    const RewardOracle oracle = [&](const GraphMask& g, std::uint64_t) {
      double r = 2.0;
      for (std::size_t i = 0; i < n; ++i) r += g[i] ? w[i] : 0.0;
      return r;
    };
    InterventionConfig cfg;
    cfg.iterations = 200;
    cfg.seed = seed;
    const auto res = targeted_intervention(n, oracle, cfg);
    GraphMask want(n);
    for (std::size_t i = 0; i < n; ++i) want.set(i, w[i] > 0.0);
    EXPECT_EQ(res.best, want) << "seed " << seed;
    EXPECT_EQ(res.records.size(), 200u);
  }
}

TEST(TargetedIntervention, LoopContractAndDeterminism) {
  std::vector<std::uint64_t> seen;
  const RewardOracle oracle = [&](const GraphMask& g, std::uint64_t s) {
    seen.push_back(s);
    return static_cast<double>(g.count() % 5);
  };
  InterventionConfig cfg;
  cfg.iterations = 1;
  cfg.episodes_per_eval = 3;
  cfg.seed = 9;
  const auto one = targeted_intervention(6, oracle, cfg);
  ASSERT_EQ(one.records.size(), 1u);
  EXPECT_EQ(one.records[0].episodes, 3u);
  EXPECT_EQ(seen.size(), 3u);

  cfg.iterations = 20;
  const auto a = targeted_intervention(6, oracle, cfg);
  const auto b = targeted_intervention(6, oracle, cfg);
  std::ostringstream ta, tb;
  write_trail_csv(ta, a.records);
  write_trail_csv(tb, b.records);
  EXPECT_EQ(ta.str(), tb.str());
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(ta.str().substr(0, ta.str().find('\n')), "iteration,graph,mean_reward,episodes");
}

TEST(TargetedIntervention, RewardRangeEnforced) {
  const RewardOracle bad = [](const GraphMask&, std::uint64_t) { return 4.5; };
  EXPECT_THROW(targeted_intervention(3, bad, InterventionConfig{}), NumericError);
}

TEST(TargetedIntervention, RidgeFallbackIsLogged) {
  const RewardOracle oracle = [](const GraphMask& g, std::uint64_t) { return static_cast<double>(g.count() % 5); };
  InterventionConfig cfg;
  cfg.ridge = 0.0;
  cfg.iterations = 4;
  std::ostringstream log;
  const auto r = targeted_intervention(8, oracle, cfg, &log);
  EXPECT_TRUE(r.ridge_fallback);
  EXPECT_EQ(r.ridge_used, kFallbackRidge);
  EXPECT_NE(log.str().find("falling back"), std::string::npos);
}

TEST(TargetedIntervention, PolicyIsNotMutated) {
  const auto ds = generate_demos(EnvConfig{}, 4, 10);
  TrainConfig tc;
  tc.hidden = {16};
  tc.epochs = 5;
  tc.z_dim = 3;
  const auto trained = train(ds, tc);
  const PolicyParams before = trained.params;
  InterventionConfig cfg;
  cfg.iterations = 5;
  cfg.episodes_per_eval = 2;
  const auto r = targeted_intervention(trained.params, EnvConfig{}, cfg);
  EXPECT_EQ(trained.params, before);
  for (const auto& rec : r.records) {
    EXPECT_GE(rec.reward, 0.0);
    EXPECT_LE(rec.reward, 4.0);
  }
}

TEST(EnergyJson, RoundTrip) {
  auto m = model_of({0.5, -0.25, 0.125});
  m.bias = 1.5;
  const auto j = energy_model_to_json(m);
  EXPECT_EQ(j.at("best_graph"), "101");
  const auto back = energy_model_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.omega, m.omega);
  EXPECT_EQ(back.bias, m.bias);
  EXPECT_THROW(energy_model_from_json(nlohmann::json::parse(R"({"bias":1})")), DataError);
}

}  // namespace
}  // namespace causal_act
