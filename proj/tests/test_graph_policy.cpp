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

#include <cmath>
#include <cstring>
#include <filesystem>
#include <vector>

#include <gtest/gtest.h>

#include "causal_act/graph_policy.hpp"

namespace causal_act {
namespace {

TrainConfig small_config(EncoderMode mode = EncoderMode::kIdentity) {
  TrainConfig c;
  c.encoder_mode = mode;
  c.hidden = {16};
  c.feature_dim = 12;
  c.z_dim = 3;
  c.chunk = 5;
  c.epochs = 1;
  c.seed = 7;
  return c;
}

PolicyParams fresh(std::size_t obs_dim, const TrainConfig& c) {
  return PolicyParams::init(obs_dim, kActDim, kJointsDim, c);
}

std::vector<double> random_row(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

bool bit_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

TEST(Encode, IdentityAndMlp) {
  const auto p = fresh(26, small_config());
  Rng rng(1);
  const auto obs = random_row(rng, 26);
  const auto x = encode(p, obs);
  for (std::size_t i = 0; i < 26; ++i) EXPECT_EQ(x(static_cast<Eigen::Index>(i)), obs[i]);
  EXPECT_THROW(encode(p, random_row(rng, 25)), UsageError);

  auto m = fresh(26, small_config(EncoderMode::kMlp));
  EXPECT_EQ(encode(m, obs), encode(m, obs));
  for (std::size_t l = 0; l < m.encoder.num_layers(); ++l) m.encoder.zero_layer(l);
  EXPECT_EQ(encode(m, obs), Eigen::VectorXd::Zero(12));
}

TEST(UniformGraph, MomentsAndReproducibility) {
  Rng rng(2);
  constexpr int n = 10000;
  constexpr std::size_t d = 10;
  Eigen::MatrixXd bits(n, d);
  for (int i = 0; i < n; ++i) {
    const auto g = sample_uniform_graph(d, rng);
    for (std::size_t j = 0; j < d; ++j) bits(i, static_cast<Eigen::Index>(j)) = g[j] ? 1.0 : 0.0;
  }
  const Eigen::RowVectorXd mean = bits.colwise().mean();
  for (Eigen::Index j = 0; j < mean.size(); ++j) {
    EXPECT_GE(mean(j), 0.47);
    EXPECT_LE(mean(j), 0.53);
  }
  const Eigen::MatrixXd c = bits.rowwise() - mean;
  const Eigen::MatrixXd cov = c.transpose() * c / n;
  for (Eigen::Index i = 0; i < cov.rows(); ++i)
    for (Eigen::Index j = i + 1; j < cov.cols(); ++j)
      EXPECT_LT(std::abs(cov(i, j) / std::sqrt(cov(i, i) * cov(j, j))), 0.05);

  Rng a(3), b(3);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sample_uniform_graph(26, a), sample_uniform_graph(26, b));
  EXPECT_THROW(sample_uniform_graph(0, a), UsageError);
}

TEST(StyleEncode, ShapeAndZeroNet) {
  auto p = fresh(26, small_config());
  Rng rng(4);
  const auto chunk = random_row(rng, kActDim * 5);
  const auto j = random_row(rng, kJointsDim);
  const auto h = style_encode(p, chunk, j);
  EXPECT_EQ(h.mu.size(), 3);
  EXPECT_EQ(h.logvar.size(), 3);
  EXPECT_THROW(style_encode(p, random_row(rng, kActDim * 4), j), UsageError);
  for (std::size_t l = 0; l < p.style.num_layers(); ++l) p.style.zero_layer(l);
  const auto z = style_encode(p, chunk, j);
  EXPECT_EQ(z.mu, Eigen::VectorXd::Zero(3));
  EXPECT_EQ(z.logvar, Eigen::VectorXd::Zero(3));
  EXPECT_EQ(kl_diag_gaussian(z).value, 0.0);
}

TEST(Decode, MaskingIndependenceIsBitExact) {
  for (auto mode : {EncoderMode::kIdentity, EncoderMode::kMlp}) {
    const auto p = fresh(26, small_config(mode));
    const auto f = p.dims.feature_dim;
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      const auto g = sample_uniform_graph(f, rng);
      Eigen::VectorXd x(static_cast<Eigen::Index>(f)), y(static_cast<Eigen::Index>(f));
      for (std::size_t i = 0; i < f; ++i) {
        x(static_cast<Eigen::Index>(i)) = rng.uniform(-2.0, 2.0);
        y(static_cast<Eigen::Index>(i)) = g[i] ? x(static_cast<Eigen::Index>(i)) : rng.uniform(-50.0, 50.0);
      }
      const auto j = random_row(rng, kJointsDim);
      Eigen::VectorXd z(3);
      for (auto& v : z) v = rng.normal();
      ASSERT_TRUE(bit_equal(decode(p, x, g, j, z), decode(p, y, g, j, z)));
    }
  }
}

TEST(Decode, AllZerosGraphIgnoresFeatures) {
  const auto p = fresh(26, small_config());
  Rng rng(6);
  const auto j = random_row(rng, kJointsDim);
  const auto ref = act(p, random_row(rng, 26), j, GraphMask::zeros(26));
  for (int i = 0; i < 20; ++i) EXPECT_TRUE(bit_equal(act(p, random_row(rng, 26), j, GraphMask::zeros(26)), ref));
  EXPECT_EQ(ref.rows(), 5);
  EXPECT_EQ(ref.cols(), static_cast<Eigen::Index>(kActDim));
}

TEST(Decode, DimensionErrors) {
  const auto p = fresh(26, small_config());
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(26);
  const std::vector<double> j(kJointsDim, 0.0);
  EXPECT_THROW(decode(p, x, GraphMask::ones(25), j, Eigen::VectorXd::Zero(3)), UsageError);
  EXPECT_THROW(decode(p, x, GraphMask::ones(26), j, Eigen::VectorXd::Zero(2)), UsageError);
  EXPECT_THROW(decode(p, Eigen::VectorXd::Zero(20), GraphMask::ones(26), j, Eigen::VectorXd::Zero(3)), UsageError);
}

TEST(Act, EqualsDecodeWithZeroStyle) {
  const auto p = fresh(26, small_config(EncoderMode::kMlp));
  Rng rng(7);
  const auto obs = random_row(rng, 26);
  const auto j = random_row(rng, kJointsDim);
  const auto g = sample_uniform_graph(12, rng);
  EXPECT_TRUE(bit_equal(act(p, obs, j, g), decode(p, encode(p, obs), g, j, Eigen::VectorXd::Zero(3))));
  EXPECT_TRUE(bit_equal(act(p, obs, j, g), act(p, obs, j, g)));
}

// Central differences of batch_loss against its analytic gradients.
TEST(BatchLoss, GradientsMatchFiniteDifferences) {
  EnvConfig env;
  env.distractor_mode = DistractorMode::kActionCorrelated;
  const auto ds = generate_demos(env, 4, 8);
  for (auto mode : {EncoderMode::kIdentity, EncoderMode::kMlp}) {
    auto cfg = small_config(mode);
    auto p = fresh(ds.obs_dim, cfg);
    Rng rng(9);
    for (std::size_t l = 0; l < p.style.num_layers(); ++l)
      for (auto& b : p.style.bias(l)) b = rng.uniform(-0.3, 0.3);
    std::vector<TrainSample> batch;
    for (std::size_t e = 0; e < 4; ++e) batch.push_back(draw_sample(e, ds.horizon, p.dims, GraphSampling::kUniform, rng));
    const double beta = 0.7;
    ParamVector ge(p.encoder.param_count(), 0.0), gs(p.style.param_count(), 0.0), gd(p.decoder.param_count(), 0.0);
    std::array<ParamVector*, 3> grads{&ge, &gs, &gd};
    batch_loss(p, ds, batch, beta, &grads);
    auto total = [&]() {
      const auto l = batch_loss(p, ds, batch, beta);
      return l.mse + beta * l.kl;
    };
    constexpr double h = 1e-6;
    double worst = 0.0;
    auto check = [&](Mlp& net, const ParamVector& g) {
      auto params = net.params();
      for (std::size_t i = 0; i < params.size(); i += 7) {
        const double saved = params[i];
        params[i] = saved + h;
        const double up = total();
        params[i] = saved - h;
        const double dn = total();
        params[i] = saved;
        const double fd = (up - dn) / (2 * h);
        if (std::abs(fd) + std::abs(g[i]) > 1e-8) worst = std::max(worst, relative_error(g[i], fd, 1e-4));
      }
    };
    check(p.decoder, gd);
    check(p.style, gs);
    if (mode == EncoderMode::kMlp) check(p.encoder, ge);
    EXPECT_LT(worst, 1e-4) << to_string(mode);
  }
}

TEST(BatchLoss, ZeroOutputLossIsActionSecondMoment) {
  const auto ds = generate_demos(EnvConfig{}, 5, 10);
  auto cfg = small_config();
  cfg.zero_init_output = true;
  const auto p = fresh(ds.obs_dim, cfg);
  std::vector<TrainSample> batch;
  double sq = 0.0;
  std::size_t count = 0;
  Rng rng(11);
  for (std::size_t e = 0; e < 5; ++e)
    for (std::size_t t = 0; t + 5 <= ds.horizon; ++t) {
      auto s = draw_sample(e, ds.horizon, p.dims, GraphSampling::kUniform, rng);
      s.t = t;
      batch.push_back(s);
      for (std::size_t i = 0; i < 5; ++i)
        for (double a : ds.episodes[e].actions[t + i]) {
          sq += a * a;
          ++count;
        }
    }
  const auto l = batch_loss(p, ds, batch, 1.0);
  EXPECT_NEAR(l.mse, sq / static_cast<double>(count), 1e-12);
  EXPECT_EQ(l.kl, 0.0);
}

TEST(BatchLoss, AllOnesReducesToBaselinePath) {
  const auto ds = generate_demos(EnvConfig{}, 6, 12);
  auto causal_cfg = small_config();
  auto act_cfg = causal_cfg;
  act_cfg.graph_sampling = GraphSampling::kAllOnes;
  const auto pc = fresh(ds.obs_dim, causal_cfg);
  const auto pa = fresh(ds.obs_dim, act_cfg);
  EXPECT_EQ(pc.decoder, pa.decoder);
  Rng rc(13), ra(13);
  std::vector<TrainSample> bc, ba;
  for (std::size_t e = 0; e < 6; ++e) {
    auto s = draw_sample(e, ds.horizon, pc.dims, GraphSampling::kAllOnes, rc);
    bc.push_back(s);
    ba.push_back(draw_sample(e, ds.horizon, pa.dims, GraphSampling::kAllOnes, ra));
  }
  const auto lc = batch_loss(pc, ds, bc, 1.0);
  const auto la = batch_loss(pa, ds, ba, 1.0);
  EXPECT_EQ(lc.mse, la.mse);
  EXPECT_EQ(lc.kl, la.kl);
}

TEST(Train, ConvergesWithoutKl) {
  const auto ds = generate_demos(EnvConfig{}, 20, 14);
  auto cfg = small_config();
  cfg.hidden = {32, 32};
  cfg.graph_sampling = GraphSampling::kAllOnes;
  cfg.beta = 0.0;
  cfg.epochs = 500;
  const auto r = train(ds, cfg);
  ASSERT_EQ(r.log.size(), 500u);
  EXPECT_LT(r.log.back().mse, 0.1 * r.log.front().mse);
  for (const auto& e : r.log) EXPECT_GE(e.kl, 0.0);
}

TEST(Train, DeterministicAndKlNonNegative) {
  EnvConfig env;
  env.distractor_mode = DistractorMode::kActionCorrelated;
  const auto ds = generate_demos(env, 10, 15);
  auto cfg = small_config(EncoderMode::kMlp);
  cfg.epochs = 30;
  const auto a = train(ds, cfg);
  const auto b = train(ds, cfg);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(policy_to_json(a).dump(), policy_to_json(b).dump());
  for (const auto& e : a.log) {
    EXPECT_GE(e.kl, 0.0);
    EXPECT_DOUBLE_EQ(e.total, e.mse + cfg.beta * e.kl);
  }
}

TEST(Train, Errors) {
  const auto ds = generate_demos(EnvConfig{}, 2, 16);
  auto cfg = small_config();
  cfg.chunk = ds.horizon + 1;
  EXPECT_THROW(train(ds, cfg), UsageError);
  cfg = small_config();
  cfg.epochs = 0;
  EXPECT_THROW(train(ds, cfg), UsageError);
  EXPECT_THROW(train(Dataset{}, small_config()), DataError);
  cfg = small_config();
  cfg.learning_rate = 1e300;
  cfg.epochs = 3;
  EXPECT_THROW(train(ds, cfg), NumericError);
}

TEST(Rollout, QueryCountAndZeroPolicy) {
  auto cfg = small_config();
  cfg.chunk = 7;
  cfg.zero_init_output = true;
  const auto p = fresh(26, cfg);
  const EnvConfig env;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = rollout(p, env, GraphMask::ones(26), seed);
    EXPECT_EQ(r.queries, (env.horizon + 6) / 7);
    EXPECT_EQ(r.reward, 0);
    const auto again = rollout(p, env, GraphMask::ones(26), seed);
    EXPECT_EQ(again.flags, r.flags);
  }
  EnvConfig small = env;
  small.n_distractors = 2;
  EXPECT_THROW(rollout(p, small, GraphMask::ones(26), 0), UsageError);
}

TEST(Checkpoint, SaveLoadRoundTrip) {
  const auto ds = generate_demos(EnvConfig{}, 3, 17);
  auto cfg = small_config(EncoderMode::kMlp);
  cfg.epochs = 3;
  const auto r = train(ds, cfg);
  const auto path = (std::filesystem::temp_directory_path() / "causal_act_policy_test.json").string();
  save_policy(path, r, "causal-act");
  const auto back = load_policy(path);
  EXPECT_EQ(back, r.params);
  EXPECT_EQ(load_json_file(path).at("policy").at("method"), "causal-act");
  std::filesystem::remove(path);
  EXPECT_THROW(load_policy(path), DataError);
}

}  // namespace
}  // namespace causal_act
