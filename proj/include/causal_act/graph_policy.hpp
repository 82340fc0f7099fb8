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

// Graph-conditioned CVAE policy with action chunking.
//
//   feature encoder   x = h(o)               (identity or MLP)
//   style encoder     q(z | a_{t:t+k}, j_t)  -> (mu, logvar)
//   decoder           a_{t:t+k} = pi(x * g, g, j_t, z)
//
// Training minimizes MSE(a_hat, a) + beta * KL(q || N(0, I)) with a fresh
// graph g per sample (uniform bits, or all ones for the behavior-cloning
// baseline). Inference uses z = 0 and a fixed graph.

#ifndef CAUSAL_ACT_GRAPH_POLICY_HPP_
#define CAUSAL_ACT_GRAPH_POLICY_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "causal_act/common.hpp"
#include "causal_act/dataset.hpp"
#include "causal_act/graph_mask.hpp"
#include "causal_act/tensor_net.hpp"
#include "causal_act/transfer_env.hpp"

namespace causal_act {

enum class EncoderMode { kIdentity, kMlp };
enum class GraphSampling { kUniform, kAllOnes };

inline std::string to_string(EncoderMode m) { return m == EncoderMode::kIdentity ? "identity" : "mlp"; }
inline EncoderMode encoder_mode_from_string(const std::string& s) {
  if (s == "identity") return EncoderMode::kIdentity;
  if (s == "mlp") return EncoderMode::kMlp;
  throw UsageError("unknown encoder mode '" + s + "' (expected identity, mlp)");
}

inline std::string to_string(GraphSampling g) { return g == GraphSampling::kUniform ? "uniform" : "all-ones"; }
inline GraphSampling graph_sampling_from_string(const std::string& s) {
  if (s == "uniform") return GraphSampling::kUniform;
  if (s == "all-ones") return GraphSampling::kAllOnes;
  throw UsageError("unknown graph sampling '" + s + "' (expected uniform, all-ones)");
}

struct TrainConfig {
  std::size_t epochs = 1000;
  std::size_t batch_size = 8;
  std::size_t chunk = 10;  // k
  double beta = 1.0;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  EncoderMode encoder_mode = EncoderMode::kIdentity;
  GraphSampling graph_sampling = GraphSampling::kUniform;
  std::size_t feature_dim = 32;  // mlp mode only
  std::size_t z_dim = 8;
  std::vector<std::size_t> hidden{64, 64};
  bool zero_init_output = false;

  void validate() const {
    if (epochs < 1) throw UsageError("TrainConfig: epochs must be >= 1");
    if (chunk < 1) throw UsageError("TrainConfig: chunk size must be >= 1");
    if (batch_size < 1) throw UsageError("TrainConfig: batch size must be >= 1");
    if (!(beta >= 0.0)) throw UsageError("TrainConfig: beta must be >= 0");
    if (!(learning_rate > 0.0)) throw UsageError("TrainConfig: learning rate must be > 0");
    if (z_dim < 1) throw UsageError("TrainConfig: z_dim must be >= 1");
    if (encoder_mode == EncoderMode::kMlp && feature_dim < 1)
      throw UsageError("TrainConfig: feature_dim must be >= 1");
  }
};

struct PolicyDims {
  std::size_t obs_dim = 0;
  std::size_t act_dim = kActDim;
  std::size_t joints_dim = kJointsDim;
  std::size_t feature_dim = 0;
  std::size_t z_dim = 8;
  std::size_t chunk = 10;

  std::size_t decoder_input() const { return 2 * feature_dim + joints_dim + z_dim; }
  std::size_t style_input() const { return act_dim * chunk + joints_dim; }
  friend bool operator==(const PolicyDims&, const PolicyDims&) = default;
};

struct PolicyParams {
  EncoderMode encoder_mode = EncoderMode::kIdentity;
  GraphSampling graph_sampling = GraphSampling::kUniform;
  PolicyDims dims;
  Mlp encoder;  // unused in identity mode
  Mlp style;
  Mlp decoder;

  /// Fresh Glorot-initialized networks; identity mode forces
  /// feature_dim = obs_dim.
  static PolicyParams init(std::size_t obs_dim, std::size_t act_dim, std::size_t joints_dim,
                           const TrainConfig& cfg) {
    cfg.validate();
    PolicyParams p;
    p.encoder_mode = cfg.encoder_mode;
    p.graph_sampling = cfg.graph_sampling;
    p.dims = {obs_dim, act_dim, joints_dim,
              cfg.encoder_mode == EncoderMode::kIdentity ? obs_dim : cfg.feature_dim, cfg.z_dim,
              cfg.chunk};
    auto sizes = [&](std::size_t in, std::size_t out) {
      std::vector<std::size_t> s{in};
      s.insert(s.end(), cfg.hidden.begin(), cfg.hidden.end());
      s.push_back(out);
      return s;
    };
    if (p.encoder_mode == EncoderMode::kMlp)
      p.encoder = Mlp::xavier(sizes(obs_dim, p.dims.feature_dim), derive_seed(cfg.seed, 101));
    p.style = Mlp::xavier(sizes(p.dims.style_input(), 2 * p.dims.z_dim), derive_seed(cfg.seed, 102));
    p.decoder = Mlp::xavier(sizes(p.dims.decoder_input(), act_dim * cfg.chunk), derive_seed(cfg.seed, 103));
    if (cfg.zero_init_output) {
      p.style.zero_layer(p.style.num_layers() - 1);
      p.decoder.zero_layer(p.decoder.num_layers() - 1);
    }
    return p;
  }

  void validate() const {
    const auto& d = dims;
    bool ok = style.input_size() == d.style_input() && style.output_size() == 2 * d.z_dim &&
              decoder.input_size() == d.decoder_input() &&
              decoder.output_size() == d.act_dim * d.chunk;
    if (encoder_mode == EncoderMode::kIdentity)
      ok = ok && d.feature_dim == d.obs_dim;
    else
      ok = ok && encoder.input_size() == d.obs_dim && encoder.output_size() == d.feature_dim;
    if (!ok) throw DataError("policy parameters have inconsistent dimensions");
  }

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

namespace detail {

inline Eigen::VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline void check_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw UsageError(std::string(what) + ": expected " + std::to_string(want) + " values, got " +
                     std::to_string(got));
}

inline Eigen::VectorXd mask_vector(const GraphMask& g) {
  Eigen::VectorXd m(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) m(static_cast<Eigen::Index>(i)) = g[i] ? 1.0 : 0.0;
  return m;
}

}  // namespace detail

inline Eigen::VectorXd encode(const PolicyParams& p, std::span<const double> obs) {
  detail::check_size(obs.size(), p.dims.obs_dim, "encode: observation");
  const Eigen::VectorXd o = detail::to_eigen(obs);
  return p.encoder_mode == EncoderMode::kIdentity ? o : predict(p.encoder, o);
}

/// q(z | a_{t:t+k}, j_t). `action_chunk` holds k actions, flattened row-major.
inline GaussianHead style_encode(const PolicyParams& p, std::span<const double> action_chunk,
                                 std::span<const double> joints) {
  detail::check_size(action_chunk.size(), p.dims.act_dim * p.dims.chunk, "style_encode: action chunk");
  detail::check_size(joints.size(), p.dims.joints_dim, "style_encode: joints");
  Eigen::VectorXd in(static_cast<Eigen::Index>(p.dims.style_input()));
  in << detail::to_eigen(action_chunk), detail::to_eigen(joints);
  const Eigen::VectorXd out = predict(p.style, in);
  const auto z = static_cast<Eigen::Index>(p.dims.z_dim);
  return {out.head(z), out.tail(z)};
}

/// Decoder input [x * g, g, j, z].
inline Eigen::VectorXd decoder_input(const PolicyDims& d, const Eigen::VectorXd& x, const GraphMask& g,
                                     std::span<const double> joints, const Eigen::VectorXd& z) {
  detail::check_size(static_cast<std::size_t>(x.size()), d.feature_dim, "decode: features");
  detail::check_size(g.size(), d.feature_dim, "decode: graph");
  detail::check_size(joints.size(), d.joints_dim, "decode: joints");
  detail::check_size(static_cast<std::size_t>(z.size()), d.z_dim, "decode: z");
  const Eigen::VectorXd m = detail::mask_vector(g);
  Eigen::VectorXd in(static_cast<Eigen::Index>(d.decoder_input()));
  in << x.cwiseProduct(m), m, detail::to_eigen(joints), z;
  return in;
}

/// Action chunk as a (k x act_dim) matrix.
inline Eigen::MatrixXd decode(const PolicyParams& p, const Eigen::VectorXd& x, const GraphMask& g,
                              std::span<const double> joints, const Eigen::VectorXd& z) {
  const Eigen::VectorXd out = predict(p.decoder, decoder_input(p.dims, x, g, joints, z));
  return Eigen::Map<const RowMajorMatrix>(out.data(), static_cast<Eigen::Index>(p.dims.chunk),
                                          static_cast<Eigen::Index>(p.dims.act_dim));
}

/// Inference: decode(encode(obs), g, joints, z = 0).
inline Eigen::MatrixXd act(const PolicyParams& p, std::span<const double> obs,
                           std::span<const double> joints, const GraphMask& g) {
  return decode(p, encode(p, obs), g, joints,
                Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.dims.z_dim)));
}

// ---------------------------------------------------------------------------
// Training

struct EpochLog {
  std::size_t epoch = 0;
  double mse = 0.0;
  double kl = 0.0;
  double total = 0.0;
};

struct TrainResult {
  PolicyParams params;
  std::vector<EpochLog> log;
  AdamState encoder_adam;
  AdamState style_adam;
  AdamState decoder_adam;
};

struct BatchLoss {
  double mse = 0.0;  // mean over samples
  double kl = 0.0;   // mean over samples
};

/// One training sample: timestep t of episode `episode`, with its graph and
/// style noise.
struct TrainSample {
  std::size_t episode = 0;
  std::size_t t = 0;
  GraphMask graph;
  Eigen::VectorXd noise;
};

namespace detail {

struct BatchTensors {
  Eigen::MatrixXd obs, joints, target, style_in, mask, noise;
};

inline BatchTensors gather(const Dataset& ds, const PolicyDims& d, const std::vector<TrainSample>& batch) {
  const auto n = static_cast<Eigen::Index>(batch.size());
  BatchTensors b;
  b.obs.resize(static_cast<Eigen::Index>(d.obs_dim), n);
  b.joints.resize(static_cast<Eigen::Index>(d.joints_dim), n);
  b.target.resize(static_cast<Eigen::Index>(d.act_dim * d.chunk), n);
  b.mask.resize(static_cast<Eigen::Index>(d.feature_dim), n);
  b.noise.resize(static_cast<Eigen::Index>(d.z_dim), n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto& s = batch[static_cast<std::size_t>(c)];
    const auto& ep = ds.episodes[s.episode];
    b.obs.col(c) = to_eigen(ep.obs[s.t]);
    b.joints.col(c) = to_eigen(ep.joints[s.t]);
    for (std::size_t i = 0; i < d.chunk; ++i)
      b.target.block(static_cast<Eigen::Index>(i * d.act_dim), c, static_cast<Eigen::Index>(d.act_dim), 1) =
          to_eigen(ep.actions[s.t + i]);
    b.mask.col(c) = mask_vector(s.graph);
    b.noise.col(c) = s.noise;
  }
  b.style_in.resize(b.target.rows() + b.joints.rows(), n);
  b.style_in << b.target, b.joints;
  return b;
}

}  // namespace detail

/// Loss of one batch and, when `grads` is given, the gradients of
/// mean_batch(MSE + beta * KL) w.r.t. encoder, style and decoder parameters
/// (accumulated into the three flat buffers).
inline BatchLoss batch_loss(const PolicyParams& p, const Dataset& ds, const std::vector<TrainSample>& batch,
                            double beta, std::array<ParamVector*, 3>* grads = nullptr) {
  const auto& d = p.dims;
  const auto b = detail::gather(ds, d, batch);
  const double n = static_cast<double>(batch.size());
  const auto z = static_cast<Eigen::Index>(d.z_dim);
  const auto f = static_cast<Eigen::Index>(d.feature_dim);

  ForwardCache style_cache, enc_cache, dec_cache;
  const Eigen::MatrixXd head = forward_batch(p.style, b.style_in, &style_cache);
  const Eigen::MatrixXd mu = head.topRows(z);
  const Eigen::MatrixXd logvar = head.bottomRows(z);
  const Eigen::ArrayXXd sd = (0.5 * logvar.array()).exp();
  const Eigen::MatrixXd latent = mu.array() + sd * b.noise.array();
  const Eigen::MatrixXd x = p.encoder_mode == EncoderMode::kIdentity
                                ? b.obs
                                : forward_batch(p.encoder, b.obs, &enc_cache);

  Eigen::MatrixXd dec_in(static_cast<Eigen::Index>(d.decoder_input()), b.obs.cols());
  dec_in << x.cwiseProduct(b.mask), b.mask, b.joints, latent;
  const Eigen::MatrixXd pred = forward_batch(p.decoder, dec_in, &dec_cache);
  const Eigen::MatrixXd diff = pred - b.target;
  const double per = static_cast<double>(diff.rows());

  BatchLoss loss;
  loss.mse = diff.squaredNorm() / (per * n);
  loss.kl = 0.5 * (mu.array().square() + logvar.array().exp() - 1.0 - logvar.array()).sum() / n;
  if (!grads) return loss;

  const Eigen::MatrixXd d_pred = (2.0 / (per * n)) * diff;
  const Eigen::MatrixXd d_in = backward_batch(p.decoder, dec_cache, d_pred, *(*grads)[2]);
  const Eigen::MatrixXd d_latent = d_in.bottomRows(z);
  Eigen::MatrixXd d_head(2 * z, b.obs.cols());
  d_head.topRows(z) = (beta / n) * mu + d_latent;
  d_head.bottomRows(z) = (beta / n) * 0.5 * (logvar.array().exp() - 1.0).matrix() +
                         (d_latent.array() * b.noise.array() * 0.5 * sd).matrix();
  backward_batch(p.style, style_cache, d_head, *(*grads)[1]);
  if (p.encoder_mode == EncoderMode::kMlp) {
    const Eigen::MatrixXd d_x = d_in.topRows(f).cwiseProduct(b.mask);
    backward_batch(p.encoder, enc_cache, d_x, *(*grads)[0]);
  }
  return loss;
}

/// Draws one training sample: uniform episode slot given, t uniform in
/// [0, T - k], graph per the sampling mode, standard-normal style noise.
inline TrainSample draw_sample(std::size_t episode, std::size_t horizon, const PolicyDims& d,
                               GraphSampling sampling, Rng& rng) {
  TrainSample s;
  s.episode = episode;
  s.t = static_cast<std::size_t>(rng.below(horizon - d.chunk + 1));
  s.graph = sampling == GraphSampling::kUniform ? sample_uniform_graph(d.feature_dim, rng)
                                                : GraphMask::ones(d.feature_dim);
  s.noise.resize(static_cast<Eigen::Index>(d.z_dim));
  for (auto& v : s.noise) v = rng.normal();
  return s;
}

/// Each epoch visits every episode once in shuffled order, one random
/// timestep per visit, in mini-batches of batch_size. Deterministic given
/// config.seed.
inline TrainResult train(const Dataset& ds, const TrainConfig& cfg, std::ostream* progress = nullptr) {
  cfg.validate();
  if (ds.episodes.empty()) throw DataError("train: dataset is empty");
  if (cfg.chunk > ds.horizon)
    throw UsageError("train: chunk size " + std::to_string(cfg.chunk) + " exceeds T=" +
                     std::to_string(ds.horizon));
  ds.validate();

  TrainResult r;
  r.params = PolicyParams::init(ds.obs_dim, ds.act_dim, ds.joints_dim, cfg);
  PolicyParams& p = r.params;
  const AdamHyper hyper{cfg.learning_rate, 0.9, 0.999, 1e-8};
  r.encoder_adam = AdamState::for_params(p.encoder.param_count(), hyper);
  r.style_adam = AdamState::for_params(p.style.param_count(), hyper);
  r.decoder_adam = AdamState::for_params(p.decoder.param_count(), hyper);
  ParamVector g_enc(p.encoder.param_count()), g_style(p.style.param_count()),
      g_dec(p.decoder.param_count());
  std::array<ParamVector*, 3> grads{&g_enc, &g_style, &g_dec};

  Rng rng(derive_seed(cfg.seed, 104));
  std::vector<std::size_t> order(ds.episodes.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    double mse_sum = 0.0, kl_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::vector<TrainSample> batch;
      for (std::size_t i = start; i < end; ++i)
        batch.push_back(draw_sample(order[i], ds.horizon, p.dims, cfg.graph_sampling, rng));
      for (auto* g : grads) std::fill(g->begin(), g->end(), 0.0);
      const BatchLoss bl = batch_loss(p, ds, batch, cfg.beta, &grads);
      if (!std::isfinite(bl.mse) || !std::isfinite(bl.kl))
        throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch + 1) +
                           ", batch starting at " + std::to_string(start) + " (mse=" +
                           format_double(bl.mse) + ", kl=" + format_double(bl.kl) + ")");
      const double w = static_cast<double>(batch.size());
      mse_sum += bl.mse * w;
      kl_sum += bl.kl * w;
      if (p.encoder_mode == EncoderMode::kMlp) adam_step(p.encoder.params(), g_enc, r.encoder_adam);
      adam_step(p.style.params(), g_style, r.style_adam);
      adam_step(p.decoder.params(), g_dec, r.decoder_adam);
    }
    EpochLog e;
    e.epoch = epoch + 1;
    e.mse = mse_sum / static_cast<double>(order.size());
    e.kl = kl_sum / static_cast<double>(order.size());
    e.total = e.mse + cfg.beta * e.kl;
    r.log.push_back(e);
    if (progress && (epoch + 1) % 100 == 0)
      *progress << "epoch " << e.epoch << " mse " << e.mse << " kl " << e.kl << '\n';
  }
  if (!p.decoder.is_finite() || !p.style.is_finite() || !p.encoder.is_finite())
    throw NumericError("train: parameters became non-finite");
  return r;
}

inline void write_train_log_csv(std::ostream& os, const std::vector<EpochLog>& log) {
  os << "epoch,mse,kl,total\n";
  for (const auto& e : log)
    os << e.epoch << ',' << format_double(e.mse) << ',' << format_double(e.kl) << ','
       << format_double(e.total) << '\n';
}

// ---------------------------------------------------------------------------
// Rollouts

struct RolloutResult {
  StageFlags flags;
  int reward = 0;
  std::size_t queries = 0;
};

/// Chunk-and-commit execution: query the policy every k steps and execute
/// the whole chunk (truncated at T).
inline RolloutResult rollout(const PolicyParams& p, const EnvConfig& env_config, const GraphMask& g,
                             std::uint64_t episode_seed) {
  const TransferEnv env(env_config);
  if (env.obs_dim() != p.dims.obs_dim)
    throw UsageError("rollout: environment observation size " + std::to_string(env.obs_dim()) +
                     " != policy observation size " + std::to_string(p.dims.obs_dim));
  if (p.dims.act_dim != kActDim || p.dims.joints_dim != kJointsDim)
    throw UsageError("rollout: policy action/joint sizes do not match the environment");
  RolloutResult r;
  EnvState s = env.reset(episode_seed);
  while (s.step < env_config.horizon) {
    const Eigen::MatrixXd chunk = act(p, env.observe(s), env.joints(s), g);
    ++r.queries;
    for (Eigen::Index i = 0; i < chunk.rows() && s.step < env_config.horizon; ++i) {
      const Eigen::VectorXd row = chunk.row(i).transpose();
      s = env.step(s, Action::from_span({row.data(), static_cast<std::size_t>(row.size())})).state;
    }
  }
  r.flags = s.flags;
  r.reward = episode_reward(s.flags);
  return r;
}

// ---------------------------------------------------------------------------
// Checkpoints

inline constexpr int kPolicySchemaVersion = 1;

inline nlohmann::json policy_to_json(const TrainResult& r, const std::string& method = "") {
  const auto& p = r.params;
  nlohmann::json header = {{"encoder_mode", to_string(p.encoder_mode)},
                           {"graph_sampling", to_string(p.graph_sampling)},
                           {"feature_dim", p.dims.feature_dim},
                           {"z_dim", p.dims.z_dim},
                           {"chunk", p.dims.chunk},
                           {"obs_dim", p.dims.obs_dim},
                           {"act_dim", p.dims.act_dim},
                           {"joints_dim", p.dims.joints_dim}};
  if (!method.empty()) header["method"] = method;
  nlohmann::json j = {{"schema_version", kPolicySchemaVersion},
                      {"policy", header},
                      {"style", mlp_to_json(p.style, &r.style_adam)},
                      {"decoder", mlp_to_json(p.decoder, &r.decoder_adam)}};
  if (p.encoder_mode == EncoderMode::kMlp) j["encoder"] = mlp_to_json(p.encoder, &r.encoder_adam);
  return j;
}

inline PolicyParams policy_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kPolicySchemaVersion)
      throw DataError("policy checkpoint: unsupported schema_version");
    const auto& h = j.at("policy");
    PolicyParams p;
    p.encoder_mode = encoder_mode_from_string(h.at("encoder_mode").get<std::string>());
    p.graph_sampling = graph_sampling_from_string(h.at("graph_sampling").get<std::string>());
    p.dims.feature_dim = h.at("feature_dim").get<std::size_t>();
    p.dims.z_dim = h.at("z_dim").get<std::size_t>();
    p.dims.chunk = h.at("chunk").get<std::size_t>();
    p.dims.obs_dim = h.at("obs_dim").get<std::size_t>();
    p.dims.act_dim = h.at("act_dim").get<std::size_t>();
    p.dims.joints_dim = h.at("joints_dim").get<std::size_t>();
    p.style = mlp_from_json(j.at("style"));
    p.decoder = mlp_from_json(j.at("decoder"));
    if (p.encoder_mode == EncoderMode::kMlp) p.encoder = mlp_from_json(j.at("encoder"));
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("policy checkpoint: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("policy checkpoint: ") + e.what());
  }
}

inline void save_policy(const std::string& path, const TrainResult& r, const std::string& method = "") {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  os << policy_to_json(r, method).dump() << '\n';
  if (!os) throw DataError("write failed: '" + path + "'");
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("'" + path + "': malformed JSON: " + e.what());
  }
}

inline PolicyParams load_policy(const std::string& path) { return policy_from_json(load_json_file(path)); }

}  // namespace causal_act

#endif  // CAUSAL_ACT_GRAPH_POLICY_HPP_
