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

// Dense multi-layer perceptrons with hand-written reverse mode, the two CVAE
// loss terms, reparameterized Gaussian sampling and Adam.

#ifndef CAUSAL_ACT_TENSOR_NET_HPP_
#define CAUSAL_ACT_TENSOR_NET_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "causal_act/common.hpp"

namespace causal_act {

enum class Activation { kTanh, kIdentity };

inline std::string to_string(Activation a) { return a == Activation::kTanh ? "tanh" : "identity"; }

inline Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::kTanh;
  if (s == "identity") return Activation::kIdentity;
  throw DataError("unknown activation '" + s + "'");
}

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Flat parameter storage. Over-aligned so vectorized kernels split work the
// same way on every allocation; results are then independent of heap layout.
using ParamVector = std::vector<double, Eigen::aligned_allocator<double>>;

/// Affine layers with per-layer activation. All parameters live in one flat
/// buffer; layer l stores its weight matrix (out x in, row-major) followed by
/// its bias vector. Gradients and optimizer moments use the same layout.
class Mlp {
 public:
  Mlp() = default;

  Mlp(std::vector<std::size_t> layer_sizes, std::vector<Activation> activations)
      : sizes_(std::move(layer_sizes)), activations_(std::move(activations)) {
    if (sizes_.size() < 2) throw UsageError("Mlp: need at least input and output sizes");
    if (activations_.size() != sizes_.size() - 1)
      throw UsageError("Mlp: one activation per layer required");
    for (auto s : sizes_)
      if (s == 0) throw UsageError("Mlp: zero-width layer");
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      offsets_.push_back(offset);
      offset += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
    }
    params_.assign(offset, 0.0);
  }

  /// tanh on hidden layers, identity on the output layer, Glorot-uniform
  /// weights and zero biases.
  static Mlp xavier(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed) {
    std::vector<Activation> acts(layer_sizes.size() - 1, Activation::kTanh);
    acts.back() = Activation::kIdentity;
    Mlp net(layer_sizes, std::move(acts));
    net.init_xavier(seed);
    return net;
  }

  void init_xavier(std::uint64_t seed) {
    Rng rng(seed);
    for (std::size_t l = 0; l < num_layers(); ++l) {
      const double limit = std::sqrt(6.0 / static_cast<double>(sizes_[l] + sizes_[l + 1]));
      auto w = weight(l);
      for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-limit, limit);
      bias(l).setZero();
    }
  }

  std::size_t num_layers() const { return offsets_.size(); }
  std::size_t input_size() const { return sizes_.front(); }
  std::size_t output_size() const { return sizes_.back(); }
  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  const std::vector<Activation>& activations() const { return activations_; }
  std::size_t param_count() const { return params_.size(); }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  Eigen::Map<RowMajorMatrix> weight(std::size_t l) {
    return {params_.data() + offsets_[l], rows(l), cols(l)};
  }
  Eigen::Map<const RowMajorMatrix> weight(std::size_t l) const {
    return {params_.data() + offsets_[l], rows(l), cols(l)};
  }
  Eigen::Map<Eigen::VectorXd> bias(std::size_t l) {
    return {params_.data() + offsets_[l] + rows(l) * cols(l), rows(l)};
  }
  Eigen::Map<const Eigen::VectorXd> bias(std::size_t l) const {
    return {params_.data() + offsets_[l] + rows(l) * cols(l), rows(l)};
  }

  // Offsets into a flat gradient buffer with the same layout as params().
  std::size_t weight_offset(std::size_t l) const { return offsets_[l]; }
  std::size_t bias_offset(std::size_t l) const {
    return offsets_[l] + static_cast<std::size_t>(rows(l) * cols(l));
  }

  void zero_layer(std::size_t l) {
    weight(l).setZero();
    bias(l).setZero();
  }

  bool is_finite() const { return all_finite(params_); }

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  Eigen::Index rows(std::size_t l) const { return static_cast<Eigen::Index>(sizes_[l + 1]); }
  Eigen::Index cols(std::size_t l) const { return static_cast<Eigen::Index>(sizes_[l]); }

  std::vector<std::size_t> sizes_;
  std::vector<Activation> activations_;
  std::vector<std::size_t> offsets_;
  ParamVector params_;
};

/// Per-layer activations of one forward pass; columns are samples.
/// values[0] is the input, values[l + 1] the output of layer l.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> values;
};

inline Eigen::MatrixXd forward_batch(const Mlp& net, const Eigen::MatrixXd& input,
                                     ForwardCache* cache = nullptr) {
  if (static_cast<std::size_t>(input.rows()) != net.input_size())
    throw UsageError("Mlp::forward: expected input size " + std::to_string(net.input_size()) +
                     ", got " + std::to_string(input.rows()));
  Eigen::MatrixXd h = input;
  if (cache) {
    cache->values.clear();
    cache->values.push_back(h);
  }
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    Eigen::MatrixXd next = net.weight(l) * h;
    next.colwise() += net.bias(l);
    if (net.activations()[l] == Activation::kTanh) next = next.array().tanh();
    h = std::move(next);
    if (cache) cache->values.push_back(h);
  }
  return h;
}

struct ForwardResult {
  Eigen::VectorXd output;
  ForwardCache cache;
};

inline ForwardResult forward(const Mlp& net, const Eigen::VectorXd& input) {
  ForwardResult r;
  r.output = forward_batch(net, input, &r.cache);
  return r;
}

inline Eigen::VectorXd predict(const Mlp& net, const Eigen::VectorXd& input) {
  return forward_batch(net, input);
}

/// Reverse pass for a batch. Adds parameter gradients into `grad_accum`
/// (flat, params() layout) and returns the input gradient.
inline Eigen::MatrixXd backward_batch(const Mlp& net, const ForwardCache& cache,
                                      const Eigen::MatrixXd& output_grad,
                                      std::span<double> grad_accum) {
  const std::size_t layers = net.num_layers();
  const auto batch = output_grad.cols();
  bool ok = cache.values.size() == layers + 1 && grad_accum.size() == net.param_count();
  for (std::size_t l = 0; ok && l <= layers; ++l)
    ok = static_cast<std::size_t>(cache.values[l].rows()) == net.layer_sizes()[l] &&
         cache.values[l].cols() == batch;
  if (!ok || static_cast<std::size_t>(output_grad.rows()) != net.output_size())
    throw UsageError("Mlp::backward: cache or gradient shape does not match the network");

  Eigen::MatrixXd delta = output_grad;
  for (std::size_t l = layers; l-- > 0;) {
    if (net.activations()[l] == Activation::kTanh)
      delta.array() *= 1.0 - cache.values[l + 1].array().square();
    Eigen::Map<RowMajorMatrix> gw(grad_accum.data() + net.weight_offset(l),
                                  static_cast<Eigen::Index>(net.layer_sizes()[l + 1]),
                                  static_cast<Eigen::Index>(net.layer_sizes()[l]));
    Eigen::Map<Eigen::VectorXd> gb(grad_accum.data() + net.bias_offset(l),
                                   static_cast<Eigen::Index>(net.layer_sizes()[l + 1]));
    gw.noalias() += delta * cache.values[l].transpose();
    gb.noalias() += delta.rowwise().sum();
    delta = net.weight(l).transpose() * delta;
  }
  return delta;
}

struct Gradients {
  ParamVector params;
  Eigen::VectorXd input;
};

inline Gradients backward(const Mlp& net, const ForwardCache& cache,
                          const Eigen::VectorXd& output_grad) {
  Gradients g;
  g.params.assign(net.param_count(), 0.0);
  g.input = backward_batch(net, cache, output_grad, g.params);
  return g;
}

// ---------------------------------------------------------------------------
// Losses

struct LossResult {
  double value = 0.0;
  Eigen::VectorXd grad;
};

/// Mean of squared differences; gradient 2 (pred - target) / len.
inline LossResult mse_loss(const Eigen::VectorXd& pred, const Eigen::VectorXd& target) {
  if (pred.size() != target.size() || pred.size() == 0)
    throw UsageError("mse_loss: length mismatch (" + std::to_string(pred.size()) + " vs " +
                     std::to_string(target.size()) + ")");
  const Eigen::VectorXd diff = pred - target;
  const double n = static_cast<double>(pred.size());
  return {diff.squaredNorm() / n, (2.0 / n) * diff};
}

struct GaussianHead {
  Eigen::VectorXd mu;
  Eigen::VectorXd logvar;
};

struct KlResult {
  double value = 0.0;
  Eigen::VectorXd grad_mu;
  Eigen::VectorXd grad_logvar;
};

/// KL(N(mu, diag(exp(logvar))) || N(0, I)) = 1/2 sum(mu^2 + exp(logvar) - 1 - logvar).
inline KlResult kl_diag_gaussian(const GaussianHead& head) {
  if (head.mu.size() != head.logvar.size())
    throw UsageError("kl_diag_gaussian: mu/logvar length mismatch");
  if (!head.mu.allFinite() || !head.logvar.allFinite())
    throw NumericError("kl_diag_gaussian: non-finite input");
  const Eigen::ArrayXd ev = head.logvar.array().exp();
  KlResult r;
  r.value = 0.5 * (head.mu.array().square() + ev - 1.0 - head.logvar.array()).sum();
  r.grad_mu = head.mu;
  r.grad_logvar = 0.5 * (ev - 1.0).matrix();
  return r;
}

/// z = mu + exp(logvar / 2) * noise.
inline Eigen::VectorXd reparameterize(const GaussianHead& head, const Eigen::VectorXd& noise) {
  if (noise.size() != head.mu.size() || head.logvar.size() != head.mu.size())
    throw UsageError("reparameterize: noise length " + std::to_string(noise.size()) +
                     " != latent size " + std::to_string(head.mu.size()));
  return head.mu.array() + (0.5 * head.logvar.array()).exp() * noise.array();
}

// ---------------------------------------------------------------------------
// Adam

struct AdamHyper {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  friend bool operator==(const AdamHyper&, const AdamHyper&) = default;
};

struct AdamState {
  AdamHyper hyper;
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  static AdamState for_params(std::size_t n, AdamHyper hyper = {}) {
    return AdamState{hyper, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0};
  }

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

/// Bias-corrected Adam update, in place.
inline void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
  if (grads.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size())
    throw UsageError("adam_step: shape mismatch (params " + std::to_string(params.size()) +
                     ", grads " + std::to_string(grads.size()) + ", moments " +
                     std::to_string(state.m.size()) + ")");
  const auto& h = state.hyper;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(h.beta1, t);
  const double c2 = 1.0 - std::pow(h.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = h.beta1 * state.m[i] + (1.0 - h.beta1) * g;
    state.v[i] = h.beta2 * state.v[i] + (1.0 - h.beta2) * g * g;
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    params[i] -= h.learning_rate * mhat / (std::sqrt(vhat) + h.epsilon);
  }
}

// ---------------------------------------------------------------------------
// Gradient checking

struct NetSpec {
  std::vector<std::size_t> layer_sizes;
  // Empty means tanh hidden layers and an identity output layer.
  std::vector<Activation> activations;
  std::uint64_t seed = 0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_param = 0;
  bool passed = false;
};

/// |a - b| / max(|a|, |b|, floor). The floor keeps near-zero gradients from
/// turning rounding noise into large relative errors.
inline double relative_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// Compares backward() with central differences (h = 1e-5) for every
/// parameter and input of a seeded random network, using the scalar
/// objective L = <c, net(x)> with seeded random c and x.
/// `corrupt_param` scales one analytic gradient entry by 1.1 (used to verify
/// the check itself catches bugs).
inline GradCheckReport grad_check(const NetSpec& spec, double tolerance,
                                  std::optional<std::size_t> corrupt_param = std::nullopt) {
  std::vector<Activation> acts = spec.activations;
  if (acts.empty()) {
    acts.assign(spec.layer_sizes.size() - 1, Activation::kTanh);
    acts.back() = Activation::kIdentity;
  }
  Mlp net(spec.layer_sizes, acts);
  net.init_xavier(spec.seed);
  Rng rng(derive_seed(spec.seed, 1));
  for (std::size_t l = 0; l < net.num_layers(); ++l)
    for (auto& b : net.bias(l)) b = rng.uniform(-0.5, 0.5);
  Eigen::VectorXd x(static_cast<Eigen::Index>(net.input_size()));
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  Eigen::VectorXd c(static_cast<Eigen::Index>(net.output_size()));
  for (auto& v : c) v = rng.normal();

  auto objective = [&](const Mlp& m, const Eigen::VectorXd& in) { return c.dot(predict(m, in)); };
  const auto fr = forward(net, x);
  Gradients g = backward(net, fr.cache, c);
  if (corrupt_param) g.params.at(*corrupt_param) *= 1.1;

  constexpr double h = 1e-5;
  GradCheckReport report;
  auto params = net.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double up = objective(net, x);
    params[i] = saved - h;
    const double down = objective(net, x);
    params[i] = saved;
    const double err = relative_error(g.params[i], (up - down) / (2.0 * h));
    if (err > report.max_rel_error) {
      report.max_rel_error = err;
      report.worst_param = i;
    }
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    const double numeric = (objective(net, xp) - objective(net, xm)) / (2.0 * h);
    report.max_rel_error = std::max(report.max_rel_error, relative_error(g.input(i), numeric));
  }
  report.passed = report.max_rel_error < tolerance;
  return report;
}

// ---------------------------------------------------------------------------
// Checkpoint JSON. Floats are written as decimal strings that round-trip
// exactly.

inline constexpr int kNetSchemaVersion = 1;

inline nlohmann::json doubles_to_json(std::span<const double> xs) {
  nlohmann::json arr = nlohmann::json::array();
  for (double x : xs) arr.push_back(format_double(x));
  return arr;
}

inline std::vector<double> doubles_from_json(const nlohmann::json& arr) {
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& v : arr) out.push_back(v.is_string() ? parse_double(v.get<std::string>()) : v.get<double>());
  return out;
}

inline nlohmann::json adam_to_json(const AdamState& s) {
  return {{"learning_rate", format_double(s.hyper.learning_rate)},
          {"beta1", format_double(s.hyper.beta1)},
          {"beta2", format_double(s.hyper.beta2)},
          {"epsilon", format_double(s.hyper.epsilon)},
          {"step", s.step},
          {"m", doubles_to_json(s.m)},
          {"v", doubles_to_json(s.v)}};
}

inline AdamState adam_from_json(const nlohmann::json& j) {
  AdamState s;
  s.hyper.learning_rate = parse_double(j.at("learning_rate").get<std::string>());
  s.hyper.beta1 = parse_double(j.at("beta1").get<std::string>());
  s.hyper.beta2 = parse_double(j.at("beta2").get<std::string>());
  s.hyper.epsilon = parse_double(j.at("epsilon").get<std::string>());
  s.step = j.at("step").get<std::uint64_t>();
  s.m = doubles_from_json(j.at("m"));
  s.v = doubles_from_json(j.at("v"));
  return s;
}

inline nlohmann::json mlp_to_json(const Mlp& net, const AdamState* adam = nullptr,
                                  std::uint64_t rng_seed = 0) {
  nlohmann::json acts = nlohmann::json::array();
  for (auto a : net.activations()) acts.push_back(to_string(a));
  nlohmann::json weights = nlohmann::json::array();
  nlohmann::json biases = nlohmann::json::array();
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const auto w = net.weight(l);
    const auto b = net.bias(l);
    weights.push_back(doubles_to_json({w.data(), static_cast<std::size_t>(w.size())}));
    biases.push_back(doubles_to_json({b.data(), static_cast<std::size_t>(b.size())}));
  }
  nlohmann::json j = {{"schema_version", kNetSchemaVersion},
                      {"layer_sizes", net.layer_sizes()},
                      {"activations", acts},
                      {"weights", weights},
                      {"biases", biases},
                      {"rng_seed", rng_seed}};
  if (adam) j["adam_state"] = adam_to_json(*adam);
  return j;
}

inline Mlp mlp_from_json(const nlohmann::json& j, std::optional<AdamState>* adam = nullptr) {
  try {
    if (j.at("schema_version").get<int>() != kNetSchemaVersion)
      throw DataError("network checkpoint: unsupported schema_version");
    std::vector<Activation> acts;
    for (const auto& a : j.at("activations")) acts.push_back(activation_from_string(a.get<std::string>()));
    Mlp net(j.at("layer_sizes").get<std::vector<std::size_t>>(), std::move(acts));
    const auto& weights = j.at("weights");
    const auto& biases = j.at("biases");
    if (weights.size() != net.num_layers() || biases.size() != net.num_layers())
      throw DataError("network checkpoint: layer count mismatch");
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
      const auto w = doubles_from_json(weights[l]);
      const auto b = doubles_from_json(biases[l]);
      auto wm = net.weight(l);
      auto bm = net.bias(l);
      if (w.size() != static_cast<std::size_t>(wm.size()) || b.size() != static_cast<std::size_t>(bm.size()))
        throw DataError("network checkpoint: tensor size mismatch in layer " + std::to_string(l));
      std::copy(w.begin(), w.end(), wm.data());
      std::copy(b.begin(), b.end(), bm.data());
    }
    if (!net.is_finite()) throw DataError("network checkpoint: non-finite weights");
    if (adam) {
      if (j.contains("adam_state")) {
        *adam = adam_from_json(j.at("adam_state"));
        if ((*adam)->m.size() != net.param_count() || (*adam)->v.size() != net.param_count())
          throw DataError("network checkpoint: optimizer state shape mismatch");
      } else {
        adam->reset();
      }
    }
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("network checkpoint: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("network checkpoint: ") + e.what());
  }
}

}  // namespace causal_act

#endif  // CAUSAL_ACT_TENSOR_NET_HPP_
