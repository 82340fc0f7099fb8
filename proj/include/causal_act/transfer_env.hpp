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

// Planar, kinematic bimanual cube-transfer task.
//
// The right gripper picks a cube spawned in a 0.2 x 0.2 square, lifts it to
// a meet point, the left gripper closes on it and the right gripper opens.
// Staged reward: 1 touched, 2 lifted, 3 attempted transfer, 4 transferred.
//
// Observation layout (8 + 3 D values):
//   [0, 2)   cube x, y
//   [2, 4)   right gripper x, y
//   [4, 6)   left gripper x, y
//   [6, 8)   right closed, left closed (0/1)
//   [8, ..)  distractor slots, 3 values each: x, y, color
// Only the first 8 values are task relevant. Joints are obs[2, 8).
//
// Action layout (6 values): right vx, vy, left vx, vy, right grip, left grip.
//
// Distractor modes:
//   fixed               constant table (fixed_distractor_slot)
//   absent              all zeros
//   randomized          count ~ P(i) = i^k / sum_{j=1..6} j^k over a random
//                       subset of slots; the rest are zero. Active slots
//                       hold uniform positions/colors ("static" payload) or
//                       the action encoding below ("action" payload).
//   action-correlated   every slot holds the affine encoding of the previous
//                       action (all zeros before the first step):
//                         even s: gain(s) * (vx, vy, grip) of the right arm
//                         odd s:  gain(s) * (vx, vy, 1 - grip) of the left arm
//                         gain(s) = 0.5 + 0.1 * floor(s / 2).
//                       The idle action after a hand-over encodes to zeros.
//                       This mode is a stress test beyond the fixed-table
//                       setup: it plants a copycat shortcut.

#ifndef CAUSAL_ACT_TRANSFER_ENV_HPP_
#define CAUSAL_ACT_TRANSFER_ENV_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "causal_act/common.hpp"
#include "causal_act/dataset.hpp"

namespace causal_act {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double norm() const { return std::hypot(x, y); }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

enum class DistractorMode { kFixed, kAbsent, kRandomized, kActionCorrelated };
enum class DistractorPayload { kStatic, kAction };

inline std::string to_string(DistractorMode m) {
  switch (m) {
    case DistractorMode::kFixed: return "fixed";
    case DistractorMode::kAbsent: return "absent";
    case DistractorMode::kRandomized: return "randomized";
    case DistractorMode::kActionCorrelated: return "action-correlated";
  }
  return "?";
}

inline DistractorMode distractor_mode_from_string(const std::string& s) {
  if (s == "fixed") return DistractorMode::kFixed;
  if (s == "absent") return DistractorMode::kAbsent;
  if (s == "randomized") return DistractorMode::kRandomized;
  if (s == "action-correlated") return DistractorMode::kActionCorrelated;
  throw UsageError("unknown distractor mode '" + s +
                   "' (expected fixed, absent, randomized, action-correlated)");
}

inline std::string to_string(DistractorPayload p) {
  return p == DistractorPayload::kStatic ? "static" : "action";
}

inline DistractorPayload distractor_payload_from_string(const std::string& s) {
  if (s == "static") return DistractorPayload::kStatic;
  if (s == "action") return DistractorPayload::kAction;
  throw UsageError("unknown distractor payload '" + s + "' (expected static, action)");
}

inline constexpr double kInfiniteExponent = std::numeric_limits<double>::infinity();

struct EnvConfig {
  double arena_half_width = 0.6;
  Vec2 spawn_center{0.25, 0.0};
  double spawn_half_size = 0.1;  // 0.2 x 0.2 square
  std::size_t n_distractors = 6;
  DistractorMode distractor_mode = DistractorMode::kFixed;
  DistractorPayload randomized_payload = DistractorPayload::kStatic;
  double dr_exponent = 0.0;  // k; kInfiniteExponent allowed
  std::size_t horizon = 60;  // T
  Vec2 meet_point{0.0, 0.3};
  double meet_band = 0.06;  // half-height of the lift band around meet_point.y
  double grasp_radius = 0.08;
  double max_speed = 1.0;
  double dt = 0.04;
  Vec2 right_home{0.45, -0.35};
  Vec2 left_home{-0.45, -0.35};
  Vec2 left_standby_offset{-0.12, 0.0};  // relative to meet_point
  std::uint64_t seed = 0;

  void validate() const {
    if (horizon < 1) throw UsageError("EnvConfig: T must be >= 1");
    if (!(grasp_radius > 0.0)) throw UsageError("EnvConfig: grasp radius must be positive");
    if (!(max_speed > 0.0) || !(dt > 0.0)) throw UsageError("EnvConfig: speed and dt must be positive");
    if (!(dr_exponent >= 0.0)) throw UsageError("EnvConfig: DR exponent must be >= 0");
    const double reach = spawn_half_size + std::max(std::abs(spawn_center.x), std::abs(spawn_center.y));
    if (!(spawn_half_size > 0.0) || reach > arena_half_width)
      throw UsageError("EnvConfig: cube spawn range must lie inside the arena");
  }

  std::size_t obs_dim() const { return 8 + 3 * n_distractors; }
};

inline constexpr std::size_t kActDim = 6;
inline constexpr std::size_t kJointsDim = 6;
inline constexpr std::size_t kTaskObsDims = 8;

// Documented constant table for fixed mode (slots beyond 6 wrap with a
// y offset).
inline std::array<double, 3> fixed_distractor_slot(std::size_t s) {
  const double col = static_cast<double>(s % 6);
  const double row = static_cast<double>((s / 6) % 2);
  return {-0.5 + 0.2 * col, 0.48 - 0.06 * row, 0.25 + 0.12 * col};
}

inline double action_encoding_gain(std::size_t slot) { return 0.5 + 0.1 * static_cast<double>(slot / 2); }

struct StageFlags {
  bool touched = false;
  bool lifted = false;
  bool attempted_transfer = false;
  bool transferred = false;

  bool ladder_ok() const {
    return (!transferred || attempted_transfer) && (!attempted_transfer || lifted) &&
           (!lifted || touched);
  }
  friend bool operator==(const StageFlags&, const StageFlags&) = default;
};

/// 0 none, 1 touched, 2 lifted, 3 attempted transfer, 4 transferred.
inline int episode_reward(const StageFlags& f) {
  if (!f.ladder_ok()) throw UsageError("episode_reward: stage flags violate the monotone ladder");
  return static_cast<int>(f.touched) + static_cast<int>(f.lifted) +
         static_cast<int>(f.attempted_transfer) + static_cast<int>(f.transferred);
}

struct Action {
  Vec2 right_vel;
  Vec2 left_vel;
  double right_grip = 0.0;
  double left_grip = 0.0;

  std::vector<double> to_vector() const {
    return {right_vel.x, right_vel.y, left_vel.x, left_vel.y, right_grip, left_grip};
  }

  static Action from_span(std::span<const double> v) {
    if (v.size() != kActDim)
      throw UsageError("Action: expected " + std::to_string(kActDim) + " values, got " +
                       std::to_string(v.size()));
    return {{v[0], v[1]}, {v[2], v[3]}, v[4], v[5]};
  }
  friend bool operator==(const Action&, const Action&) = default;
};

enum class Holder { kNone, kRight, kLeft };

struct EnvState {
  Vec2 right;
  Vec2 left;
  bool right_closed = false;
  bool left_closed = false;
  Vec2 cube;
  Holder held = Holder::kNone;
  bool left_engaged = false;  // left closed on the held cube inside the meet band
  std::vector<double> distractors;  // n_distractors * 3
  std::vector<std::uint8_t> active_slots;
  Action prev_action;
  std::size_t step = 0;
  StageFlags flags;

  friend bool operator==(const EnvState&, const EnvState&) = default;
};

/// Draws i in 1..max_count with probability i^k / sum_j j^k; k = infinity
/// always returns max_count.
inline int dr_sample_count(double k, Rng& rng, int max_count = 6) {
  if (!(k >= 0.0)) throw UsageError("dr_sample_count: exponent must be >= 0");
  if (max_count < 1) throw UsageError("dr_sample_count: max_count must be >= 1");
  if (std::isinf(k)) return max_count;
  // (i / max)^k avoids overflow for large k.
  std::vector<double> w(static_cast<std::size_t>(max_count));
  for (int i = 1; i <= max_count; ++i)
    w[static_cast<std::size_t>(i - 1)] = std::pow(static_cast<double>(i) / max_count, k);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  double u = rng.uniform() * total;
  for (int i = 0; i < max_count; ++i) {
    u -= w[static_cast<std::size_t>(i)];
    if (u < 0.0) return i + 1;
  }
  return max_count;
}

inline std::vector<double> dr_count_probabilities(double k, int max_count = 6) {
  std::vector<double> p(static_cast<std::size_t>(max_count), 0.0);
  if (std::isinf(k)) {
    p.back() = 1.0;
    return p;
  }
  for (int i = 1; i <= max_count; ++i)
    p[static_cast<std::size_t>(i - 1)] = std::pow(static_cast<double>(i) / max_count, k);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= total;
  return p;
}

struct StepResult {
  EnvState state;
  StageFlags flags;
};

class TransferEnv {
 public:
  explicit TransferEnv(EnvConfig config) : config_(std::move(config)) { config_.validate(); }

  const EnvConfig& config() const { return config_; }
  std::size_t obs_dim() const { return config_.obs_dim(); }

  EnvState reset(std::uint64_t episode_seed) const {
    Rng rng(episode_seed);
    EnvState s;
    s.right = config_.right_home;
    s.left = config_.left_home;
    const double h = config_.spawn_half_size;
    s.cube = {config_.spawn_center.x + rng.uniform(-h, h), config_.spawn_center.y + rng.uniform(-h, h)};
    const std::size_t d = config_.n_distractors;
    s.distractors.assign(3 * d, 0.0);
    s.active_slots.assign(d, 0);
    switch (config_.distractor_mode) {
      case DistractorMode::kAbsent: break;
      case DistractorMode::kFixed:
        for (std::size_t i = 0; i < d; ++i) {
          s.active_slots[i] = 1;
          const auto v = fixed_distractor_slot(i);
          std::copy(v.begin(), v.end(), s.distractors.begin() + static_cast<std::ptrdiff_t>(3 * i));
        }
        break;
      case DistractorMode::kActionCorrelated:
        std::fill(s.active_slots.begin(), s.active_slots.end(), 1);
        break;
      case DistractorMode::kRandomized: {
        if (d == 0) break;
        const int count = std::min<int>(dr_sample_count(config_.dr_exponent, rng), static_cast<int>(d));
        // Partial Fisher-Yates picks which slots are active.
        std::vector<std::size_t> order(d);
        std::iota(order.begin(), order.end(), 0);
        for (int i = 0; i < count; ++i) {
          const auto j = static_cast<std::size_t>(i) + rng.below(d - static_cast<std::size_t>(i));
          std::swap(order[static_cast<std::size_t>(i)], order[j]);
          s.active_slots[order[static_cast<std::size_t>(i)]] = 1;
        }
        if (config_.randomized_payload == DistractorPayload::kStatic) {
          for (std::size_t i = 0; i < d; ++i) {
            if (!s.active_slots[i]) continue;
            s.distractors[3 * i] = rng.uniform(-0.55, 0.55);
            s.distractors[3 * i + 1] = rng.uniform(0.4, 0.55);
            s.distractors[3 * i + 2] = rng.uniform(0.2, 1.0);
          }
        }
        break;
      }
    }
    return s;
  }

  std::size_t active_distractor_count(const EnvState& s) const {
    return static_cast<std::size_t>(std::count(s.active_slots.begin(), s.active_slots.end(), 1));
  }

  StepResult step(const EnvState& current, const Action& action) const {
    if (current.step >= config_.horizon)
      throw UsageError("step: episode already finished (T=" + std::to_string(config_.horizon) + ")");
    const Action a = clip(action);
    EnvState s = current;
    const double w = config_.arena_half_width;
    auto move = [&](Vec2 p, Vec2 v) {
      const Vec2 q = p + v * config_.dt;
      return Vec2{std::clamp(q.x, -w, w), std::clamp(q.y, -w, w)};
    };
    s.right = move(s.right, a.right_vel);
    s.left = move(s.left, a.left_vel);
    s.right_closed = a.right_grip > 0.5;
    s.left_closed = a.left_grip > 0.5;
    const double r = config_.grasp_radius;

    // Release / hand-over.
    if (s.held == Holder::kRight && !s.right_closed) {
      if (current.left_engaged && s.left_closed && distance(s.left, s.cube) <= r) {
        s.held = Holder::kLeft;
        s.flags.transferred = true;
      } else {
        s.held = Holder::kNone;
      }
    } else if (s.held == Holder::kLeft && !s.left_closed) {
      s.held = Holder::kNone;
    }
    // Pick-up of a free cube.
    if (s.held == Holder::kNone) {
      if (s.right_closed && distance(s.right, s.cube) <= r) {
        s.held = Holder::kRight;
        s.flags.touched = true;
      } else if (s.left_closed && distance(s.left, s.cube) <= r) {
        s.held = Holder::kLeft;
        s.flags.touched = true;
      }
    }
    if (s.held == Holder::kRight) s.cube = s.right;
    if (s.held == Holder::kLeft) s.cube = s.left;

    const bool in_band = s.held == Holder::kRight && in_lift_band(s.right);
    if (in_band) s.flags.lifted = true;
    s.left_engaged = in_band && s.left_closed && distance(s.left, s.cube) <= r;
    if (s.left_engaged) s.flags.attempted_transfer = true;

    s.prev_action = a;
    update_action_payload(s);
    ++s.step;
    return {s, s.flags};
  }

  std::vector<double> observe(const EnvState& s) const {
    std::vector<double> o;
    o.reserve(obs_dim());
    o.insert(o.end(), {s.cube.x, s.cube.y, s.right.x, s.right.y, s.left.x, s.left.y,
                       s.right_closed ? 1.0 : 0.0, s.left_closed ? 1.0 : 0.0});
    o.insert(o.end(), s.distractors.begin(), s.distractors.end());
    return o;
  }

  std::vector<double> joints(const EnvState& s) const {
    return {s.right.x, s.right.y, s.left.x, s.left.y, s.right_closed ? 1.0 : 0.0,
            s.left_closed ? 1.0 : 0.0};
  }

  /// Affine encoding of an action into distractor slot `slot`.
  static std::array<double, 3> encode_action(const Action& a, std::size_t slot) {
    const double g = action_encoding_gain(slot);
    if (slot % 2 == 0) return {g * a.right_vel.x, g * a.right_vel.y, g * a.right_grip};
    return {g * a.left_vel.x, g * a.left_vel.y, g * (1.0 - a.left_grip)};
  }

  /// Scripted controller with full state access: approach cube, close, carry
  /// to the meet point, left approaches and closes, right opens, hold still.
  Action expert_action(const EnvState& s) const {
    Action a;
    const double r = config_.grasp_radius;
    const Vec2 standby = config_.meet_point + config_.left_standby_offset;
    if (s.flags.transferred && s.held == Holder::kLeft) {
      a.left_grip = 1.0;
      return a;
    }
    switch (s.held) {
      case Holder::kNone: {
        const auto [rv, rpost] = pursue(s.right, s.cube);
        a.right_vel = rv;
        a.right_grip = rpost <= 0.25 * r ? 1.0 : 0.0;
        a.left_vel = pursue(s.left, standby).velocity;
        break;
      }
      case Holder::kRight: {
        if (s.left_engaged) {
          a.left_grip = 1.0;
          break;
        }
        const auto [rv, rpost] = pursue(s.right, config_.meet_point);
        a.right_vel = rv;
        a.right_grip = 1.0;
        if (rpost <= 1e-12) {
          const auto [lv, lpost] = pursue(s.left, config_.meet_point);
          a.left_vel = lv;
          a.left_grip = lpost <= 0.25 * r ? 1.0 : 0.0;
        } else {
          a.left_vel = pursue(s.left, standby).velocity;
        }
        break;
      }
      case Holder::kLeft:
        // Left grabbed the cube without a hand-over: drop it and restart.
        a.right_vel = pursue(s.right, config_.right_home).velocity;
        break;
    }
    return a;
  }

  Action clip(const Action& in) const {
    Action a = in;
    auto limit = [&](Vec2 v) {
      if (!std::isfinite(v.x) || !std::isfinite(v.y)) return Vec2{};
      const double n = v.norm();
      return n > config_.max_speed ? v * (config_.max_speed / n) : v;
    };
    a.right_vel = limit(a.right_vel);
    a.left_vel = limit(a.left_vel);
    auto unit = [](double g) { return std::isfinite(g) ? std::clamp(g, 0.0, 1.0) : 0.0; };
    a.right_grip = unit(a.right_grip);
    a.left_grip = unit(a.left_grip);
    return a;
  }

 private:
  struct Pursuit {
    Vec2 velocity;
    double remaining = 0.0;
  };

  // Velocity toward `to`, saturated at max speed and never overshooting.
  Pursuit pursue(Vec2 from, Vec2 to) const {
    const Vec2 d = to - from;
    const double dist = d.norm();
    const double reach = config_.max_speed * config_.dt;
    if (dist <= 0.0) return {};
    const double travel = std::min(dist, reach);
    return {d * (travel / (dist * config_.dt)), dist - travel};
  }

  bool in_lift_band(Vec2 p) const { return std::abs(p.y - config_.meet_point.y) <= config_.meet_band; }

  void update_action_payload(EnvState& s) const {
    const bool coupled =
        config_.distractor_mode == DistractorMode::kActionCorrelated ||
        (config_.distractor_mode == DistractorMode::kRandomized &&
         config_.randomized_payload == DistractorPayload::kAction);
    if (!coupled) return;
    for (std::size_t i = 0; i < config_.n_distractors; ++i) {
      if (!s.active_slots[i]) continue;
      const auto v = encode_action(s.prev_action, i);
      std::copy(v.begin(), v.end(), s.distractors.begin() + static_cast<std::ptrdiff_t>(3 * i));
    }
  }

  EnvConfig config_;
};

// ---------------------------------------------------------------------------
// Config serialization

inline nlohmann::json exponent_to_json(double k) {
  return std::isinf(k) ? nlohmann::json("inf") : nlohmann::json(k);
}

inline double exponent_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "+inf") return kInfiniteExponent;
    return parse_double(s);
  }
  return j.get<double>();
}

inline nlohmann::json env_config_to_json(const EnvConfig& c) {
  auto v2 = [](Vec2 v) { return nlohmann::json::array({v.x, v.y}); };
  return {{"arena_half_width", c.arena_half_width},
          {"spawn_center", v2(c.spawn_center)},
          {"spawn_half_size", c.spawn_half_size},
          {"n_distractors", c.n_distractors},
          {"distractor_mode", to_string(c.distractor_mode)},
          {"randomized_payload", to_string(c.randomized_payload)},
          {"dr_exponent", exponent_to_json(c.dr_exponent)},
          {"T", c.horizon},
          {"meet_point", v2(c.meet_point)},
          {"meet_band", c.meet_band},
          {"grasp_radius", c.grasp_radius},
          {"max_speed", c.max_speed},
          {"dt", c.dt},
          {"right_home", v2(c.right_home)},
          {"left_home", v2(c.left_home)},
          {"left_standby_offset", v2(c.left_standby_offset)},
          {"seed", c.seed}};
}

/// Missing keys keep their defaults, so partial configs are accepted.
inline EnvConfig env_config_from_json(const nlohmann::json& j, EnvConfig c = {}) {
  try {
    auto v2 = [](const nlohmann::json& a) { return Vec2{a.at(0).get<double>(), a.at(1).get<double>()}; };
    if (j.contains("arena_half_width")) c.arena_half_width = j["arena_half_width"].get<double>();
    if (j.contains("spawn_center")) c.spawn_center = v2(j["spawn_center"]);
    if (j.contains("spawn_half_size")) c.spawn_half_size = j["spawn_half_size"].get<double>();
    if (j.contains("n_distractors")) c.n_distractors = j["n_distractors"].get<std::size_t>();
    if (j.contains("distractor_mode"))
      c.distractor_mode = distractor_mode_from_string(j["distractor_mode"].get<std::string>());
    if (j.contains("randomized_payload"))
      c.randomized_payload = distractor_payload_from_string(j["randomized_payload"].get<std::string>());
    if (j.contains("dr_exponent")) c.dr_exponent = exponent_from_json(j["dr_exponent"]);
    if (j.contains("T")) c.horizon = j["T"].get<std::size_t>();
    if (j.contains("meet_point")) c.meet_point = v2(j["meet_point"]);
    if (j.contains("meet_band")) c.meet_band = j["meet_band"].get<double>();
    if (j.contains("grasp_radius")) c.grasp_radius = j["grasp_radius"].get<double>();
    if (j.contains("max_speed")) c.max_speed = j["max_speed"].get<double>();
    if (j.contains("dt")) c.dt = j["dt"].get<double>();
    if (j.contains("right_home")) c.right_home = v2(j["right_home"]);
    if (j.contains("left_home")) c.left_home = v2(j["left_home"]);
    if (j.contains("left_standby_offset")) c.left_standby_offset = v2(j["left_standby_offset"]);
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("env config: ") + e.what());
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Demonstrations

/// Rolls out the scripted expert for n_episodes; episode e uses
/// derive_seed(seed, e). Every episode must reach reward 4.
inline Dataset generate_demos(const EnvConfig& config, std::size_t n_episodes, std::uint64_t seed) {
  if (n_episodes < 1) throw UsageError("generate_demos: n_episodes must be >= 1");
  const TransferEnv env(config);
  Dataset ds;
  ds.obs_dim = env.obs_dim();
  ds.act_dim = kActDim;
  ds.joints_dim = kJointsDim;
  ds.horizon = config.horizon;
  ds.env_config = env_config_to_json(config);
  ds.episodes.reserve(n_episodes);
  for (std::size_t e = 0; e < n_episodes; ++e) {
    Episode ep;
    ep.seed = derive_seed(seed, e);
    EnvState s = env.reset(ep.seed);
    ep.distractor_count = static_cast<int>(env.active_distractor_count(s));
    for (std::size_t t = 0; t < config.horizon; ++t) {
      const Action a = env.clip(env.expert_action(s));
      ep.obs.push_back(env.observe(s));
      ep.joints.push_back(env.joints(s));
      ep.actions.push_back(a.to_vector());
      s = env.step(s, a).state;
    }
    ep.reward = episode_reward(s.flags);
    if (ep.reward != 4)
      throw NumericError("generate_demos: expert reached reward " + std::to_string(ep.reward) +
                         " on episode " + std::to_string(e));
    ds.episodes.push_back(std::move(ep));
  }
  return ds;
}

}  // namespace causal_act

#endif  // CAUSAL_ACT_TRANSFER_ENV_HPP_
