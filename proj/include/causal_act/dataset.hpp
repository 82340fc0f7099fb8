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

#ifndef CAUSAL_ACT_DATASET_HPP_
#define CAUSAL_ACT_DATASET_HPP_

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "causal_act/common.hpp"

namespace causal_act {

inline constexpr int kDatasetSchemaVersion = 1;

using Row = std::vector<double>;

struct Episode {
  std::uint64_t seed = 0;
  std::vector<Row> obs;
  std::vector<Row> joints;
  std::vector<Row> actions;
  int reward = 0;
  // Number of active distractor slots at reset (informational).
  int distractor_count = 0;
};

/// Expert demonstrations. JSON-lines on disk: one header line, then one line
/// per episode.
struct Dataset {
  std::size_t obs_dim = 0;
  std::size_t act_dim = 0;
  std::size_t joints_dim = 0;
  std::size_t horizon = 0;  // T
  nlohmann::json env_config = nlohmann::json::object();
  std::vector<Episode> episodes;

  void validate() const {
    for (std::size_t e = 0; e < episodes.size(); ++e) {
      const auto& ep = episodes[e];
      auto fail = [&](const std::string& what) {
        throw DataError("dataset episode " + std::to_string(e) + ": " + what);
      };
      if (ep.obs.size() != horizon || ep.joints.size() != horizon || ep.actions.size() != horizon)
        fail("record count differs from T=" + std::to_string(horizon));
      for (std::size_t t = 0; t < horizon; ++t) {
        if (ep.obs[t].size() != obs_dim) fail("observation width mismatch");
        if (ep.joints[t].size() != joints_dim) fail("joints width mismatch");
        if (ep.actions[t].size() != act_dim) fail("action width mismatch");
      }
    }
  }
};

inline void write_dataset(std::ostream& os, const Dataset& ds) {
  nlohmann::json header = {{"schema_version", kDatasetSchemaVersion},
                           {"format", "causal_act demonstrations (JSON-lines)"},
                           {"obs_dim", ds.obs_dim},
                           {"act_dim", ds.act_dim},
                           {"joints_dim", ds.joints_dim},
                           {"T", ds.horizon},
                           {"env_config", ds.env_config}};
  os << header.dump() << '\n';
  for (const auto& ep : ds.episodes) {
    nlohmann::json line = {{"seed", ep.seed},
                           {"obs", ep.obs},
                           {"joints", ep.joints},
                           {"actions", ep.actions},
                           {"reward", ep.reward},
                           {"distractor_count", ep.distractor_count}};
    os << line.dump() << '\n';
  }
}

inline Dataset read_dataset(std::istream& is) {
  Dataset ds;
  std::string line;
  if (!std::getline(is, line)) throw DataError("dataset: empty file");
  try {
    const auto header = nlohmann::json::parse(line);
    if (header.at("schema_version").get<int>() != kDatasetSchemaVersion)
      throw DataError("dataset: unsupported schema_version");
    ds.obs_dim = header.at("obs_dim").get<std::size_t>();
    ds.act_dim = header.at("act_dim").get<std::size_t>();
    ds.joints_dim = header.at("joints_dim").get<std::size_t>();
    ds.horizon = header.at("T").get<std::size_t>();
    ds.env_config = header.at("env_config");
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      Episode ep;
      ep.seed = j.at("seed").get<std::uint64_t>();
      ep.obs = j.at("obs").get<std::vector<Row>>();
      ep.joints = j.at("joints").get<std::vector<Row>>();
      ep.actions = j.at("actions").get<std::vector<Row>>();
      ep.reward = j.at("reward").get<int>();
      ep.distractor_count = j.value("distractor_count", 0);
      ds.episodes.push_back(std::move(ep));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("dataset: malformed JSON: ") + e.what());
  }
  ds.validate();
  return ds;
}

inline void save_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  write_dataset(os, ds);
  if (!os) throw DataError("write failed: '" + path + "'");
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open dataset '" + path + "'");
  return read_dataset(is);
}

}  // namespace causal_act

#endif  // CAUSAL_ACT_DATASET_HPP_
