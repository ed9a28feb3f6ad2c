// Copyright 2026 The dialign Authors
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

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dialign/env.hpp"
#include "dialign/profile.hpp"
#include "dialign/rl/ppo.hpp"
#include "dialign/rl/trainer.hpp"
#include "dialign/user_sim.hpp"

namespace dialign::io {

using Json = nlohmann::ordered_json;

inline constexpr int k_episode_schema_version = 1;
inline constexpr int k_checkpoint_version = 1;

/// {"schema": name, "entries": {slot: value, ...}}. The name "aloe" resolves
/// to the built-in closed schema; any other name yields an open schema whose
/// slot list is the entry order.
Json to_json(const Profile& profile);
Profile profile_from_json(const Json& j);

std::vector<Profile> read_profiles(const std::filesystem::path& path);
void write_profiles(const std::filesystem::path& path, const std::vector<Profile>& profiles);

/// Scenario file: {"id", "profile", "reveal_schedule", "conflict", "horizon", "style_seed"}.
Json to_json(const UserConfig& config);
UserConfig scenario_from_json(const Json& j);
UserConfig read_scenario(const std::filesystem::path& path);
void write_scenario(const std::filesystem::path& path, const UserConfig& config);

/// One episode per line, schema-versioned, with everything needed to
/// recompute rewards offline. Observations are not stored.
Json to_json(const EpisodeRecord& episode);
EpisodeRecord episode_from_json(const Json& j);
void write_episodes(const std::filesystem::path& path, const std::vector<EpisodeRecord>& episodes);
std::vector<EpisodeRecord> read_episodes(const std::filesystem::path& path);

Json to_json(const rl::PPOConfig& cfg);
rl::PPOConfig ppo_config_from_json(const Json& j, rl::PPOConfig base = {});

/// Flat parameter vectors plus the config and its fingerprint.
struct Checkpoint {
  rl::TrainState state;
  rl::PPOConfig ppo;
  RewardWeights weights;
  std::string matcher = "exact";
  std::string schema = "aloe";  // schema of the training scenarios
  std::string fingerprint;
};

std::string fingerprint(const rl::PPOConfig& ppo, const RewardWeights& weights, const std::string& matcher);
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::filesystem::path& path);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace dialign::io
