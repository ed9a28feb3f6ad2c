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

#include <cstdint>
#include <vector>

#include "dialign/profile.hpp"
#include "dialign/rng.hpp"
#include "dialign/user_sim.hpp"

namespace dialign {

inline constexpr int k_default_scenario_count = 74;

struct ScenarioOptions {
  int count = k_default_scenario_count;
  int horizon = 10;
  bool open_schema = false;  // draw slot names from the open pools instead of the closed schema
  int open_slots = 10;
  bool with_conflict = false;
  int conflict_turn = 6;
  std::uint64_t seed = 0;
};

/// A profile with one pool value per slot. Open profiles pick open_slots
/// slot names at random.
Profile generate_profile(bool open_schema, int open_slots, Rng& rng);

/// Replaces the first slot the user will reveal with a pool value that shares
/// no tokens with the original when one exists.
ConflictSpec default_conflict(const UserConfig& config, int turn, std::uint64_t seed);

/// Scenario i depends only on (seed, i).
std::vector<UserConfig> generate_scenarios(const ScenarioOptions& options);

}  // namespace dialign
