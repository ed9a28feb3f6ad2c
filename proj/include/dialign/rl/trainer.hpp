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
#include <functional>
#include <vector>

#include "dialign/env.hpp"
#include "dialign/rl/policy.hpp"
#include "dialign/rl/ppo.hpp"
#include "dialign/user_sim.hpp"

namespace dialign::rl {

struct TrainOptions {
  PPOConfig ppo;
  RewardWeights weights;
  SlotMatcher matcher = SlotMatcher::exact();
};

/// One row of the reward curve. Rewards are per-turn means over the round.
struct CurveRow {
  int step = 0;
  double mean_total_reward = 0.0;  // combined reward under the training weights
  double mean_profile_reward = 0.0;
  double mean_response_reward = 0.0;
  double clip_fraction = 0.0;
  double value_loss = 0.0;
};

struct TrainState {
  Policy policy;
  ValueFunction value;
  int step = 0;           // completed collection rounds
  std::int64_t updates = 0;  // gradient steps taken
};

struct TrainResult {
  TrainState state;
  std::vector<CurveRow> curve;
};

/// Runs episodes for every (scenario, sample) pair in parallel. Episode k of
/// scenario s is seeded with derive_seed(seed, round, s, k), so results do
/// not depend on the worker count.
std::vector<EpisodeRecord> collect(const Agent& agent, const std::vector<UserConfig>& scenarios,
                                   const EnvOptions& env, int samples_per_scenario, std::uint64_t seed,
                                   std::uint64_t round, int workers);

/// Called after every round with the state and the new curve row.
using RoundCallback = std::function<void(const TrainState&, const CurveRow&)>;

/// PPO loop: collect, advantages, update, log. Starts from state.step so a
/// resumed run reproduces the uninterrupted one.
TrainResult train(const TrainOptions& options, const std::vector<UserConfig>& scenarios, TrainState state = {},
                  const RoundCallback& on_round = {});

/// Scenarios with horizon set to the training round count.
std::vector<UserConfig> with_horizon(std::vector<UserConfig> scenarios, int horizon);

}  // namespace dialign::rl
