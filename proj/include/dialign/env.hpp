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
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dialign/dialogue.hpp"
#include "dialign/profile.hpp"
#include "dialign/reward.hpp"
#include "dialign/rng.hpp"
#include "dialign/user_sim.hpp"

namespace dialign {

struct RewardBreakdown {
  double profile = 0.0;   // F1 profile reward
  double response = 0.0; // product of the five criteria
  double total = 0.0;     // profile + response
};

struct EnvOptions {
  SlotMatcher matcher = SlotMatcher::exact();
  RewardWeights weights;
  double gamma = 1.0;
};

struct StepResult {
  RewardBreakdown reward;
  double weighted = 0.0;  // combined reward under EnvOptions::weights
  ResponseJudgment judgment;
  bool aligned = false;   // judge passes and addressed values agree with the truth
  double theoretical_max = 0.0;
  bool done = false;
};

/// The dialogue MDP for one scenario. Rewards are computed from the action at
/// turn t before the user replies.
class DialogueEnv {
 public:
  DialogueEnv(UserConfig config, EnvOptions options = {});

  const DialogueState& reset();
  StepResult step(const AgentAction& action);

  const DialogueState& state() const { return state_; }
  const UserState& user_state() const { return sim_.state(); }
  const UserConfig& config() const { return sim_.config(); }
  const EnvOptions& options() const { return options_; }
  bool done() const { return done_; }

 private:
  UserSimulator sim_;
  EnvOptions options_;
  ResponseJudge judge_;
  DialogueState state_;
  bool started_ = false;
  bool done_ = false;
};

/// Observation vector: [seen(S), topic(S), has_topic, t / horizon], with S the
/// schema slot count and slots in schema order.
Eigen::VectorXd observe(const DialogueState& state, int horizon);

/// Turns factor values into a concrete action. Only slots with evidence can
/// enter the estimate or be addressed; the estimate carries the latest stated
/// value of each included slot.
AgentAction realize(const DialogueState& state, const FactoredChoice& choice);

struct AgentStep {
  AgentAction action;
  Eigen::VectorXd observation;
  FactoredChoice choice;
  double log_prob = 0.0;
  double value = 0.0;
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual AgentStep act(const DialogueState& state, int horizon, Rng& rng) const = 0;
};

/// Copies every revealed value into its estimate, addresses the topic when it
/// knows it, and always follows up.
class EvidenceTrackingAgent : public Agent {
 public:
  AgentStep act(const DialogueState& state, int horizon, Rng& rng) const override;
};

struct TurnRecord {
  int turn = 0;
  UserUtterance user;
  AgentAction action;
  ResponseJudgment judgment;
  RewardBreakdown reward;
  double weighted = 0.0;
  bool aligned = false;
  double theoretical_max = 0.0;
  Profile truth;  // effective ground truth at this turn

  // Policy bookkeeping for PPO.
  Eigen::VectorXd observation;
  FactoredChoice choice;
  double log_prob = 0.0;
  double value = 0.0;
};

struct EpisodeRecord {
  std::string scenario_id;
  std::uint64_t seed = 0;
  double gamma = 1.0;
  RewardWeights weights;
  int horizon = 0;
  std::vector<TurnRecord> turns;

  /// sum_t gamma^(t-1) R_t over the weighted rewards.
  double discounted_return() const;
  double total_reward() const;  // undiscounted sum of profile + response
  const Profile& final_estimate() const { return turns.back().action.estimate_update; }
};

/// Plays one full episode. Sampling draws from an Rng seeded with seed.
EpisodeRecord rollout(const Agent& agent, const UserConfig& config, const EnvOptions& options, std::uint64_t seed);

}  // namespace dialign
