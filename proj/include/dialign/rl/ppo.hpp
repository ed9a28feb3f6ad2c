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

#include <Eigen/Dense>

#include "dialign/dialogue.hpp"
#include "dialign/env.hpp"
#include "dialign/rl/policy.hpp"

namespace dialign::rl {

struct PPOConfig {
  double clip_epsilon = 0.2;
  double gamma = 1.0;
  double lambda = 0.95;
  double actor_lr = 1e-2;
  double critic_lr = 1e-1;
  int samples_per_scenario = 4;
  int max_rounds = 10;  // dialogue turns per training episode
  int epochs = 1;       // gradient steps per collection round
  int iterations = 100; // collection rounds
  double max_log_ratio = 20.0;
  int workers = 0;      // 0 = hardware concurrency
  int checkpoint_every = 0;
  std::uint64_t seed = 0;

  /// Throws ConfigError on out-of-range settings.
  void validate() const;
};

/// One episode in PPO form. log_probs are frozen at collection time.
struct Trajectory {
  std::vector<Eigen::VectorXd> observations;
  std::vector<FactoredChoice> choices;
  Eigen::VectorXd log_probs;
  Eigen::VectorXd values;
  Eigen::VectorXd rewards;
  double gamma = 1.0;
  double lambda = 0.95;

  static Trajectory from_episode(const EpisodeRecord& episode, double lambda);
  void validate() const;
  Eigen::Index size() const { return rewards.size(); }
};

/// Trajectory advantages by GAE. Throws ValidationError on length mismatch.
Eigen::VectorXd compute_gae(const Trajectory& traj);

/// Flattened training batch.
struct PreparedBatch {
  std::vector<const Eigen::VectorXd*> observations;
  std::vector<const FactoredChoice*> choices;
  Eigen::VectorXd old_log_probs;
  Eigen::VectorXd advantages;  // normalized to zero mean, unit variance
  Eigen::VectorXd returns;     // raw advantage + V_old, the critic target
  double mean_episode_return = 0.0;
};

PreparedBatch prepare_batch(const std::vector<Trajectory>& batch);

struct SurrogateEval {
  double mean_surrogate = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;  // diagnostic only
  Eigen::VectorXd gradient;
};

SurrogateEval evaluate_surrogate(const Policy& policy, const PreparedBatch& batch, double epsilon,
                                 double max_log_ratio = 20.0);

struct EpochStats {
  double mean_surrogate = 0.0;
  double clip_fraction = 0.0;
  double value_loss = 0.0;
  double approx_kl = 0.0;
};

struct UpdateStats {
  std::vector<EpochStats> epochs;  // measured before each gradient step
  double mean_return = 0.0;

  double mean_clip_fraction() const;
  double mean_value_loss() const;
};

/// cfg.epochs full-batch steps: ascent on the clipped surrogate for the
/// policy, descent on mean squared return error for the value function.
/// Throws NumericalError if a gradient goes non-finite.
UpdateStats update(Policy& policy, ValueFunction& value_fn, const std::vector<Trajectory>& batch,
                   const PPOConfig& cfg);

}  // namespace dialign::rl
