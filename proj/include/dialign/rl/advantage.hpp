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

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "dialign/error.hpp"

namespace dialign::rl {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Generalized advantage estimation by backward recursion:
///   delta_t = R_t + gamma V(s_{t+1}) - V(s_t),  A_t = delta_t + gamma lambda A_{t+1},
/// with V(s_{T+1}) = 0 and A_{T+1} = 0.
template <typename RewardsT, typename ValuesT>
Vector<typename RewardsT::Scalar> compute_gae(const Eigen::MatrixBase<RewardsT>& rewards,
                                              const Eigen::MatrixBase<ValuesT>& values,
                                              typename RewardsT::Scalar gamma,
                                              typename RewardsT::Scalar lambda) {
  using Scalar = typename RewardsT::Scalar;
  if (rewards.size() != values.size())
    throw ValidationError("GAE: " + std::to_string(rewards.size()) + " rewards but " +
                          std::to_string(values.size()) + " values");
  const Eigen::Index n = rewards.size();
  Vector<Scalar> advantages(n);
  Scalar next_value = 0, next_adv = 0;
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const Scalar delta = rewards(t) + gamma * next_value - values(t);
    next_adv = delta + gamma * lambda * next_adv;
    advantages(t) = next_adv;
    next_value = values(t);
  }
  return advantages;
}

template <typename Scalar>
Scalar clip(Scalar ratio, Scalar epsilon) {
  return std::clamp(ratio, Scalar(1) - epsilon, Scalar(1) + epsilon);
}

/// exp(log_prob_new - log_prob_old), exponent clamped to +-max_log_ratio.
template <typename Scalar>
Scalar policy_ratio(Scalar log_prob_new, Scalar log_prob_old, Scalar max_log_ratio = Scalar(20)) {
  if (!std::isfinite(log_prob_new) || !std::isfinite(log_prob_old))
    throw NumericalError("policy ratio from non-finite log-probabilities");
  return std::exp(std::clamp(log_prob_new - log_prob_old, -max_log_ratio, max_log_ratio));
}

/// min(r A, clip(r, 1 - eps, 1 + eps) A).
template <typename Scalar>
Scalar ppo_surrogate(Scalar ratio, Scalar advantage, Scalar epsilon) {
  if (!(ratio > 0)) throw NumericalError("PPO surrogate needs a positive ratio");
  return std::min(ratio * advantage, clip(ratio, epsilon) * advantage);
}

/// True when the surrogate takes the unclipped branch, i.e. gradient flows.
template <typename Scalar>
bool surrogate_active(Scalar ratio, Scalar advantage, Scalar epsilon) {
  return advantage >= 0 ? ratio <= Scalar(1) + epsilon : ratio >= Scalar(1) - epsilon;
}

}  // namespace dialign::rl
