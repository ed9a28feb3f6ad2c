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

#include "dialign/rl/ppo.hpp"

#include <cmath>

#include "dialign/error.hpp"
#include "dialign/rl/advantage.hpp"

namespace dialign::rl {

void PPOConfig::validate() const {
  if (!(clip_epsilon > 0)) throw ConfigError("clip epsilon must be positive");
  if (!(gamma >= 0 && gamma <= 1)) throw ConfigError("gamma must lie in [0,1]");
  if (!(lambda >= 0 && lambda <= 1)) throw ConfigError("lambda must lie in [0,1]");
  if (!(actor_lr > 0) || !(critic_lr > 0)) throw ConfigError("step sizes must be positive");
  if (samples_per_scenario < 1) throw ConfigError("samples per scenario must be at least 1");
  if (max_rounds < 1) throw ConfigError("max rounds must be at least 1");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (iterations < 0) throw ConfigError("iterations must be non-negative");
  if (!(max_log_ratio > 0)) throw ConfigError("ratio clamp must be positive");
  if (workers < 0 || checkpoint_every < 0) throw ConfigError("workers and checkpoint interval must be non-negative");
}

Trajectory Trajectory::from_episode(const EpisodeRecord& episode, double lambda) {
  Trajectory traj;
  const auto n = static_cast<Eigen::Index>(episode.turns.size());
  traj.log_probs.resize(n);
  traj.values.resize(n);
  traj.rewards.resize(n);
  traj.gamma = episode.gamma;
  traj.lambda = lambda;
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto& turn = episode.turns[static_cast<std::size_t>(t)];
    traj.observations.push_back(turn.observation);
    traj.choices.push_back(turn.choice);
    traj.log_probs(t) = turn.log_prob;
    traj.values(t) = turn.value;
    traj.rewards(t) = turn.weighted;
  }
  return traj;
}

void Trajectory::validate() const {
  const auto n = rewards.size();
  if (values.size() != n || log_probs.size() != n || static_cast<Eigen::Index>(observations.size()) != n ||
      static_cast<Eigen::Index>(choices.size()) != n)
    throw ValidationError("trajectory sequences have unequal lengths");
  if (!(gamma >= 0 && gamma <= 1) || !(lambda >= 0 && lambda <= 1))
    throw ValidationError("trajectory gamma/lambda outside [0,1]");
}

Eigen::VectorXd compute_gae(const Trajectory& traj) {
  traj.validate();
  return rl::compute_gae(traj.rewards, traj.values, traj.gamma, traj.lambda);
}

PreparedBatch prepare_batch(const std::vector<Trajectory>& batch) {
  if (batch.empty()) throw ArgumentError("PPO update needs a non-empty batch");
  Eigen::Index total = 0;
  for (const auto& traj : batch) total += traj.size();
  PreparedBatch out;
  out.old_log_probs.resize(total);
  out.advantages.resize(total);
  out.returns.resize(total);
  Eigen::Index k = 0;
  double return_sum = 0.0;
  for (const auto& traj : batch) {
    const Eigen::VectorXd adv = compute_gae(traj);
    double discount = 1.0;
    for (Eigen::Index t = 0; t < traj.size(); ++t, ++k) {
      out.observations.push_back(&traj.observations[static_cast<std::size_t>(t)]);
      out.choices.push_back(&traj.choices[static_cast<std::size_t>(t)]);
      out.old_log_probs(k) = traj.log_probs(t);
      out.advantages(k) = adv(t);
      out.returns(k) = adv(t) + traj.values(t);
      return_sum += discount * traj.rewards(t);
      discount *= traj.gamma;
    }
  }
  out.mean_episode_return = return_sum / static_cast<double>(batch.size());
  if (total > 0) {
    const double mean = out.advantages.mean();
    out.advantages.array() -= mean;
    const double stddev = std::sqrt(out.advantages.squaredNorm() / static_cast<double>(total));
    if (stddev > 1e-12) out.advantages /= stddev;
  }
  return out;
}

SurrogateEval evaluate_surrogate(const Policy& policy, const PreparedBatch& batch, double epsilon,
                                 double max_log_ratio) {
  SurrogateEval out;
  out.gradient = Eigen::VectorXd::Zero(Policy::kNumParams);
  const auto n = batch.advantages.size();
  if (n == 0) return out;
  Eigen::VectorXd grad_lp;
  double clipped = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const double lp = policy.log_prob(*batch.observations[idx], *batch.choices[idx], &grad_lp);
    const double ratio = policy_ratio(lp, batch.old_log_probs(k), max_log_ratio);
    const double adv = batch.advantages(k);
    out.mean_surrogate += ppo_surrogate(ratio, adv, epsilon);
    clipped += std::abs(ratio - 1.0) > epsilon;
    out.approx_kl += batch.old_log_probs(k) - lp;
    if (surrogate_active(ratio, adv, epsilon)) out.gradient.noalias() += (adv * ratio) * grad_lp;
  }
  const auto dn = static_cast<double>(n);
  out.mean_surrogate /= dn;
  out.clip_fraction = clipped / dn;
  out.approx_kl /= dn;
  out.gradient /= dn;
  return out;
}

double UpdateStats::mean_clip_fraction() const {
  double s = 0.0;
  for (const auto& e : epochs) s += e.clip_fraction;
  return epochs.empty() ? 0.0 : s / static_cast<double>(epochs.size());
}

double UpdateStats::mean_value_loss() const {
  double s = 0.0;
  for (const auto& e : epochs) s += e.value_loss;
  return epochs.empty() ? 0.0 : s / static_cast<double>(epochs.size());
}

UpdateStats update(Policy& policy, ValueFunction& value_fn, const std::vector<Trajectory>& batch,
                   const PPOConfig& cfg) {
  cfg.validate();
  const PreparedBatch prepared = prepare_batch(batch);
  UpdateStats stats;
  stats.mean_return = prepared.mean_episode_return;
  const auto n = prepared.returns.size();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const SurrogateEval eval = evaluate_surrogate(policy, prepared, cfg.clip_epsilon, cfg.max_log_ratio);

    Eigen::VectorXd value_grad = Eigen::VectorXd::Zero(ValueFunction::kNumParams);
    double value_loss = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto& obs = *prepared.observations[static_cast<std::size_t>(k)];
      const Eigen::VectorXd phi = ValueFunction::features(obs);
      const double err = value_fn.parameters().dot(phi) - prepared.returns(k);
      value_loss += err * err;
      value_grad.noalias() += (2.0 * err) * phi;
    }
    if (n > 0) {
      value_loss /= static_cast<double>(n);
      value_grad /= static_cast<double>(n);
    }
    if (!eval.gradient.allFinite() || !value_grad.allFinite())
      throw NumericalError("non-finite gradient at epoch " + std::to_string(epoch) + " (surrogate " +
                           std::to_string(eval.mean_surrogate) + ", value loss " + std::to_string(value_loss) + ")");

    policy.parameters().noalias() += cfg.actor_lr * eval.gradient;
    value_fn.parameters().noalias() -= cfg.critic_lr * value_grad;
    stats.epochs.push_back({eval.mean_surrogate, eval.clip_fraction, value_loss, eval.approx_kl});
  }
  return stats;
}

}  // namespace dialign::rl
