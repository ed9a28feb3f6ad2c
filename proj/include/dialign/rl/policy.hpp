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

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "dialign/dialogue.hpp"
#include "dialign/env.hpp"
#include "dialign/error.hpp"
#include "dialign/rl/advantage.hpp"
#include "dialign/rng.hpp"

namespace dialign::rl {

namespace detail {

template <typename Scalar>
Scalar softplus(Scalar x) {
  using std::exp;
  using std::log1p;
  using std::abs;
  return std::max(x, Scalar(0)) + log1p(exp(-abs(x)));
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  using std::exp;
  return x >= 0 ? Scalar(1) / (Scalar(1) + exp(-x)) : exp(x) / (Scalar(1) + exp(x));
}

}  // namespace detail

/// Read-only view over an observation vector laid out as in dialign::observe.
template <typename Scalar>
struct ObservationView {
  explicit ObservationView(const Vector<Scalar>& obs) : obs(obs), slots((obs.size() - 2) / 2) {
    if (obs.size() < 2 || (obs.size() - 2) % 2 != 0)
      throw ValidationError("observation length " + std::to_string(obs.size()) + " is not 2S + 2");
  }
  bool seen(Eigen::Index i) const { return obs(i) > Scalar(0.5); }
  Scalar topic(Eigen::Index i) const { return obs(slots + i); }
  Scalar has_topic() const { return obs(2 * slots); }
  Scalar turn_fraction() const { return obs(2 * slots + 1); }

  const Vector<Scalar>& obs;
  Eigen::Index slots;
};

/// Factored categorical policy over structured actions with weights shared
/// across slots, so one parameter vector serves any schema size.
///
///   inclusion of seen slot i:  Bernoulli(sigmoid(b_inc + w_inc * topic_i))
///   response slot:             softmax over {none} U seen slots, with scores
///                              b_slot + w_slot * topic_j  (slot j)
///                              b_none + w_none * has_topic (none)
///   engagement:                Bernoulli(sigmoid(b_eng + w_eng * t / T))
///
/// Slots without evidence are masked out of both the inclusion and the
/// response factors.
template <typename Scalar>
class FactoredPolicy {
 public:
  enum Param : Eigen::Index {
    kIncBias = 0, kIncTopic, kSlotBias, kSlotTopic, kNoneBias, kNoneTopic, kEngBias, kEngTurn, kNumParams
  };
  using ParamVector = Vector<Scalar>;

  FactoredPolicy() : theta_(ParamVector::Zero(kNumParams)) {}
  explicit FactoredPolicy(ParamVector theta) : theta_(std::move(theta)) {
    if (theta_.size() != kNumParams) throw ValidationError("policy expects " + std::to_string(kNumParams) + " parameters");
  }

  const ParamVector& parameters() const { return theta_; }
  ParamVector& parameters() { return theta_; }

  /// Log-probability of a choice; fills grad with d/dtheta when non-null.
  Scalar log_prob(const Vector<Scalar>& obs, const FactoredChoice& choice, ParamVector* grad = nullptr) const {
    const ObservationView<Scalar> view(obs);
    if (static_cast<Eigen::Index>(choice.include.size()) != view.slots)
      throw ValidationError("choice/observation slot count mismatch");
    if (grad) *grad = ParamVector::Zero(kNumParams);
    Scalar lp = 0;

    for (Eigen::Index i = 0; i < view.slots; ++i) {
      const bool inc = choice.include[static_cast<std::size_t>(i)] != 0;
      if (!view.seen(i)) {
        if (inc) throw ValidationError("choice includes a slot without evidence");
        continue;
      }
      const Scalar z = theta_(kIncBias) + theta_(kIncTopic) * view.topic(i);
      lp -= detail::softplus(inc ? -z : z);
      if (grad) {
        const Scalar g = (inc ? Scalar(1) : Scalar(0)) - detail::sigmoid(z);
        (*grad)(kIncBias) += g;
        (*grad)(kIncTopic) += g * view.topic(i);
      }
    }

    // Response slot: option 0 is "none", option j + 1 is slot j.
    if (choice.selection > static_cast<std::size_t>(view.slots) ||
        (choice.selection > 0 && !view.seen(static_cast<Eigen::Index>(choice.selection) - 1)))
      throw ValidationError("response selection is masked out");
    const auto scores = selection_scores(view);
    Scalar max_score = scores(0);
    for (Eigen::Index j = 1; j < scores.size(); ++j)
      if (std::isfinite(scores(j))) max_score = std::max(max_score, scores(j));
    Scalar norm = 0;
    for (Eigen::Index j = 0; j < scores.size(); ++j)
      if (std::isfinite(scores(j))) norm += std::exp(scores(j) - max_score);
    const Scalar log_norm = max_score + std::log(norm);
    lp += scores(static_cast<Eigen::Index>(choice.selection)) - log_norm;
    if (grad) {
      const auto chosen = static_cast<Eigen::Index>(choice.selection);
      for (Eigen::Index j = 0; j < scores.size(); ++j) {
        if (!std::isfinite(scores(j))) continue;
        const Scalar weight = (j == chosen ? Scalar(1) : Scalar(0)) - std::exp(scores(j) - log_norm);
        if (j == 0) {
          (*grad)(kNoneBias) += weight;
          (*grad)(kNoneTopic) += weight * view.has_topic();
        } else {
          (*grad)(kSlotBias) += weight;
          (*grad)(kSlotTopic) += weight * view.topic(j - 1);
        }
      }
    }

    const Scalar ze = theta_(kEngBias) + theta_(kEngTurn) * view.turn_fraction();
    lp -= detail::softplus(choice.engage ? -ze : ze);
    if (grad) {
      const Scalar g = (choice.engage ? Scalar(1) : Scalar(0)) - detail::sigmoid(ze);
      (*grad)(kEngBias) += g;
      (*grad)(kEngTurn) += g * view.turn_fraction();
    }
    return lp;
  }

  FactoredChoice sample(const Vector<Scalar>& obs, Rng& rng) const { return draw(obs, &rng); }
  FactoredChoice greedy(const Vector<Scalar>& obs) const { return draw(obs, nullptr); }

 private:
  Vector<Scalar> selection_scores(const ObservationView<Scalar>& view) const {
    Vector<Scalar> scores(view.slots + 1);
    scores(0) = theta_(kNoneBias) + theta_(kNoneTopic) * view.has_topic();
    for (Eigen::Index j = 0; j < view.slots; ++j)
      scores(j + 1) = view.seen(j) ? theta_(kSlotBias) + theta_(kSlotTopic) * view.topic(j)
                                   : -std::numeric_limits<Scalar>::infinity();
    return scores;
  }

  // Samples when rng is set, otherwise takes the mode of every factor.
  FactoredChoice draw(const Vector<Scalar>& obs, Rng* rng) const {
    const ObservationView<Scalar> view(obs);
    FactoredChoice choice{std::vector<std::uint8_t>(static_cast<std::size_t>(view.slots), 0), 0, false};
    auto bernoulli = [&](Scalar z) {
      const double p = static_cast<double>(detail::sigmoid(z));
      return rng ? uniform01(*rng) < p : p > 0.5;
    };
    for (Eigen::Index i = 0; i < view.slots; ++i)
      if (view.seen(i))
        choice.include[static_cast<std::size_t>(i)] =
            bernoulli(theta_(kIncBias) + theta_(kIncTopic) * view.topic(i));

    const auto scores = selection_scores(view);
    const Scalar max_score = scores.maxCoeff();
    Vector<Scalar> probs = (scores.array() - max_score).exp().matrix();
    probs /= probs.sum();
    if (rng) {
      double u = uniform01(*rng);
      choice.selection = 0;
      for (Eigen::Index j = 0; j < probs.size(); ++j) {
        if (probs(j) <= 0) continue;
        choice.selection = static_cast<std::size_t>(j);
        u -= static_cast<double>(probs(j));
        if (u < 0) break;
      }
    } else {
      Eigen::Index best = 0;
      probs.maxCoeff(&best);
      choice.selection = static_cast<std::size_t>(best);
    }
    choice.engage = bernoulli(theta_(kEngBias) + theta_(kEngTurn) * view.turn_fraction());
    return choice;
  }

  ParamVector theta_;
};

/// V(s) = w . [1, seen fraction, t / T, topic known].
template <typename Scalar>
class LinearValueFunction {
 public:
  static constexpr Eigen::Index kNumParams = 4;
  using ParamVector = Vector<Scalar>;

  LinearValueFunction() : weights_(ParamVector::Zero(kNumParams)) {}
  explicit LinearValueFunction(ParamVector weights) : weights_(std::move(weights)) {
    if (weights_.size() != kNumParams) throw ValidationError("value function expects 4 parameters");
  }

  static ParamVector features(const Vector<Scalar>& obs) {
    const ObservationView<Scalar> view(obs);
    Scalar seen = 0, topic_known = 0;
    for (Eigen::Index i = 0; i < view.slots; ++i) {
      seen += view.seen(i) ? Scalar(1) : Scalar(0);
      topic_known += view.seen(i) ? view.topic(i) : Scalar(0);
    }
    ParamVector phi(kNumParams);
    phi << Scalar(1), view.slots > 0 ? seen / Scalar(view.slots) : Scalar(0), view.turn_fraction(), topic_known;
    return phi;
  }

  Scalar operator()(const Vector<Scalar>& obs) const { return weights_.dot(features(obs)); }

  const ParamVector& parameters() const { return weights_; }
  ParamVector& parameters() { return weights_; }

 private:
  ParamVector weights_;
};

using Policy = FactoredPolicy<double>;
using ValueFunction = LinearValueFunction<double>;

/// Acts with a parameter snapshot; safe to share across rollout workers.
class PolicyAgent : public Agent {
 public:
  PolicyAgent(const Policy& policy, const ValueFunction& value, bool greedy = false)
      : policy_(policy), value_(value), greedy_(greedy) {}

  AgentStep act(const DialogueState& state, int horizon, Rng& rng) const override {
    AgentStep step;
    step.observation = observe(state, horizon);
    step.choice = greedy_ ? policy_.greedy(step.observation) : policy_.sample(step.observation, rng);
    step.log_prob = policy_.log_prob(step.observation, step.choice);
    step.value = value_(step.observation);
    step.action = realize(state, step.choice);
    return step;
  }

 private:
  const Policy& policy_;
  const ValueFunction& value_;
  bool greedy_;
};

}  // namespace dialign::rl
