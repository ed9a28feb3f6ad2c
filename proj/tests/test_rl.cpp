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

#include <doctest.h>

#include <cmath>

#include "dialign/error.hpp"
#include "dialign/rl/advantage.hpp"
#include "dialign/rl/policy.hpp"
#include "dialign/rl/ppo.hpp"
#include "dialign/rl/trainer.hpp"
#include "dialign/scenario.hpp"
#include "oracles.hpp"

using namespace dialign;
using namespace dialign::rl;

namespace {

Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = lo + (hi - lo) * uniform01(rng);
  return v;
}

// Observation with S slots: random seen flags, a topic among all slots, turn fraction.
Eigen::VectorXd random_observation(Rng& rng, Eigen::Index slots) {
  Eigen::VectorXd obs = Eigen::VectorXd::Zero(2 * slots + 2);
  for (Eigen::Index i = 0; i < slots; ++i) obs(i) = uniform01(rng) < 0.5 ? 1.0 : 0.0;
  if (uniform01(rng) < 0.8) {
    obs(slots + static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(slots)))) = 1.0;
    obs(2 * slots) = 1.0;
  }
  obs(2 * slots + 1) = uniform01(rng);
  return obs;
}

std::vector<UserConfig> scenarios(int count, std::uint64_t seed) {
  ScenarioOptions o;
  o.count = count;
  o.seed = seed;
  return generate_scenarios(o);
}

}  // namespace

TEST_SUITE("rl") {
  TEST_CASE("GAE examples") {
    const Eigen::Vector2d r(1, 1), v(0, 0);
    const auto a = compute_gae(r, v, 1.0, 1.0);
    CHECK(a(0) == 2.0);
    CHECK(a(1) == 1.0);
    CHECK(compute_gae(Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(5), 0.9, 0.95).isZero(0));

    Rng rng(1);
    const Eigen::VectorXd rewards = random_vector(rng, 8, -1, 2), values = random_vector(rng, 8, -1, 1);
    const auto td = compute_gae(rewards, values, 0.9, 0.0);
    for (Eigen::Index t = 0; t < 8; ++t) {
      const double next = t + 1 < 8 ? values(t + 1) : 0.0;
      CHECK(td(t) == rewards(t) + 0.9 * next - values(t));
    }
    CHECK_THROWS_AS(compute_gae(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(2), 1.0, 1.0), ValidationError);
    Trajectory broken;
    broken.rewards = Eigen::VectorXd::Zero(2);
    broken.values = Eigen::VectorXd::Zero(2);
    broken.log_probs = Eigen::VectorXd::Zero(1);
    CHECK_THROWS_AS(compute_gae(broken), ValidationError);
  }

  TEST_CASE("GAE with gamma = lambda = 1 is reward-to-go minus baseline") {
    Rng rng(2);
    for (int i = 0; i < 100; ++i) {
      const auto n = static_cast<Eigen::Index>(1 + uniform_index(rng, 70));
      const Eigen::VectorXd rewards = random_vector(rng, n, 0, 2), values = random_vector(rng, n, -3, 3);
      const Eigen::VectorXd a = compute_gae(rewards, values, 1.0, 1.0);
      REQUIRE((a - oracle::reward_to_go_minus_baseline(rewards, values)).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }

  TEST_CASE("GAE recursion equals the explicit residual sum") {
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
      const auto n = static_cast<Eigen::Index>(1 + uniform_index(rng, 30));
      const double gamma = uniform01(rng), lambda = uniform01(rng);
      const Eigen::VectorXd rewards = random_vector(rng, n, 0, 2), values = random_vector(rng, n, -3, 3);
      const Eigen::VectorXd a = compute_gae(rewards, values, gamma, lambda);
      REQUIRE((a - oracle::gae(rewards, values, gamma, lambda)).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }

  TEST_CASE("clipped surrogate") {
    CHECK(ppo_surrogate(1.0, 0.7, 0.2) == doctest::Approx(0.7));
    CHECK(ppo_surrogate(2.0, 1.0, 0.2) == doctest::Approx(1.2));
    CHECK(ppo_surrogate(0.5, -1.0, 0.2) == doctest::Approx(-0.8));
    CHECK_THROWS_AS(ppo_surrogate(0.0, 1.0, 0.2), NumericalError);
    CHECK_THROWS_AS(ppo_surrogate(-1.0, 1.0, 0.2), NumericalError);
    Rng rng(4);
    for (int i = 0; i < 10000; ++i) {
      const double r = 0.01 + 3 * uniform01(rng), a = -5 + 10 * uniform01(rng), eps = 0.01 + 0.5 * uniform01(rng);
      REQUIRE(ppo_surrogate(r, a, eps) <= r * a);
      const double c = clip(r, eps);
      REQUIRE(c >= 1 - eps);
      REQUIRE(c <= 1 + eps);
    }
  }

  TEST_CASE("policy ratio") {
    CHECK(policy_ratio(-1.3, -1.3) == 1.0);
    CHECK(policy_ratio(-1.0, -2.0) == doctest::Approx(std::exp(1.0)));
    CHECK(policy_ratio(-3.0, -1.0) == doctest::Approx(0.1353352832));
    CHECK(policy_ratio(500.0, -500.0, 20.0) == doctest::Approx(std::exp(20.0)));
    CHECK(std::isfinite(policy_ratio(-1e6, 0.0, 20.0)));
    CHECK_THROWS_AS(policy_ratio(std::nan(""), 0.0), NumericalError);
  }

  TEST_CASE("analytic log-prob gradients match central differences") {
    Rng rng(5);
    int probes = 0;
    while (probes < 100) {
      const auto slots = static_cast<Eigen::Index>(1 + uniform_index(rng, 10));
      const Eigen::VectorXd obs = random_observation(rng, slots);
      const Eigen::VectorXd theta = random_vector(rng, Policy::kNumParams, -2, 2);
      const Policy policy(theta);
      const FactoredChoice choice = policy.sample(obs, rng);
      Eigen::VectorXd analytic;
      policy.log_prob(obs, choice, &analytic);
      const auto numeric = oracle::central_difference(
          [&](const Eigen::VectorXd& th) { return Policy(th).log_prob(obs, choice); }, theta, 1e-5);
      const double scale = std::max(analytic.norm(), numeric.norm());
      if (scale < 1e-8) continue;
      REQUIRE((analytic - numeric).norm() / scale <= 1e-4);
      ++probes;
    }
  }

  TEST_CASE("action probabilities are normalized over every factor") {
    Rng rng(6);
    for (int i = 0; i < 20; ++i) {
      const Eigen::Index slots = 3;
      const Eigen::VectorXd obs = random_observation(rng, slots);
      const Policy policy(random_vector(rng, Policy::kNumParams, -2, 2));
      double total = 0.0;
      for (int inc = 0; inc < 8; ++inc) {
        FactoredChoice c{{std::uint8_t(inc & 1), std::uint8_t((inc >> 1) & 1), std::uint8_t((inc >> 2) & 1)}, 0,
                         false};
        bool allowed = true;
        for (Eigen::Index s = 0; s < slots; ++s) allowed &= obs(s) > 0.5 || c.include[std::size_t(s)] == 0;
        if (!allowed) continue;
        for (std::size_t sel = 0; sel <= 3; ++sel) {
          if (sel > 0 && obs(Eigen::Index(sel) - 1) < 0.5) continue;
          for (bool engage : {false, true}) {
            c.selection = sel;
            c.engage = engage;
            const double lp = policy.log_prob(obs, c);
            REQUIRE(std::isfinite(lp));
            total += std::exp(lp);
          }
        }
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("masked choices are rejected") {
    const Policy policy;
    Eigen::VectorXd obs = Eigen::VectorXd::Zero(6);  // two slots, nothing seen
    CHECK_THROWS_AS(policy.log_prob(obs, FactoredChoice{{1, 0}, 0, true}), ValidationError);
    CHECK_THROWS_AS(policy.log_prob(obs, FactoredChoice{{0, 0}, 1, true}), ValidationError);
    CHECK_THROWS_AS(policy.log_prob(obs, FactoredChoice{{0}, 0, true}), ValidationError);
    CHECK_THROWS_AS(Policy(Eigen::VectorXd::Zero(3)), ValidationError);
  }

  TEST_CASE("every ratio is one right after collection") {
    const Policy policy(Eigen::VectorXd::LinSpaced(Policy::kNumParams, -1, 1));
    const ValueFunction value(Eigen::Vector4d(0.1, 0.2, 0.3, 0.4));
    const PolicyAgent agent(policy, value);
    const auto episodes = collect(agent, scenarios(4, 1), {}, 2, 9, 0, 2);
    std::vector<Trajectory> batch;
    for (const auto& ep : episodes) batch.push_back(Trajectory::from_episode(ep, 0.95));
    const auto prepared = prepare_batch(batch);
    for (Eigen::Index k = 0; k < prepared.old_log_probs.size(); ++k) {
      const double lp = policy.log_prob(*prepared.observations[std::size_t(k)], *prepared.choices[std::size_t(k)]);
      REQUIRE(std::abs(policy_ratio(lp, prepared.old_log_probs(k)) - 1.0) <= 1e-12);
    }
    const auto eval = evaluate_surrogate(policy, prepared, 0.2);
    CHECK(eval.clip_fraction == 0.0);
    CHECK(std::abs(prepared.advantages.mean()) < 1e-12);
  }

  TEST_CASE("update behaviour") {
    const auto train_set = scenarios(2, 2);
    Policy policy(Eigen::VectorXd::Constant(Policy::kNumParams, 0.1));
    ValueFunction value;
    const PolicyAgent agent(policy, value);
    const auto episodes = collect(agent, train_set, {}, 1, 3, 0, 1);

    SUBCASE("zero advantages leave the policy unchanged") {
      std::vector<Trajectory> batch = {Trajectory::from_episode(episodes[0], 1.0)};
      batch[0].rewards.setZero();
      batch[0].values.setZero();
      Policy p = policy;
      ValueFunction v = value;
      update(p, v, batch, PPOConfig{});
      CHECK(p.parameters() == policy.parameters());
    }
    SUBCASE("a small step does not lower the surrogate") {
      const std::vector<Trajectory> batch = {Trajectory::from_episode(episodes[0], 0.95)};
      const auto prepared = prepare_batch(batch);
      const double before = evaluate_surrogate(policy, prepared, 0.2).mean_surrogate;
      Policy p = policy;
      ValueFunction v = value;
      PPOConfig cfg;
      cfg.actor_lr = 1e-4;
      const auto stats = update(p, v, batch, cfg);
      CHECK(stats.epochs.front().clip_fraction == 0.0);
      CHECK(evaluate_surrogate(p, prepared, 0.2).mean_surrogate >= before);
    }
    SUBCASE("non-finite rewards abort the update") {
      std::vector<Trajectory> batch = {Trajectory::from_episode(episodes[0], 0.95)};
      batch[0].rewards(0) = std::numeric_limits<double>::infinity();
      Policy p = policy;
      ValueFunction v = value;
      CHECK_THROWS_AS(update(p, v, batch, PPOConfig{}), NumericalError);
    }
    CHECK_THROWS_AS(prepare_batch({}), ArgumentError);
  }

  TEST_CASE("config validation") {
    PPOConfig cfg;
    cfg.clip_epsilon = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.lambda = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.actor_lr = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_NOTHROW(PPOConfig{}.validate());
  }

  TEST_CASE("collection does not depend on the worker count") {
    const Policy policy(Eigen::VectorXd::Constant(Policy::kNumParams, -0.2));
    const ValueFunction value;
    const PolicyAgent agent(policy, value);
    const auto set = scenarios(3, 4);
    const auto one = collect(agent, set, {}, 3, 11, 2, 1);
    const auto four = collect(agent, set, {}, 3, 11, 2, 4);
    REQUIRE(one.size() == four.size());
    for (std::size_t i = 0; i < one.size(); ++i)
      for (std::size_t t = 0; t < one[i].turns.size(); ++t) {
        CHECK(one[i].turns[t].choice == four[i].turns[t].choice);
        CHECK(one[i].turns[t].weighted == four[i].turns[t].weighted);
      }
  }

  TEST_CASE("seeded training is reproducible and resumable") {
    TrainOptions opts;
    opts.ppo.iterations = 6;
    opts.ppo.samples_per_scenario = 2;
    opts.ppo.seed = 13;
    const auto set = scenarios(4, 5);
    const auto a = train(opts, set), b = train(opts, set);
    REQUIRE(a.curve.size() == 6);
    for (std::size_t i = 0; i < a.curve.size(); ++i) {
      CHECK(a.curve[i].step == static_cast<int>(i) + 1);
      CHECK(a.curve[i].mean_total_reward == b.curve[i].mean_total_reward);
      CHECK(a.curve[i].value_loss == b.curve[i].value_loss);
    }
    CHECK(a.state.policy.parameters() == b.state.policy.parameters());
    CHECK(a.state.updates == 6);

    auto half = opts;
    half.ppo.iterations = 3;
    const auto first = train(half, set);
    const auto second = train(half, set, first.state);
    CHECK(second.curve.front().step == 4);
    CHECK(second.state.policy.parameters() == a.state.policy.parameters());
    CHECK(second.state.value.parameters() == a.state.value.parameters());
    CHECK(second.curve.back().mean_total_reward == a.curve.back().mean_total_reward);
  }

  TEST_CASE("profile-only weights optimize the profile reward") {
    TrainOptions opts;
    opts.weights = {1, 0};
    opts.ppo.iterations = 60;
    opts.ppo.epochs = 4;
    opts.ppo.seed = 3;
    const auto result = train(opts, scenarios(8, 6));
    for (const auto& row : result.curve) CHECK(row.mean_total_reward == doctest::Approx(row.mean_profile_reward));
    double early = 0, late = 0;
    for (int i = 0; i < 10; ++i) {
      early += result.curve[std::size_t(i)].mean_profile_reward;
      late += result.curve[result.curve.size() - 1 - std::size_t(i)].mean_profile_reward;
    }
    CHECK(late > early);
    CHECK_THROWS_AS(train(opts, {}), ArgumentError);
  }
}
