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

#include "dialign/rl/trainer.hpp"

#include <algorithm>
#include <thread>

#include "dialign/error.hpp"

namespace dialign::rl {

std::vector<EpisodeRecord> collect(const Agent& agent, const std::vector<UserConfig>& scenarios,
                                   const EnvOptions& env, int samples_per_scenario, std::uint64_t seed,
                                   std::uint64_t round, int workers) {
  const std::size_t per = static_cast<std::size_t>(samples_per_scenario);
  const std::size_t total = scenarios.size() * per;
  std::vector<EpisodeRecord> episodes(total);
  auto run = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < total; i += stride) {
      const std::size_t s = i / per, k = i % per;
      episodes[i] = rollout(agent, scenarios[s], env, derive_seed(seed, round, s, k));
    }
  };
  std::size_t n_workers = workers > 0 ? static_cast<std::size_t>(workers)
                                      : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  n_workers = std::min(n_workers, std::max<std::size_t>(total, 1));
  if (n_workers <= 1) {
    run(0, 1);
    return episodes;
  }
  std::vector<std::exception_ptr> errors(n_workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w)
      pool.emplace_back([&, w] {
        try {
          run(w, n_workers);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return episodes;
}

std::vector<UserConfig> with_horizon(std::vector<UserConfig> scenarios, int horizon) {
  for (auto& s : scenarios) {
    s.horizon = horizon;
    if (s.conflict && s.conflict->turn > horizon) s.conflict.reset();
  }
  return scenarios;
}

TrainResult train(const TrainOptions& options, const std::vector<UserConfig>& scenarios, TrainState state,
                  const RoundCallback& on_round) {
  options.ppo.validate();
  if (scenarios.empty()) throw ArgumentError("training needs at least one scenario");
  const auto episodes_cfg = with_horizon(scenarios, options.ppo.max_rounds);
  const EnvOptions env{options.matcher, options.weights, options.ppo.gamma};

  TrainResult result;
  const int last = state.step + options.ppo.iterations;
  for (int round = state.step; round < last; ++round) {
    const PolicyAgent agent(state.policy, state.value);
    const auto episodes = collect(agent, episodes_cfg, env, options.ppo.samples_per_scenario, options.ppo.seed,
                                  static_cast<std::uint64_t>(round), options.ppo.workers);

    CurveRow row;
    std::vector<Trajectory> batch;
    batch.reserve(episodes.size());
    double turns = 0.0;
    for (const auto& ep : episodes) {
      for (const auto& t : ep.turns) {
        row.mean_total_reward += t.weighted;
        row.mean_profile_reward += t.reward.profile;
        row.mean_response_reward += t.reward.response;
      }
      turns += static_cast<double>(ep.turns.size());
      batch.push_back(Trajectory::from_episode(ep, options.ppo.lambda));
    }
    row.mean_total_reward /= turns;
    row.mean_profile_reward /= turns;
    row.mean_response_reward /= turns;

    const UpdateStats stats = update(state.policy, state.value, batch, options.ppo);
    state.step = round + 1;
    state.updates += static_cast<std::int64_t>(stats.epochs.size());
    row.step = state.step;
    row.clip_fraction = stats.mean_clip_fraction();
    row.value_loss = stats.mean_value_loss();
    result.curve.push_back(row);
    if (on_round) on_round(state, row);
  }
  result.state = std::move(state);
  return result;
}

}  // namespace dialign::rl
