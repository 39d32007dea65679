// Copyright 2026 The GoGePo Authors
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

#include "gogepo/ars.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "gogepo/checkpoint.hpp"

namespace gogepo {

Vector ars_update(const Vector& theta, std::span<const Vector> deltas,
                  std::span<const double> rewards_plus, std::span<const double> rewards_minus,
                  double step_size, int elite) {
  const std::size_t n = deltas.size();
  if (rewards_plus.size() != n || rewards_minus.size() != n) {
    throw std::invalid_argument("ars_update: deltas and rewards differ in length");
  }
  if (elite < 1 || static_cast<std::size_t>(elite) > n) {
    throw std::invalid_argument("ars_update: elite directions must be between 1 and " +
                                std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::max(rewards_plus[a], rewards_minus[a]) > std::max(rewards_plus[b], rewards_minus[b]);
  });
  order.resize(static_cast<std::size_t>(elite));

  double mean = 0.0;
  for (std::size_t i : order) mean += rewards_plus[i] + rewards_minus[i];
  mean /= 2.0 * elite;
  double var = 0.0;
  for (std::size_t i : order) {
    var += (rewards_plus[i] - mean) * (rewards_plus[i] - mean);
    var += (rewards_minus[i] - mean) * (rewards_minus[i] - mean);
  }
  const double sigma = std::max(std::sqrt(var / (2.0 * elite)), 1e-8);

  Vector step = Vector::Zero(theta.size());
  for (std::size_t i : order) {
    if (deltas[i].size() != theta.size()) {
      throw std::invalid_argument("ars_update: direction size differs from the policy");
    }
    step += (rewards_plus[i] - rewards_minus[i]) * deltas[i];
  }
  return theta + (step_size / (elite * sigma)) * step;
}

ArsState init_ars(const ArsConfig& config) {
  config.validate();
  ArsState s{.config = config,
             .env = Environment::make(config.env),
             .policy = {},
             .obs_stat = {},
             .interactions = 0,
             .episodes = 0,
             .next_eval = config.eval_interval,
             .best_return = 0.0,
             .any_return = false,
             .direction_rng = make_stream(config.seed, Stream::kDirections),
             .env_rng = make_stream(config.seed, Stream::kEnv),
             .eval_rng = make_stream(config.seed, Stream::kEval),
             .log = {}};
  const EnvSpec& spec = s.env.spec();
  Rng init = make_stream(config.seed, Stream::kInit);
  s.policy = init_policy({spec.obs_dim, spec.act_dim, config.hidden, config.output_activation},
                         config.slice, init);
  s.obs_stat = RunningStat(spec.obs_dim);
  return s;
}

void ars_iteration(ArsState& s) {
  const ArsConfig& c = s.config;
  const PolicyShape shape = s.policy.shape();
  const Vector theta = s.policy.flatten();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> deltas(static_cast<std::size_t>(c.directions));
  std::vector<double> plus(deltas.size());
  std::vector<double> minus(deltas.size());
  for (auto& d : deltas) {
    d.resize(theta.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = normal(s.direction_rng);
  }
  auto run = [&](const Vector& params) {
    const RolloutResult r =
        rollout(s.env, PolicyParams::unflatten(params, shape), s.obs_stat, s.env_rng, true);
    s.interactions += r.steps;
    ++s.episodes;
    if (!s.any_return || r.ret > s.best_return) s.best_return = r.ret;
    s.any_return = true;
    return r.ret;
  };
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    plus[i] = run(theta + c.noise * deltas[i]);
    minus[i] = run(theta - c.noise * deltas[i]);
  }
  s.policy = PolicyParams::unflatten(
      ars_update(theta, deltas, plus, minus, c.step_size, c.elite_directions), shape);
}

void run_ars(ArsState& s, const std::function<void(const LogRow&)>& on_log) {
  const ArsConfig& c = s.config;
  while (s.interactions < c.budget) {
    ars_iteration(s);
    while (s.next_eval <= c.budget && s.interactions >= s.next_eval) {
      const EvaluationResult ev =
          evaluate_policy(s.env, s.policy, s.obs_stat, c.eval_episodes, s.eval_rng);
      LogRow row;
      row.interactions = s.next_eval;
      row.episode = s.episodes;
      row.eval_return_mean = ev.mean;
      row.eval_return_std = ev.stddev;
      row.best_buffer_return = s.best_return;
      s.log.push_back(row);
      if (on_log) on_log(row);
      s.next_eval += c.eval_interval;
    }
  }
}

ArsState ars_train(const ArsConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream os(out_dir / "config.txt");
    if (!os) throw std::runtime_error("cannot write " + (out_dir / "config.txt").string());
    os << config.to_text();
  }
  ArsState s = init_ars(config);
  run_ars(s);
  write_log_csv(out_dir / "log.csv", s.log);
  Checkpoint ck;
  ck.metadata["kind"] = "ars";
  ck.metadata["config"] = config.to_text();
  ck.metadata["env"] = config.env;
  ck.metadata["interactions"] = std::to_string(s.interactions);
  ck.metadata["policy.hidden"] = std::to_string(config.hidden);
  ck.arrays.add("policy/flat", Matrix(s.policy.flatten().transpose()));
  store_running_stat(ck, s.obs_stat);
  save_checkpoint(out_dir / "policy.bin", ck);
  return s;
}

}  // namespace gogepo
