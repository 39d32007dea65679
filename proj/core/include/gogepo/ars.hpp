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

#pragma once

// Augmented Random Search (V2-t) in policy parameter space: antithetic
// Gaussian perturbations, shared observation normalization, top-b
// directions, step normalized by the standard deviation of the elite
// rewards.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "gogepo/config.hpp"
#include "gogepo/csv_log.hpp"
#include "gogepo/envs.hpp"
#include "gogepo/policy.hpp"
#include "gogepo/rng.hpp"
#include "gogepo/running_stat.hpp"

namespace gogepo {

/// theta + step / (elite * sigma_R) * sum_i (r+_i - r-_i) delta_i over the
/// `elite` directions with the largest max(r+_i, r-_i); sigma_R is the
/// population std of those 2*elite rewards, floored at 1e-8.
Vector ars_update(const Vector& theta, std::span<const Vector> deltas,
                  std::span<const double> rewards_plus, std::span<const double> rewards_minus,
                  double step_size, int elite);

struct ArsState {
  ArsConfig config;
  Environment env;
  PolicyParams policy;
  RunningStat obs_stat;
  std::int64_t interactions = 0;
  std::int64_t episodes = 0;
  std::int64_t next_eval = 0;
  double best_return = 0.0;
  bool any_return = false;
  Rng direction_rng;
  Rng env_rng;
  Rng eval_rng;
  std::vector<LogRow> log;
};

ArsState init_ars(const ArsConfig& config);

/// One update: N antithetic direction pairs rolled out (stats updated),
/// then ars_update.
void ars_iteration(ArsState& state);

/// Iterates until the budget is spent, logging an evaluation of the current
/// policy at every eval_interval boundary <= budget.
void run_ars(ArsState& state, const std::function<void(const LogRow&)>& on_log = {});

/// Runs ARS and writes config.txt, log.csv and policy.bin (flat policy +
/// normalization statistics in the checkpoint container) into out_dir.
ArsState ars_train(const ArsConfig& config, const std::filesystem::path& out_dir);

}  // namespace gogepo
