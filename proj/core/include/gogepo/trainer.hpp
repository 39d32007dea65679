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

// Training loop for the return-conditioned generator.
//
// Each iteration samples one policy for the current command, runs one
// episode, stores (return, policy), fits the evaluator on recency-weighted
// replay batches, fits the generator to the evaluator, and finally moves the
// command to (best return so far + drive).

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gogepo/adam.hpp"
#include "gogepo/checkpoint.hpp"
#include "gogepo/config.hpp"
#include "gogepo/csv_log.hpp"
#include "gogepo/envs.hpp"
#include "gogepo/evaluator.hpp"
#include "gogepo/generator.hpp"
#include "gogepo/replay_buffer.hpp"
#include "gogepo/rng.hpp"
#include "gogepo/running_stat.hpp"

namespace gogepo {

/// Raised when a loss turns non-finite; the message carries the episode,
/// command and losses at the time.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainerState {
  TrainingConfig config;
  Environment env;
  GeneratorParams generator;
  AdamState generator_opt;
  EvaluatorParams evaluator;
  AdamState evaluator_opt;
  ReplayBuffer buffer;
  RunningStat obs_stat;
  std::int64_t interactions = 0;
  std::int64_t episodes = 0;
  double command = 0.0;
  std::int64_t next_eval = 0;
  std::int64_t next_snapshot = 0;
  Rng noise_rng;
  Rng env_rng;
  Rng sampling_rng;
  Rng eval_rng;
  std::vector<LogRow> log;
};

struct IterationStats {
  double ret = 0.0;
  int steps = 0;
  double command = 0.0;
  double loss_v = 0.0;  // mean over this iteration's evaluator updates
  double loss_g = 0.0;  // mean over this iteration's generator updates
  int evaluator_updates = 0;
  int generator_updates = 0;
};

GeneratorConfig generator_config(const TrainingConfig& config, const EnvSpec& env);
EvaluatorConfig evaluator_config(const TrainingConfig& config, const EnvSpec& env);

/// Fresh state: initial command 0, all rng streams split from config.seed.
TrainerState init_trainer(const TrainingConfig& config);

/// 0 for an empty buffer, otherwise best stored return + drive.
double next_command(const ReplayBuffer& buffer, double drive);

/// One iteration of the loop above. Does not evaluate or log.
IterationStats train_iteration(TrainerState& state);

/// Command used for evaluation rollouts.
double evaluation_command(const TrainerState& state);

/// Deterministic generated policy for evaluation_command(), rolled out
/// config.eval_episodes times with frozen normalization statistics.
EvaluationResult evaluate_generator(TrainerState& state);

struct TrainCallbacks {
  /// Called with each new log row.
  std::function<void(const LogRow&)> on_log;
  /// Called when interactions cross a snapshot boundary.
  std::function<void(const TrainerState&, std::int64_t boundary)> on_snapshot;
};

/// Iterates until the interaction budget is spent or `max_iterations`
/// iterations have run, evaluating at every eval_interval boundary that is
/// <= budget.
void run_training(TrainerState& state, const TrainCallbacks& callbacks = {},
                  std::optional<std::int64_t> max_iterations = std::nullopt);

/// Full trainer state. The replay buffer is referenced by file name
/// (metadata "buffer_dump") and written separately.
Checkpoint make_checkpoint(const TrainerState& state, const std::string& buffer_dump_name);
TrainerState restore_trainer(const Checkpoint& ckpt, const std::filesystem::path& buffer_dump);

struct RunPaths {
  std::filesystem::path config;
  std::filesystem::path log;
  std::filesystem::path checkpoint;
  std::filesystem::path buffer;
};

RunPaths run_paths(const std::filesystem::path& out_dir);

/// Trains from scratch and writes config.txt, log.csv, checkpoint.bin,
/// buffer.bin (and generator snapshots if configured) into out_dir.
TrainerState train(const TrainingConfig& config, const std::filesystem::path& out_dir);

/// Continues the run saved in out_dir's checkpoint until the budget is spent.
TrainerState resume(const std::filesystem::path& out_dir,
                    std::optional<std::int64_t> max_iterations = std::nullopt);

/// Writes the current state of a run into out_dir (same layout as train()).
void save_run(const TrainerState& state, const std::filesystem::path& out_dir);

}  // namespace gogepo
