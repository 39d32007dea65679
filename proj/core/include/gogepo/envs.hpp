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

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gogepo/policy.hpp"
#include "gogepo/rng.hpp"
#include "gogepo/running_stat.hpp"

namespace gogepo {

struct EnvSpec {
  std::string name;
  int obs_dim = 0;
  int act_dim = 0;
  ActionBounds bounds;
  int horizon = 1;
  double return_low = 0.0;  // plausible return range, for sweeps
  double return_high = 0.0;
};

struct StepResult {
  Vector obs;
  double reward = 0.0;
  bool done = false;
};

/// Continuous mountain car with the classic-control constants. Reaching
/// position 0.45 ends the episode with a +100 bonus; every step costs
/// 0.1 * a^2.
class MountainCarContinuous {
 public:
  static constexpr double kMinPosition = -1.2;
  static constexpr double kMaxPosition = 0.6;
  static constexpr double kMaxSpeed = 0.07;
  static constexpr double kGoalPosition = 0.45;
  static constexpr double kPower = 0.0015;
  static constexpr double kGravity = 0.0025;
  static constexpr int kHorizon = 999;

  struct State {
    double position = 0.0;
    double velocity = 0.0;
  };

  static EnvSpec spec();
  /// Position ~ U[-0.6, -0.4], velocity 0.
  static State initial(Rng& rng);
  /// Pure transition; the action is clipped to [-1, 1] first.
  static State transition(const State& s, double action, double* reward, bool* done);
  static Vector observe(const State& s);
};

/// Point mass on a plane driven by bounded acceleration towards (0.6, 0.6).
/// Reward is minus the distance to the target after each step.
class PointReacher {
 public:
  static constexpr double kDt = 0.1;
  static constexpr double kTargetX = 0.6;
  static constexpr double kTargetY = 0.6;
  static constexpr int kHorizon = 100;

  struct State {
    double x = 0.0, y = 0.0;
    double vx = 0.0, vy = 0.0;
  };

  static EnvSpec spec();
  static State initial() { return {}; }
  static State transition(const State& s, const Vector& action, double* reward);
  static Vector observe(const State& s);
};

/// Value-type wrapper holding one environment instance and its current state.
class Environment {
 public:
  static Environment make(std::string_view name);

  const EnvSpec& spec() const { return spec_; }
  Vector reset(Rng& rng);
  /// Clips the action into bounds, advances one step. Throws std::domain_error
  /// on a non-finite action and std::logic_error when stepping a finished
  /// episode.
  StepResult step(const Vector& action);
  int steps() const { return steps_; }

 private:
  using State = std::variant<MountainCarContinuous::State, PointReacher::State>;

  EnvSpec spec_;
  State state_;
  int steps_ = 0;
  bool done_ = false;
};

std::vector<std::string> environment_names();

struct RolloutTrace {
  std::vector<Vector> observations;  // raw, before normalization
  std::vector<Vector> actions;       // clipped actions sent to the env
  std::vector<double> rewards;
};

struct RolloutResult {
  double ret = 0.0;
  int steps = 0;
};

/// Runs one episode with a deterministic policy on normalized observations.
/// Returns the undiscounted sum of raw rewards. `stat` is updated with every
/// raw observation only when `update_stats` is set.
RolloutResult rollout(const Environment& env, const PolicyParams& theta, RunningStat& stat,
                      Rng& rng, bool update_stats, RolloutTrace* trace = nullptr);

struct EvaluationResult {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> returns;
  int steps = 0;
};

/// `episodes` rollouts with frozen normalization statistics.
EvaluationResult evaluate_policy(const Environment& env, const PolicyParams& theta,
                                 const RunningStat& stat, int episodes, Rng& rng);

}  // namespace gogepo
