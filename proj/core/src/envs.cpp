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

#include "gogepo/envs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gogepo {

EnvSpec MountainCarContinuous::spec() {
  EnvSpec s;
  s.name = "mountaincar";
  s.obs_dim = 2;
  s.act_dim = 1;
  s.bounds = {Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)};
  s.horizon = kHorizon;
  s.return_low = -100.0;
  s.return_high = 100.0;
  return s;
}

MountainCarContinuous::State MountainCarContinuous::initial(Rng& rng) {
  std::uniform_real_distribution<double> u(-0.6, -0.4);
  return {u(rng), 0.0};
}

MountainCarContinuous::State MountainCarContinuous::transition(const State& s, double action,
                                                               double* reward, bool* done) {
  const double force = std::clamp(action, -1.0, 1.0);
  State n;
  n.velocity = std::clamp(s.velocity + force * kPower - kGravity * std::cos(3.0 * s.position),
                          -kMaxSpeed, kMaxSpeed);
  n.position = std::clamp(s.position + n.velocity, kMinPosition, kMaxPosition);
  if (n.position <= kMinPosition && n.velocity < 0.0) n.velocity = 0.0;
  const bool reached = n.position >= kGoalPosition;
  if (reward) *reward = (reached ? 100.0 : 0.0) - 0.1 * force * force;
  if (done) *done = reached;
  return n;
}

Vector MountainCarContinuous::observe(const State& s) {
  Vector o(2);
  o << s.position, s.velocity;
  return o;
}

EnvSpec PointReacher::spec() {
  EnvSpec s;
  s.name = "pointreacher";
  s.obs_dim = 4;
  s.act_dim = 2;
  s.bounds = {Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)};
  s.horizon = kHorizon;
  s.return_low = -100.0;
  s.return_high = 0.0;
  return s;
}

PointReacher::State PointReacher::transition(const State& s, const Vector& action,
                                             double* reward) {
  const double ax = std::clamp(action[0], -1.0, 1.0);
  const double ay = std::clamp(action[1], -1.0, 1.0);
  State n;
  n.vx = s.vx + ax * kDt;
  n.vy = s.vy + ay * kDt;
  n.x = s.x + n.vx * kDt;
  n.y = s.y + n.vy * kDt;
  if (reward) *reward = -std::hypot(n.x - kTargetX, n.y - kTargetY);
  return n;
}

Vector PointReacher::observe(const State& s) {
  Vector o(4);
  o << s.x, s.y, s.vx, s.vy;
  return o;
}

Environment Environment::make(std::string_view name) {
  Environment e;
  if (name == "mountaincar") {
    e.spec_ = MountainCarContinuous::spec();
    e.state_ = MountainCarContinuous::State{};
  } else if (name == "pointreacher") {
    e.spec_ = PointReacher::spec();
    e.state_ = PointReacher::State{};
  } else {
    throw std::invalid_argument("unknown environment '" + std::string(name) +
                                "' (expected mountaincar or pointreacher)");
  }
  return e;
}

std::vector<std::string> environment_names() { return {"mountaincar", "pointreacher"}; }

Vector Environment::reset(Rng& rng) {
  steps_ = 0;
  done_ = false;
  if (std::holds_alternative<MountainCarContinuous::State>(state_)) {
    const auto s = MountainCarContinuous::initial(rng);
    state_ = s;
    return MountainCarContinuous::observe(s);
  }
  const auto s = PointReacher::initial();
  state_ = s;
  return PointReacher::observe(s);
}

StepResult Environment::step(const Vector& action) {
  if (done_) throw std::logic_error("step() called on a finished episode");
  if (action.size() != spec_.act_dim) {
    throw std::invalid_argument("action has " + std::to_string(action.size()) +
                                " entries, expected " + std::to_string(spec_.act_dim));
  }
  if (!action.allFinite()) throw std::domain_error("non-finite action");
  const Vector a = action.cwiseMax(spec_.bounds.low).cwiseMin(spec_.bounds.high);
  StepResult r;
  bool terminal = false;
  if (auto* mc = std::get_if<MountainCarContinuous::State>(&state_)) {
    *mc = MountainCarContinuous::transition(*mc, a[0], &r.reward, &terminal);
    r.obs = MountainCarContinuous::observe(*mc);
  } else {
    auto& pr = std::get<PointReacher::State>(state_);
    pr = PointReacher::transition(pr, a, &r.reward);
    r.obs = PointReacher::observe(pr);
  }
  ++steps_;
  r.done = terminal || steps_ >= spec_.horizon;
  done_ = r.done;
  return r;
}

RolloutResult rollout(const Environment& env, const PolicyParams& theta, RunningStat& stat,
                      Rng& rng, bool update_stats, RolloutTrace* trace) {
  Environment e = env;
  Vector obs = e.reset(rng);
  RolloutResult result;
  for (;;) {
    if (update_stats) stat.update(obs);
    const Vector action = policy_forward(theta, stat.normalize(obs), e.spec().bounds);
    StepResult s = e.step(action);
    if (trace) {
      trace->observations.push_back(obs);
      trace->actions.push_back(action);
      trace->rewards.push_back(s.reward);
    }
    result.ret += s.reward;
    ++result.steps;
    if (s.done) break;
    obs = std::move(s.obs);
  }
  return result;
}

EvaluationResult evaluate_policy(const Environment& env, const PolicyParams& theta,
                                 const RunningStat& stat, int episodes, Rng& rng) {
  if (episodes < 1) throw std::invalid_argument("evaluation needs at least one episode");
  RunningStat frozen = stat;
  EvaluationResult out;
  for (int i = 0; i < episodes; ++i) {
    const RolloutResult r = rollout(env, theta, frozen, rng, false);
    out.returns.push_back(r.ret);
    out.steps += r.steps;
  }
  double sum = 0.0;
  for (double r : out.returns) sum += r;
  out.mean = sum / episodes;
  double sq = 0.0;
  for (double r : out.returns) sq += (r - out.mean) * (r - out.mean);
  out.stddev = std::sqrt(sq / episodes);
  return out;
}

}  // namespace gogepo
