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

// Fingerprinting value function V_w(theta).
//
// A policy is characterized by its raw outputs on a set of learnable probing
// states. The concatenated probing actions feed an MLP U that predicts the
// policy's return. Probing actions do not depend on how the hidden units of
// the policy are labeled, so neither does V_w.

#include <span>
#include <vector>

#include "gogepo/adam.hpp"
#include "gogepo/param_set.hpp"
#include "gogepo/policy.hpp"
#include "gogepo/rng.hpp"
#include "gogepo/tape_nets.hpp"

namespace gogepo {

struct EvaluatorConfig {
  PolicyShape policy;
  int probes = 200;
  int hidden = 256;

  int fingerprint_size() const { return probes * policy.act_dim; }
  void validate() const;
};

/// Entries: "probes" (probes x obs_dim), then the value MLP "value.w{i}" /
/// "value.b{i}" with widths fingerprint_size -> hidden -> hidden -> 1.
struct EvaluatorParams {
  EvaluatorConfig config;
  ParamSet params;

  const Matrix& probing_states() const { return params.at("probes"); }
};

/// Probing states uniform in [0, 1); value MLP uniform +-1/sqrt(fan_in).
EvaluatorParams init_evaluator(const EvaluatorConfig& config, Rng& rng);

/// Raw policy outputs on every probing state, concatenated row-major.
Vector probing_actions(const EvaluatorParams& w, const PolicyParams& theta);

/// V_w(theta).
double evaluate(const EvaluatorParams& w, const PolicyParams& theta);

/// Values of a batch of on-tape policies, as a (batch x 1) node.
diff::Var value_on_tape(diff::Tape& tape, const EvaluatorConfig& config, const VarMap& w,
                        std::span<const nets::PolicyVars> policies);

struct EvaluatorLoss {
  double loss = 0.0;
  ParamSet gradient;
};

/// mean (r - V_w(theta))^2 and its gradient with respect to w.
EvaluatorLoss evaluator_loss(const EvaluatorParams& w, std::span<const double> returns,
                             std::span<const PolicyParams> policies);

/// One Adam step on w (probing states and value MLP). Returns the loss
/// before the step. Throws std::invalid_argument on an empty batch.
double evaluator_update(EvaluatorParams& w, std::span<const double> returns,
                        std::span<const PolicyParams> policies, AdamState& opt, double lr);

}  // namespace gogepo
