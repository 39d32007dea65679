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

// Tape-level building blocks shared by the generator and the evaluator.

#include <span>
#include <string>
#include <string_view>

#include "gogepo/param_set.hpp"
#include "gogepo/policy.hpp"
#include "gogepo/rng.hpp"

namespace gogepo::nets {

/// Appends a fully connected net `prefix.w{i}` (in x out), `prefix.b{i}`
/// (1 x out) for consecutive widths, initialized uniform +-1/sqrt(fan_in).
void add_mlp(ParamSet& params, std::string_view prefix, std::span<const int> widths, Rng& rng);

/// Number of layers of the MLP stored under `prefix`.
int mlp_depth(const ParamSet& params, std::string_view prefix);

/// Row-batched MLP: relu between layers, no output activation.
diff::Var mlp_rows(diff::Tape& tape, diff::Var x, const VarMap& vars, std::string_view prefix,
                   int depth);

/// Policy weights on a tape in the row-batched layout: transposed matrices
/// and 1 x n bias rows.
struct PolicyVars {
  diff::Var k1t;
  diff::Var b1;
  diff::Var k2t;
  diff::Var b2;
  diff::Var k3t;
  diff::Var b3;
  OutputActivation output = OutputActivation::kLinear;
};

PolicyVars bind_policy_constants(diff::Tape& tape, const PolicyParams& theta);

/// Raw policy outputs for each row of `states` (rows x act_dim).
diff::Var policy_rows(diff::Tape& tape, const PolicyVars& policy, diff::Var states);

/// Flattens an r x c node into a 1 x (r*c) row, row-major.
diff::Var flatten_row(diff::Tape& tape, diff::Var x);

/// mean(square(pred - target)); target is a constant column.
diff::Var mse(diff::Tape& tape, diff::Var pred, const Vector& target);

}  // namespace gogepo::nets
