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

// Hypernetwork that maps a scalar return command to the weights of a
// two-hidden-layer MLP policy.
//
// Every weight matrix is tiled by slices. Each slice position owns a learned
// embedding z; the slice is the output of a shared head fed with [z, c]:
//
//   K2 (hidden x hidden)  G x G grid of f x f slices, head "hidden"
//   K1 (hidden x obs)     G x 1 grid of f x obs slices, head "input"
//   K3 (act x hidden)     1 x G grid of act x f slices, head "output"
//
// with G = hidden / f. Biases come from the same embeddings: head "bias"
// turns every embedding of K1/K2 into an f-vector, the vectors are stacked
// along the output dimension and averaged over the grid's input dimension.
// K3's bias uses head "out_bias" (act_dim outputs) averaged over its G
// embeddings. Each layer's weights and bias are finally multiplied by
// 2/sqrt(fan_in).

#include <span>
#include <vector>

#include "gogepo/adam.hpp"
#include "gogepo/param_set.hpp"
#include "gogepo/policy.hpp"
#include "gogepo/rng.hpp"
#include "gogepo/tape_nets.hpp"

namespace gogepo {

struct EvaluatorParams;

struct GeneratorConfig {
  PolicyShape policy;
  int slice = 16;
  int embed_dim = 8;
  int head_hidden = 256;
  bool output_scaling = true;
  double command_scale = 1.0;
  bool bias_uses_command = true;

  int grid() const { return policy.hidden / slice; }
  /// Throws std::invalid_argument on inconsistent dimensions.
  void validate() const;
};

struct GeneratorParams {
  GeneratorConfig config;
  ParamSet params;
};

struct NoiseSpec {
  double sigma = 0.1;
};

GeneratorParams init_generator(const GeneratorConfig& config, Rng& rng);

/// Builds the generated policies for each command on `tape`. `rho` holds
/// tape handles for every entry of GeneratorParams::params.
std::vector<nets::PolicyVars> generate_on_tape(diff::Tape& tape, const GeneratorConfig& config,
                                               const VarMap& rho,
                                               std::span<const double> commands);

/// Deterministic generator output for one command.
PolicyParams generate(const GeneratorParams& rho, double command);

/// generate() plus i.i.d. N(0, sigma^2) noise on every policy entry.
PolicyParams sample_policy(const GeneratorParams& rho, double command, const NoiseSpec& noise,
                           Rng& rng);

/// mean_r (r - V_w(G_rho(r)))^2 and its gradient with respect to rho.
struct GeneratorLoss {
  double loss = 0.0;
  ParamSet gradient;
};
GeneratorLoss generator_loss(const GeneratorParams& rho, const EvaluatorParams& w,
                             std::span<const double> returns);

/// One Adam step on rho against generator_loss; w is held fixed. Returns the
/// loss before the step. Throws std::invalid_argument on an empty batch.
double generator_update(GeneratorParams& rho, const EvaluatorParams& w,
                        std::span<const double> returns, AdamState& opt, double lr);

}  // namespace gogepo
