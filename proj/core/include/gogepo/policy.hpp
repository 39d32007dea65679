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

#include <span>

#include "gogepo/diff.hpp"
#include "gogepo/rng.hpp"

namespace gogepo {

enum class OutputActivation { kLinear, kTanh };

/// Architecture of the generated MLP: obs -> hidden -> hidden -> act.
struct PolicyShape {
  int obs_dim = 0;
  int act_dim = 0;
  int hidden = 0;
  OutputActivation output = OutputActivation::kLinear;

  /// Number of scalars in the flat layout.
  Eigen::Index flat_size() const;
  bool operator==(const PolicyShape&) const = default;
};

struct ActionBounds {
  Vector low;
  Vector high;
};

/// Weights and biases of a two-hidden-layer tanh MLP.
///
/// Flat layout (used by the replay buffer and on disk): k1 row-major, b1,
/// k2 row-major, b2, k3 row-major, b3.
struct PolicyParams {
  Matrix k1;  // hidden x obs_dim
  Matrix k2;  // hidden x hidden
  Matrix k3;  // act_dim x hidden
  Vector b1;
  Vector b2;
  Vector b3;
  OutputActivation output = OutputActivation::kLinear;

  PolicyShape shape() const;
  Vector flatten() const;
  static PolicyParams unflatten(const Vector& flat, const PolicyShape& shape);
  static PolicyParams zeros(const PolicyShape& shape);
  bool all_finite() const;
};

/// Weights and biases i.i.d. uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
/// Throws std::invalid_argument unless hidden is a positive multiple of
/// slice_size and all dimensions are >= 1.
PolicyParams init_policy(const PolicyShape& shape, int slice_size, Rng& rng);

/// Network output before clipping.
Vector raw_action(const PolicyParams& theta, const Vector& obs);
/// Network output for each row of `states` (rows x act_dim), before clipping.
Matrix raw_actions(const PolicyParams& theta, const Matrix& states);
/// raw_action clipped into `bounds`. Throws std::domain_error on non-finite obs.
Vector policy_forward(const PolicyParams& theta, const Vector& obs, const ActionBounds& bounds);

/// Relabels the hidden units of layer 1 or 2: unit permutation[i] of the
/// result is unit i of `theta`. The network function is unchanged.
PolicyParams permute_hidden(const PolicyParams& theta, int layer, std::span<const int> permutation);

}  // namespace gogepo
