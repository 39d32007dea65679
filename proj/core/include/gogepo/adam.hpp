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

#include <cstdint>
#include <vector>

#include "gogepo/param_set.hpp"

namespace gogepo {

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;

  /// Zero accumulators shaped like `params`.
  static AdamState for_params(const ParamSet& params);
};

/// One bias-corrected Adam update of `params` in place. Gradients must have
/// the same names, order and shapes as `params`; any non-finite gradient entry
/// raises std::domain_error naming the parameter.
void adam_step(ParamSet& params, const ParamSet& grads, AdamState& state, double lr);

}  // namespace gogepo
