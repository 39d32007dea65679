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

#include "gogepo/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace gogepo {

AdamState AdamState::for_params(const ParamSet& params) {
  AdamState s;
  for (const auto& e : params.entries()) {
    s.first_moment.push_back(Matrix::Zero(e.value.rows(), e.value.cols()));
    s.second_moment.push_back(Matrix::Zero(e.value.rows(), e.value.cols()));
  }
  return s;
}

void adam_step(ParamSet& params, const ParamSet& grads, AdamState& state, double lr) {
  auto& p = params.entries();
  const auto& g = grads.entries();
  if (p.size() != g.size() || state.first_moment.size() != p.size() ||
      state.second_moment.size() != p.size()) {
    throw std::invalid_argument("adam_step: parameter, gradient and state counts differ");
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].name != g[i].name || p[i].value.rows() != g[i].value.rows() ||
        p[i].value.cols() != g[i].value.cols() ||
        state.first_moment[i].rows() != p[i].value.rows() ||
        state.first_moment[i].cols() != p[i].value.cols()) {
      throw std::invalid_argument("adam_step: gradient/state for '" + p[i].name +
                                  "' does not match the parameter shape");
    }
    if (!g[i].value.allFinite()) {
      throw std::domain_error("adam_step: non-finite gradient for '" + p[i].name + "'");
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < p.size(); ++i) {
    Matrix& m = state.first_moment[i];
    Matrix& v = state.second_moment[i];
    const Matrix& grad = g[i].value;
    m = state.beta1 * m + (1.0 - state.beta1) * grad;
    v = state.beta2 * v + (1.0 - state.beta2) * grad.cwiseProduct(grad);
    p[i].value.array() -= lr * (m.array() / correction1) /
                          ((v.array() / correction2).sqrt() + state.epsilon);
  }
}

}  // namespace gogepo
