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

#include "gogepo/tape_nets.hpp"

#include <cmath>
#include <memory>
#include <numeric>
#include <vector>

namespace gogepo::nets {
namespace {

std::string layer_name(std::string_view prefix, char kind, int i) {
  return std::string(prefix) + "." + kind + std::to_string(i);
}

Matrix uniform(Eigen::Index rows, Eigen::Index cols, double bound, Rng& rng) {
  std::uniform_real_distribution<double> u(-bound, bound);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

}  // namespace

void add_mlp(ParamSet& params, std::string_view prefix, std::span<const int> widths, Rng& rng) {
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(widths[i]));
    params.add(layer_name(prefix, 'w', static_cast<int>(i)), uniform(widths[i], widths[i + 1], bound, rng));
    params.add(layer_name(prefix, 'b', static_cast<int>(i)), uniform(1, widths[i + 1], bound, rng));
  }
}

int mlp_depth(const ParamSet& params, std::string_view prefix) {
  int depth = 0;
  while (params.contains(layer_name(prefix, 'w', depth))) ++depth;
  return depth;
}

diff::Var mlp_rows(diff::Tape& tape, diff::Var x, const VarMap& vars, std::string_view prefix,
                   int depth) {
  diff::Var h = x;
  for (int i = 0; i < depth; ++i) {
    h = tape.add_bias(tape.matmul(h, vars.at(layer_name(prefix, 'w', i))),
                      vars.at(layer_name(prefix, 'b', i)));
    if (i + 1 < depth) h = tape.relu(h);
  }
  return h;
}

PolicyVars bind_policy_constants(diff::Tape& tape, const PolicyParams& theta) {
  PolicyVars v;
  v.k1t = tape.constant(Matrix(theta.k1.transpose()));
  v.b1 = tape.constant(Matrix(theta.b1.transpose()));
  v.k2t = tape.constant(Matrix(theta.k2.transpose()));
  v.b2 = tape.constant(Matrix(theta.b2.transpose()));
  v.k3t = tape.constant(Matrix(theta.k3.transpose()));
  v.b3 = tape.constant(Matrix(theta.b3.transpose()));
  v.output = theta.output;
  return v;
}

diff::Var policy_rows(diff::Tape& tape, const PolicyVars& p, diff::Var states) {
  diff::Var h1 = tape.tanh(tape.add_bias(tape.matmul(states, p.k1t), p.b1));
  diff::Var h2 = tape.tanh(tape.add_bias(tape.matmul(h1, p.k2t), p.b2));
  diff::Var a = tape.add_bias(tape.matmul(h2, p.k3t), p.b3);
  if (p.output == OutputActivation::kTanh) a = tape.tanh(a);
  return a;
}

diff::Var flatten_row(diff::Tape& tape, diff::Var x) {
  const Eigen::Index n = tape.value(x).size();
  auto index = std::make_shared<std::vector<Eigen::Index>>(n);
  std::iota(index->begin(), index->end(), Eigen::Index{0});
  return tape.gather(x, 1, n, std::move(index));
}

diff::Var mse(diff::Tape& tape, diff::Var pred, const Vector& target) {
  Matrix neg = -target;
  diff::Var err = tape.add_bias(pred, tape.constant(std::move(neg)));
  return tape.mean(tape.square(err));
}

}  // namespace gogepo::nets
