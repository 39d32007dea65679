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

#include "gogepo/evaluator.hpp"

#include <stdexcept>
#include <string>

namespace gogepo {

void EvaluatorConfig::validate() const {
  if (policy.obs_dim < 1 || policy.act_dim < 1) {
    throw std::invalid_argument("evaluator: policy dimensions must be >= 1");
  }
  if (probes < 1) throw std::invalid_argument("evaluator: need at least one probing state");
  if (hidden < 1) throw std::invalid_argument("evaluator: hidden width must be >= 1");
}

EvaluatorParams init_evaluator(const EvaluatorConfig& config, Rng& rng) {
  config.validate();
  EvaluatorParams w{config, {}};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix probes(config.probes, config.policy.obs_dim);
  for (Eigen::Index i = 0; i < probes.size(); ++i) probes.data()[i] = unit(rng);
  w.params.add("probes", std::move(probes));
  const int widths[] = {config.fingerprint_size(), config.hidden, config.hidden, 1};
  nets::add_mlp(w.params, "value", widths, rng);
  return w;
}

namespace {

void check_policy(const EvaluatorConfig& c, const PolicyParams& theta) {
  if (theta.k1.cols() != c.policy.obs_dim || theta.k3.rows() != c.policy.act_dim) {
    throw std::invalid_argument(
        "evaluator: policy maps " + std::to_string(theta.k1.cols()) + " -> " +
        std::to_string(theta.k3.rows()) + " but the evaluator expects " +
        std::to_string(c.policy.obs_dim) + " -> " + std::to_string(c.policy.act_dim));
  }
}

}  // namespace

Vector probing_actions(const EvaluatorParams& w, const PolicyParams& theta) {
  check_policy(w.config, theta);
  const Matrix a = raw_actions(theta, w.probing_states());
  return a.reshaped<Eigen::RowMajor>();
}

double evaluate(const EvaluatorParams& w, const PolicyParams& theta) {
  Eigen::RowVectorXd h = probing_actions(w, theta).transpose();
  const int depth = nets::mlp_depth(w.params, "value");
  for (int i = 0; i < depth; ++i) {
    const std::string k = std::to_string(i);
    h = h * w.params.at("value.w" + k) + w.params.at("value.b" + k);
    if (i + 1 < depth) h = h.cwiseMax(0.0);
  }
  return h(0);
}

diff::Var value_on_tape(diff::Tape& tape, const EvaluatorConfig& /*config*/, const VarMap& w,
                        std::span<const nets::PolicyVars> policies) {
  if (policies.empty()) throw std::invalid_argument("evaluator: empty policy batch");
  const diff::Var states = w.at("probes");
  std::vector<diff::Var> rows;
  rows.reserve(policies.size());
  for (const auto& p : policies) {
    rows.push_back(nets::flatten_row(tape, nets::policy_rows(tape, p, states)));
  }
  const diff::Var fingerprints = tape.concat(rows, diff::Axis::kRows);
  return nets::mlp_rows(tape, fingerprints, w, "value", 3);
}

EvaluatorLoss evaluator_loss(const EvaluatorParams& w, std::span<const double> returns,
                             std::span<const PolicyParams> policies) {
  if (returns.empty()) throw std::invalid_argument("evaluator update: empty batch");
  if (returns.size() != policies.size()) {
    throw std::invalid_argument("evaluator update: returns and policies differ in length");
  }
  diff::Tape tape;
  const VarMap vars = w.params.bind_parameters(tape, "v/");
  std::vector<nets::PolicyVars> pv;
  pv.reserve(policies.size());
  for (const auto& theta : policies) {
    check_policy(w.config, theta);
    pv.push_back(nets::bind_policy_constants(tape, theta));
  }
  const diff::Var values = value_on_tape(tape, w.config, vars, pv);
  const diff::Var loss =
      nets::mse(tape, values, Eigen::Map<const Vector>(returns.data(), returns.size()));
  EvaluatorLoss out;
  out.loss = tape.scalar(loss);
  out.gradient = w.params.select_gradients(tape.gradient(loss), "v/");
  return out;
}

double evaluator_update(EvaluatorParams& w, std::span<const double> returns,
                        std::span<const PolicyParams> policies, AdamState& opt, double lr) {
  EvaluatorLoss l = evaluator_loss(w, returns, policies);
  adam_step(w.params, l.gradient, opt, lr);
  return l.loss;
}

}  // namespace gogepo
