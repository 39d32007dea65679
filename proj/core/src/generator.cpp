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

#include "gogepo/generator.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "gogepo/evaluator.hpp"

namespace gogepo {
namespace {

using diff::Tape;
using diff::Var;
using Index = Eigen::Index;
using IndexMap = std::shared_ptr<const std::vector<Index>>;

double layer_factor(const GeneratorConfig& c, int fan_in) {
  return c.output_scaling ? 2.0 / std::sqrt(static_cast<double>(fan_in)) : 1.0;
}

// Rows (b * n + e) = [z_e, scale * c_b] for every command b and embedding e.
Var head_input(Tape& tape, Var embeddings, std::span<const double> commands, double scale,
               bool with_command) {
  const Matrix& z = tape.value(embeddings);
  const Index n = z.rows();
  const Index d = z.cols();
  const Index batch = static_cast<Index>(commands.size());
  auto index = std::make_shared<std::vector<Index>>(batch * n * d);
  for (Index b = 0; b < batch; ++b) {
    for (Index e = 0; e < n; ++e) {
      for (Index k = 0; k < d; ++k) (*index)[(b * n + e) * d + k] = e * d + k;
    }
  }
  Var tiled = tape.gather(embeddings, batch * n, d, std::move(index));
  if (!with_command) return tiled;
  Matrix column(batch * n, 1);
  for (Index b = 0; b < batch; ++b) {
    column.middleRows(b * n, n).setConstant(scale * commands[b]);
  }
  const Var parts[] = {tiled, tape.constant(std::move(column))};
  return tape.concat(parts, diff::Axis::kCols);
}

// Index maps that pick one command's block out of a head output and lay it
// out as the transposed weight matrix or the bias row the policy consumes.
struct Layout {
  Index obs, act, hidden, f, grid, batch;

  // K1^T (obs x hidden) from head "input" rows (b*G + m), cols (r*obs + s).
  IndexMap k1t(Index b) const {
    auto idx = std::make_shared<std::vector<Index>>(obs * hidden);
    for (Index s = 0; s < obs; ++s) {
      for (Index m = 0; m < grid; ++m) {
        for (Index r = 0; r < f; ++r) {
          (*idx)[s * hidden + m * f + r] = (b * grid + m) * (f * obs) + r * obs + s;
        }
      }
    }
    return idx;
  }

  // K2^T (hidden x hidden) from head "hidden" rows (b*G*G + m*G + n), cols (r*f + s).
  IndexMap k2t(Index b) const {
    auto idx = std::make_shared<std::vector<Index>>(hidden * hidden);
    for (Index m = 0; m < grid; ++m) {
      for (Index n = 0; n < grid; ++n) {
        const Index row = b * grid * grid + m * grid + n;
        for (Index r = 0; r < f; ++r) {
          for (Index s = 0; s < f; ++s) {
            // K2(m f + r, n f + s) lives at K2^T(n f + s, m f + r).
            (*idx)[(n * f + s) * hidden + m * f + r] = row * f * f + r * f + s;
          }
        }
      }
    }
    return idx;
  }

  // K3^T (hidden x act) from head "output" rows (b*G + n), cols (r*f + s).
  IndexMap k3t(Index b) const {
    auto idx = std::make_shared<std::vector<Index>>(hidden * act);
    for (Index n = 0; n < grid; ++n) {
      for (Index r = 0; r < act; ++r) {
        for (Index s = 0; s < f; ++s) {
          (*idx)[(n * f + s) * act + r] = (b * grid + n) * (act * f) + r * f + s;
        }
      }
    }
    return idx;
  }

  // columns x (rows_per_b * width) block of one command, one column per
  // input-dimension grid position, ready for a 1/columns averaging matmul.
  // Source rows are (b * rows_per_b + m * columns + n), width entries each;
  // result(n, m * width + r) = source(b * rows_per_b + m * columns + n, r).
  IndexMap bias_block(Index b, Index outputs, Index columns, Index width) const {
    const Index rows_per_b = outputs * columns;
    auto idx = std::make_shared<std::vector<Index>>(columns * outputs * width);
    for (Index n = 0; n < columns; ++n) {
      for (Index m = 0; m < outputs; ++m) {
        for (Index r = 0; r < width; ++r) {
          (*idx)[n * (outputs * width) + m * width + r] =
              (b * rows_per_b + m * columns + n) * width + r;
        }
      }
    }
    return idx;
  }
};

}  // namespace

void GeneratorConfig::validate() const {
  if (policy.obs_dim < 1 || policy.act_dim < 1 || policy.hidden < 1) {
    throw std::invalid_argument("generator: policy dimensions must be >= 1");
  }
  if (slice < 1 || policy.hidden % slice != 0) {
    throw std::invalid_argument("generator: hidden width " + std::to_string(policy.hidden) +
                                " is not a multiple of slice size " + std::to_string(slice));
  }
  if (embed_dim < 1 || head_hidden < 1) {
    throw std::invalid_argument("generator: embedding and head widths must be >= 1");
  }
  if (!std::isfinite(command_scale)) {
    throw std::invalid_argument("generator: command scale must be finite");
  }
}

GeneratorParams init_generator(const GeneratorConfig& config, Rng& rng) {
  config.validate();
  const int g = config.grid();
  const int d = config.embed_dim;
  const int f = config.slice;
  const int obs = config.policy.obs_dim;
  const int act = config.policy.act_dim;
  const int hh = config.head_hidden;

  GeneratorParams rho{config, {}};
  std::uniform_real_distribution<double> u(-1.0 / std::sqrt(d), 1.0 / std::sqrt(d));
  auto embeddings = [&](Index n) {
    Matrix z(n, d);
    for (Index i = 0; i < z.size(); ++i) z.data()[i] = u(rng);
    return z;
  };
  rho.params.add("z1", embeddings(g));
  rho.params.add("z2", embeddings(static_cast<Index>(g) * g));
  rho.params.add("z3", embeddings(g));

  const int in = d + 1;
  const int bias_in = config.bias_uses_command ? d + 1 : d;
  const int hidden_widths[] = {in, hh, hh, f * f};
  const int input_widths[] = {in, hh, hh, f * obs};
  const int output_widths[] = {in, hh, hh, act * f};
  const int bias_widths[] = {bias_in, hh, hh, f};
  const int out_bias_widths[] = {bias_in, hh, hh, act};
  nets::add_mlp(rho.params, "hidden", hidden_widths, rng);
  nets::add_mlp(rho.params, "input", input_widths, rng);
  nets::add_mlp(rho.params, "output", output_widths, rng);
  nets::add_mlp(rho.params, "bias", bias_widths, rng);
  nets::add_mlp(rho.params, "out_bias", out_bias_widths, rng);
  return rho;
}

std::vector<nets::PolicyVars> generate_on_tape(Tape& tape, const GeneratorConfig& config,
                                               const VarMap& rho,
                                               std::span<const double> commands) {
  if (commands.empty()) throw std::invalid_argument("generator: empty command batch");
  for (double c : commands) {
    if (!std::isfinite(c)) throw std::domain_error("generator: non-finite command");
  }
  const Layout lay{config.policy.obs_dim, config.policy.act_dim, config.policy.hidden,
                   config.slice,          config.grid(),         static_cast<Index>(commands.size())};
  const double scale = config.command_scale;
  const bool bias_c = config.bias_uses_command;
  const Var z1 = rho.at("z1");
  const Var z2 = rho.at("z2");
  const Var z3 = rho.at("z3");

  const double f1 = layer_factor(config, config.policy.obs_dim);
  const double f2 = layer_factor(config, config.policy.hidden);
  const double f3 = layer_factor(config, config.policy.hidden);
  auto scaled = [&](Var v, double k) { return k == 1.0 ? v : tape.scale(v, k); };

  const Var w_in = scaled(
      nets::mlp_rows(tape, head_input(tape, z1, commands, scale, true), rho, "input", 3), f1);
  const Var w_hid = scaled(
      nets::mlp_rows(tape, head_input(tape, z2, commands, scale, true), rho, "hidden", 3), f2);
  const Var w_out = scaled(
      nets::mlp_rows(tape, head_input(tape, z3, commands, scale, true), rho, "output", 3), f3);
  const Var c_b1 = scaled(
      nets::mlp_rows(tape, head_input(tape, z1, commands, scale, bias_c), rho, "bias", 3), f1);
  const Var c_b2 = scaled(
      nets::mlp_rows(tape, head_input(tape, z2, commands, scale, bias_c), rho, "bias", 3), f2);
  const Var c_b3 = scaled(
      nets::mlp_rows(tape, head_input(tape, z3, commands, scale, bias_c), rho, "out_bias", 3), f3);

  const Index g = lay.grid;
  const Var avg_grid = tape.constant(Matrix::Constant(1, g, 1.0 / static_cast<double>(g)));
  std::vector<nets::PolicyVars> out;
  out.reserve(commands.size());
  for (Index b = 0; b < lay.batch; ++b) {
    nets::PolicyVars p;
    p.output = config.policy.output;
    p.k1t = tape.gather(w_in, lay.obs, lay.hidden, lay.k1t(b));
    p.k2t = tape.gather(w_hid, lay.hidden, lay.hidden, lay.k2t(b));
    p.k3t = tape.gather(w_out, lay.hidden, lay.act, lay.k3t(b));
    // K1's grid has a single input column, so its bias needs no averaging.
    p.b1 = tape.gather(c_b1, 1, lay.hidden, lay.bias_block(b, g, 1, lay.f));
    p.b2 = tape.matmul(avg_grid, tape.gather(c_b2, g, lay.hidden, lay.bias_block(b, g, g, lay.f)));
    p.b3 = tape.matmul(avg_grid, tape.gather(c_b3, g, lay.act, lay.bias_block(b, 1, g, lay.act)));
    out.push_back(p);
  }
  return out;
}

PolicyParams generate(const GeneratorParams& rho, double command) {
  if (!std::isfinite(command)) throw std::domain_error("generator: non-finite command");
  Tape tape;
  const VarMap vars = rho.params.bind_constants(tape, "");
  const double commands[] = {command};
  const nets::PolicyVars v = generate_on_tape(tape, rho.config, vars, commands).front();
  PolicyParams theta;
  theta.output = rho.config.policy.output;
  theta.k1 = tape.value(v.k1t).transpose();
  theta.k2 = tape.value(v.k2t).transpose();
  theta.k3 = tape.value(v.k3t).transpose();
  theta.b1 = tape.value(v.b1).row(0).transpose();
  theta.b2 = tape.value(v.b2).row(0).transpose();
  theta.b3 = tape.value(v.b3).row(0).transpose();
  return theta;
}

PolicyParams sample_policy(const GeneratorParams& rho, double command, const NoiseSpec& noise,
                           Rng& rng) {
  if (!(noise.sigma >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");
  PolicyParams theta = generate(rho, command);
  if (noise.sigma == 0.0) return theta;
  std::normal_distribution<double> normal(0.0, noise.sigma);
  auto perturb = [&](auto& m) {
    for (Index i = 0; i < m.size(); ++i) m.data()[i] += normal(rng);
  };
  perturb(theta.k1);
  perturb(theta.b1);
  perturb(theta.k2);
  perturb(theta.b2);
  perturb(theta.k3);
  perturb(theta.b3);
  return theta;
}

GeneratorLoss generator_loss(const GeneratorParams& rho, const EvaluatorParams& w,
                             std::span<const double> returns) {
  if (returns.empty()) throw std::invalid_argument("generator update: empty batch");
  Tape tape;
  const VarMap rho_vars = rho.params.bind_parameters(tape, "g/");
  const VarMap w_vars = w.params.bind_constants(tape, "v/");
  const auto policies = generate_on_tape(tape, rho.config, rho_vars, returns);
  const Var values = value_on_tape(tape, w.config, w_vars, policies);
  const Var loss = nets::mse(tape, values, Eigen::Map<const Vector>(returns.data(), returns.size()));
  GeneratorLoss out;
  out.loss = tape.scalar(loss);
  out.gradient = rho.params.select_gradients(tape.gradient(loss), "g/");
  return out;
}

double generator_update(GeneratorParams& rho, const EvaluatorParams& w,
                        std::span<const double> returns, AdamState& opt, double lr) {
  GeneratorLoss l = generator_loss(rho, w, returns);
  adam_step(rho.params, l.gradient, opt, lr);
  return l.loss;
}

}  // namespace gogepo
