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

// Tape gradient vs central differences on the four composite graphs of the
// method: policy forward, generator forward, evaluator loss and generator
// loss. Each check returns the largest per-coordinate relative error.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "gogepo/diff.hpp"
#include "gogepo/evaluator.hpp"
#include "gogepo/generator.hpp"
#include "gogepo/tape_nets.hpp"

namespace gogepo::gradcheck {

inline constexpr double kStep = 1e-5;

struct TinySetup {
  PolicyShape policy{2, 1, 16, OutputActivation::kLinear};
  GeneratorConfig generator;
  EvaluatorConfig evaluator;
  GeneratorParams rho;
  EvaluatorParams w;
  std::vector<PolicyParams> thetas;
  std::vector<double> returns;
  Matrix states;
};

// obs 2, act 1, hidden 16, f 4, d 3, n_p 8; head and value widths 8 so the
// full finite-difference sweep stays fast.
inline TinySetup tiny_setup(std::uint64_t seed) {
  TinySetup s;
  Rng rng = make_stream(seed, std::uint64_t{1000});
  s.generator.policy = s.policy;
  s.generator.slice = 4;
  s.generator.embed_dim = 3;
  s.generator.head_hidden = 8;
  s.evaluator.policy = s.policy;
  s.evaluator.probes = 8;
  s.evaluator.hidden = 8;
  s.rho = init_generator(s.generator, rng);
  s.w = init_evaluator(s.evaluator, rng);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 3; ++i) {
    s.thetas.push_back(init_policy(s.policy, 4, rng));
    s.returns.push_back(u(rng));
  }
  s.states.resize(5, 2);
  for (Eigen::Index i = 0; i < s.states.size(); ++i) s.states.data()[i] = u(rng);
  return s;
}

// Central differences with step kStep, checked against step kStep / 10. If
// the two disagree, a ReLU kink lies within the wider bracket; the pair is
// shifted one decade down (at most three times) and the wider step of the
// first consistent pair is used.
inline Vector kink_aware_difference(const std::function<double(const Vector&)>& f, const Vector& x) {
  Vector out(x.size());
  Vector probe = x;
  auto central = [&](Eigen::Index i, double h) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    return (up - down) / (2.0 * h);
  };
  const double f0 = std::abs(f(x));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double h = kStep;
    double wide = central(i, h);
    for (int shift = 0; shift < 3; ++shift) {
      const double narrow = central(i, h / 10.0);
      // Relative agreement plus the rounding noise of the narrow step.
      const double tol = 1e-5 * std::max(std::abs(wide), std::abs(narrow)) +
                         100.0 * std::numeric_limits<double>::epsilon() * f0 / h;
      if (std::abs(wide - narrow) <= tol) break;
      h /= 10.0;
      wide = narrow;
    }
    out[i] = wide;
  }
  return out;
}

inline double relative_error(const Vector& tape, const std::function<double(const Vector&)>& f,
                             const Vector& x) {
  return diff::max_relative_error(tape, kink_aware_difference(f, x));
}

// loss = mean(square(policy(states))) as a function of the flat policy.
inline double policy_forward(const TinySetup& s) {
  const PolicyShape shape = s.policy;
  auto run = [&](const Vector& flat, Vector* grad) {
    const PolicyParams t = PolicyParams::unflatten(flat, shape);
    diff::Tape tape;
    nets::PolicyVars v;
    v.k1t = tape.parameter("k1t", Matrix(t.k1.transpose()));
    v.b1 = tape.parameter("b1", Matrix(t.b1.transpose()));
    v.k2t = tape.parameter("k2t", Matrix(t.k2.transpose()));
    v.b2 = tape.parameter("b2", Matrix(t.b2.transpose()));
    v.k3t = tape.parameter("k3t", Matrix(t.k3.transpose()));
    v.b3 = tape.parameter("b3", Matrix(t.b3.transpose()));
    const diff::Var loss =
        tape.mean(tape.square(nets::policy_rows(tape, v, tape.constant(s.states))));
    if (grad) {
      const auto g = tape.gradient(loss);
      PolicyParams gp;
      gp.k1 = g.at("k1t").transpose();
      gp.b1 = g.at("b1").row(0).transpose();
      gp.k2 = g.at("k2t").transpose();
      gp.b2 = g.at("b2").row(0).transpose();
      gp.k3 = g.at("k3t").transpose();
      gp.b3 = g.at("b3").row(0).transpose();
      *grad = gp.flatten();
    }
    return tape.scalar(loss);
  };
  const Vector x = s.thetas.front().flatten();
  Vector g;
  run(x, &g);
  return relative_error(g, [&](const Vector& q) { return run(q, nullptr); }, x);
}

// loss = sum over generated entries of a fixed random weight times the entry,
// squared-averaged, as a function of rho.
inline double generator_forward(const TinySetup& s) {
  const double commands[] = {0.4, -1.3};
  auto run = [&](const Vector& flat, Vector* grad) {
    GeneratorParams rho = s.rho;
    rho.params.assign_flat(flat);
    diff::Tape tape;
    const VarMap vars = rho.params.bind_parameters(tape, "g/");
    const auto ps = generate_on_tape(tape, rho.config, vars, commands);
    std::vector<diff::Var> rows;
    for (const auto& p : ps) {
      for (diff::Var v : {p.k1t, p.b1, p.k2t, p.b2, p.k3t, p.b3}) {
        rows.push_back(nets::flatten_row(tape, v));
      }
    }
    const diff::Var all = tape.concat(rows, diff::Axis::kCols);
    Rng wr = make_stream(7, std::uint64_t{7});
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix weights(tape.value(all).cols(), 1);
    for (Eigen::Index i = 0; i < weights.size(); ++i) weights.data()[i] = n(wr);
    const diff::Var loss = tape.mean(tape.square(tape.matmul(all, tape.constant(weights))));
    if (grad) *grad = rho.params.select_gradients(tape.gradient(loss), "g/").flatten();
    return tape.scalar(loss);
  };
  const Vector x = s.rho.params.flatten();
  Vector g;
  run(x, &g);
  return relative_error(g, [&](const Vector& q) { return run(q, nullptr); }, x);
}

inline double evaluator_loss_graph(const TinySetup& s) {
  const Vector x = s.w.params.flatten();
  const Vector g = evaluator_loss(s.w, s.returns, s.thetas).gradient.flatten();
  return relative_error(
      g,
      [&](const Vector& q) {
        EvaluatorParams w = s.w;
        w.params.assign_flat(q);
        return evaluator_loss(w, s.returns, s.thetas).loss;
      },
      x);
}

inline double generator_loss_graph(const TinySetup& s) {
  const Vector x = s.rho.params.flatten();
  const Vector g = generator_loss(s.rho, s.w, s.returns).gradient.flatten();
  return relative_error(
      g,
      [&](const Vector& q) {
        GeneratorParams rho = s.rho;
        rho.params.assign_flat(q);
        return generator_loss(rho, s.w, s.returns).loss;
      },
      x);
}

}  // namespace gogepo::gradcheck
