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

#include "gogepo/policy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace gogepo {
namespace {

void check_shape(const PolicyShape& s) {
  if (s.obs_dim < 1 || s.act_dim < 1 || s.hidden < 1) {
    throw std::invalid_argument("policy dimensions must be >= 1");
  }
}

Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double bound, Rng& rng) {
  std::uniform_real_distribution<double> u(-bound, bound);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

Vector uniform_vector(Eigen::Index n, double bound, Rng& rng) {
  std::uniform_real_distribution<double> u(-bound, bound);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace

Eigen::Index PolicyShape::flat_size() const {
  const Eigen::Index h = hidden;
  return h * obs_dim + h + h * h + h + act_dim * h + act_dim;
}

PolicyShape PolicyParams::shape() const {
  return PolicyShape{static_cast<int>(k1.cols()), static_cast<int>(k3.rows()),
                     static_cast<int>(k1.rows()), output};
}

Vector PolicyParams::flatten() const {
  Vector flat(shape().flat_size());
  Eigen::Index at = 0;
  auto put_m = [&](const Matrix& m) {
    flat.segment(at, m.size()) = m.reshaped<Eigen::RowMajor>();
    at += m.size();
  };
  auto put_v = [&](const Vector& v) {
    flat.segment(at, v.size()) = v;
    at += v.size();
  };
  put_m(k1);
  put_v(b1);
  put_m(k2);
  put_v(b2);
  put_m(k3);
  put_v(b3);
  return flat;
}

PolicyParams PolicyParams::unflatten(const Vector& flat, const PolicyShape& shape) {
  check_shape(shape);
  if (flat.size() != shape.flat_size()) {
    throw std::invalid_argument("policy unflatten: expected " + std::to_string(shape.flat_size()) +
                                " values, got " + std::to_string(flat.size()));
  }
  PolicyParams p;
  p.output = shape.output;
  Eigen::Index at = 0;
  auto take_m = [&](Eigen::Index r, Eigen::Index c) {
    Matrix m(r, c);
    m.reshaped<Eigen::RowMajor>() = flat.segment(at, r * c);
    at += r * c;
    return m;
  };
  auto take_v = [&](Eigen::Index n) {
    Vector v = flat.segment(at, n);
    at += n;
    return v;
  };
  p.k1 = take_m(shape.hidden, shape.obs_dim);
  p.b1 = take_v(shape.hidden);
  p.k2 = take_m(shape.hidden, shape.hidden);
  p.b2 = take_v(shape.hidden);
  p.k3 = take_m(shape.act_dim, shape.hidden);
  p.b3 = take_v(shape.act_dim);
  return p;
}

PolicyParams PolicyParams::zeros(const PolicyShape& shape) {
  return unflatten(Vector::Zero(shape.flat_size()), shape);
}

bool PolicyParams::all_finite() const {
  return k1.allFinite() && k2.allFinite() && k3.allFinite() && b1.allFinite() &&
         b2.allFinite() && b3.allFinite();
}

PolicyParams init_policy(const PolicyShape& shape, int slice_size, Rng& rng) {
  check_shape(shape);
  if (slice_size < 1 || shape.hidden % slice_size != 0) {
    throw std::invalid_argument("hidden width " + std::to_string(shape.hidden) +
                                " is not a multiple of slice size " +
                                std::to_string(slice_size));
  }
  const double in_bound = 1.0 / std::sqrt(static_cast<double>(shape.obs_dim));
  const double hid_bound = 1.0 / std::sqrt(static_cast<double>(shape.hidden));
  PolicyParams p;
  p.output = shape.output;
  p.k1 = uniform_matrix(shape.hidden, shape.obs_dim, in_bound, rng);
  p.b1 = uniform_vector(shape.hidden, in_bound, rng);
  p.k2 = uniform_matrix(shape.hidden, shape.hidden, hid_bound, rng);
  p.b2 = uniform_vector(shape.hidden, hid_bound, rng);
  p.k3 = uniform_matrix(shape.act_dim, shape.hidden, hid_bound, rng);
  p.b3 = uniform_vector(shape.act_dim, hid_bound, rng);
  return p;
}

Vector raw_action(const PolicyParams& theta, const Vector& obs) {
  if (obs.size() != theta.k1.cols()) {
    throw std::invalid_argument("observation has " + std::to_string(obs.size()) +
                                " entries, policy expects " + std::to_string(theta.k1.cols()));
  }
  if (!obs.allFinite()) throw std::domain_error("non-finite observation");
  const Vector h1 = (theta.k1 * obs + theta.b1).array().tanh();
  const Vector h2 = (theta.k2 * h1 + theta.b2).array().tanh();
  Vector a = theta.k3 * h2 + theta.b3;
  if (theta.output == OutputActivation::kTanh) a = a.array().tanh();
  return a;
}

Matrix raw_actions(const PolicyParams& theta, const Matrix& states) {
  if (states.cols() != theta.k1.cols()) {
    throw std::invalid_argument("states have " + std::to_string(states.cols()) +
                                " columns, policy expects " + std::to_string(theta.k1.cols()));
  }
  Matrix h1 = states * theta.k1.transpose();
  h1.rowwise() += theta.b1.transpose();
  h1 = h1.array().tanh();
  Matrix h2 = h1 * theta.k2.transpose();
  h2.rowwise() += theta.b2.transpose();
  h2 = h2.array().tanh();
  Matrix a = h2 * theta.k3.transpose();
  a.rowwise() += theta.b3.transpose();
  if (theta.output == OutputActivation::kTanh) a = a.array().tanh();
  return a;
}

Vector policy_forward(const PolicyParams& theta, const Vector& obs, const ActionBounds& bounds) {
  return raw_action(theta, obs).cwiseMax(bounds.low).cwiseMin(bounds.high);
}

PolicyParams permute_hidden(const PolicyParams& theta, int layer,
                            std::span<const int> permutation) {
  if (layer != 1 && layer != 2) {
    throw std::invalid_argument("permute_hidden: layer must be 1 or 2");
  }
  const int n = static_cast<int>(theta.k1.rows());
  if (static_cast<int>(permutation.size()) != n) {
    throw std::invalid_argument("permute_hidden: permutation has wrong length");
  }
  std::vector<bool> seen(n, false);
  for (int p : permutation) {
    if (p < 0 || p >= n || seen[p]) {
      throw std::invalid_argument("permute_hidden: not a bijection on hidden units");
    }
    seen[p] = true;
  }

  PolicyParams out = theta;
  Matrix& in_w = layer == 1 ? out.k1 : out.k2;
  Vector& in_b = layer == 1 ? out.b1 : out.b2;
  Matrix& out_w = layer == 1 ? out.k2 : out.k3;
  const Matrix& src_in_w = layer == 1 ? theta.k1 : theta.k2;
  const Vector& src_in_b = layer == 1 ? theta.b1 : theta.b2;
  const Matrix& src_out_w = layer == 1 ? theta.k2 : theta.k3;
  for (int i = 0; i < n; ++i) {
    const int j = permutation[i];
    in_w.row(j) = src_in_w.row(i);
    in_b[j] = src_in_b[i];
    out_w.col(j) = src_out_w.col(i);
  }
  return out;
}

}  // namespace gogepo
