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

#include "gogepo/running_stat.hpp"

#include <stdexcept>

namespace gogepo {

RunningStat::RunningStat(Eigen::Index dim) : mean_(Vector::Zero(dim)), m2_(Vector::Zero(dim)) {}

void RunningStat::update(const Vector& x) {
  if (x.size() != mean_.size()) throw std::invalid_argument("running stat: dimension mismatch");
  if (!x.allFinite()) throw std::domain_error("running stat: non-finite sample");
  ++count_;
  const Vector delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta.cwiseProduct(x - mean_);
}

Vector RunningStat::variance() const {
  if (count_ < 2) return Vector::Zero(mean_.size());
  return m2_ / static_cast<double>(count_ - 1);
}

Vector RunningStat::normalize(const Vector& x) const {
  if (x.size() != mean_.size()) throw std::invalid_argument("running stat: dimension mismatch");
  if (count_ < 2) return x;
  return (x - mean_).array() / (variance().array() + 1e-8).sqrt();
}

RunningStat RunningStat::restore(std::int64_t count, Vector mean, Vector m2) {
  if (count < 0 || mean.size() != m2.size()) throw std::invalid_argument("corrupt running stat");
  RunningStat s;
  s.count_ = count;
  s.mean_ = std::move(mean);
  s.m2_ = std::move(m2);
  return s;
}

}  // namespace gogepo
