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

#include "gogepo/diff.hpp"

namespace gogepo {

/// Streaming per-coordinate mean and variance (Welford).
class RunningStat {
 public:
  RunningStat() = default;
  explicit RunningStat(Eigen::Index dim);

  void update(const Vector& x);
  /// (x - mean) / sqrt(var + 1e-8); identity while fewer than two samples.
  Vector normalize(const Vector& x) const;

  std::int64_t count() const { return count_; }
  Eigen::Index dim() const { return mean_.size(); }
  const Vector& mean() const { return mean_; }
  const Vector& m2() const { return m2_; }
  /// Unbiased sample variance; zero while fewer than two samples.
  Vector variance() const;

  static RunningStat restore(std::int64_t count, Vector mean, Vector m2);

 private:
  std::int64_t count_ = 0;
  Vector mean_;
  Vector m2_;
};

}  // namespace gogepo
