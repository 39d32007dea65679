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
#include <filesystem>
#include <vector>

#include "gogepo/diff.hpp"
#include "gogepo/policy.hpp"
#include "gogepo/rng.hpp"

namespace gogepo {

struct ReplayEntry {
  double ret = 0.0;
  Vector theta;  // PolicyParams::flatten() layout
  std::int64_t episode = 0;
};

/// Fixed-capacity FIFO of (return, policy) pairs with recency-weighted
/// sampling. The entry pushed in the current episode has age 1; an entry
/// pushed k episodes earlier has age k + 1.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 10000);

  /// Throws std::domain_error on a non-finite return.
  void push(double ret, Vector theta);

  /// k draws with replacement, P(entry) proportional to age^-exponent.
  /// exponent 0 is uniform. Throws std::logic_error when empty.
  std::vector<std::size_t> sample_indices(std::size_t k, double exponent, Rng& rng) const;
  std::vector<ReplayEntry> sample(std::size_t k, double exponent, Rng& rng) const;

  /// Normalized sampling probabilities, oldest entry first.
  std::vector<double> probabilities(double exponent) const;

  double max_return() const;
  double min_return() const;

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }
  std::int64_t episode_count() const { return episode_; }

  /// i-th entry, oldest first.
  const ReplayEntry& operator[](std::size_t i) const;
  std::int64_t age(std::size_t i) const;

  /// Rebuilds a buffer from entries listed oldest first.
  static ReplayBuffer restore(std::size_t capacity, std::int64_t episode_count,
                              std::vector<ReplayEntry> entries);

 private:
  std::size_t capacity_;
  std::int64_t episode_ = 0;
  std::size_t head_ = 0;  // index of the oldest entry once the ring is full
  std::vector<ReplayEntry> entries_;
};

/// Binary dump of a buffer for offline analysis.
///
///   "GGPBUF\0\0" | u32 version | i32 obs, act, hidden, output_activation |
///   u64 flat_size | u64 count | count x (f64 return, i64 episode, f64[flat_size])
struct BufferDump {
  PolicyShape shape;
  std::vector<ReplayEntry> entries;
};

void write_buffer_dump(const std::filesystem::path& path, const ReplayBuffer& buffer,
                       const PolicyShape& shape);
BufferDump read_buffer_dump(const std::filesystem::path& path);

}  // namespace gogepo
