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
#include <random>
#include <string>
#include <string_view>

namespace gogepo {

using Rng = std::mt19937_64;

/// Independent randomness consumers of a run. Each gets its own engine so
/// that switching one feature off does not shift anyone else's draws.
enum class Stream : std::uint64_t {
  kInit = 1,
  kNoise = 2,
  kEnv = 3,
  kSampling = 4,
  kEval = 5,
  kDirections = 6,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Engine for `stream` derived from `master_seed` by a counter-based split.
Rng make_stream(std::uint64_t master_seed, Stream stream);
/// Same, for an arbitrary numeric stream id (e.g. per-seed test fixtures).
Rng make_stream(std::uint64_t master_seed, std::uint64_t stream_id);

std::string serialize_rng(const Rng& rng);
Rng deserialize_rng(std::string_view text);

}  // namespace gogepo
