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

// Checkpoint container: version tag, string metadata and named 64-bit float
// arrays, stored uncompressed.
//
//   "GGPCKPT\0" | u32 version | u64 len, metadata as a JSON object of strings |
//   u64 count | count x (u64 len, name | u64 rows | u64 cols | f64[rows*cols] row-major)
//
// Array names are grouped by section prefix: "generator/", "evaluator/",
// "obs_stat/", "generator_opt/", "evaluator_opt/".

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "gogepo/adam.hpp"
#include "gogepo/evaluator.hpp"
#include "gogepo/generator.hpp"
#include "gogepo/param_set.hpp"
#include "gogepo/running_stat.hpp"

namespace gogepo {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::uint32_t version = kVersion;
  std::map<std::string, std::string> metadata;
  ParamSet arrays;

  const std::string& meta(const std::string& key) const;
  double meta_double(const std::string& key) const;
  std::int64_t meta_int(const std::string& key) const;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
/// Throws CheckpointError on I/O failure, a foreign file or a version
/// mismatch.
Checkpoint load_checkpoint(const std::filesystem::path& path);

void store_generator(Checkpoint& ckpt, const GeneratorParams& rho);
GeneratorParams load_generator(const Checkpoint& ckpt);
void store_evaluator(Checkpoint& ckpt, const EvaluatorParams& w);
EvaluatorParams load_evaluator(const Checkpoint& ckpt);
void store_running_stat(Checkpoint& ckpt, const RunningStat& stat);
RunningStat load_running_stat(const Checkpoint& ckpt);
void store_adam(Checkpoint& ckpt, const std::string& section, const AdamState& state,
                const ParamSet& params);
AdamState load_adam(const Checkpoint& ckpt, const std::string& section, const ParamSet& params);

}  // namespace gogepo
