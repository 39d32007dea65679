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

// Run configuration. A config file is a flat list of `key = value` lines;
// `#` starts a comment. Every key is optional and unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "gogepo/policy.hpp"

namespace gogepo {

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { kMissingFile, kSyntax, kUnknownKey, kInvalidValue };
  ConfigError(Kind kind, std::string key, const std::string& message)
      : std::runtime_error(message), kind_(kind), key_(std::move(key)) {}
  Kind kind() const { return kind_; }
  /// Offending key, empty for file-level errors.
  const std::string& key() const { return key_; }

 private:
  Kind kind_;
  std::string key_;
};

struct TrainingConfig {
  std::string env = "mountaincar";
  int hidden = 256;
  int slice = 16;
  int embed_dim = 8;
  int head_hidden = 256;
  int probes = 200;
  int value_hidden = 256;
  double noise = 0.1;
  double drive = 20.0;
  int batch_size = 16;
  double generator_lr = 2e-6;
  double evaluator_lr = 5e-3;
  int generator_updates = 20;
  int evaluator_updates = 5;
  int buffer_capacity = 10000;
  double recency_exponent = 1.1;
  std::int64_t budget = 100000;
  std::int64_t eval_interval = 1000;
  int eval_episodes = 10;
  std::uint64_t seed = 0;
  double command_scale = 1.0;
  bool output_scaling = true;
  OutputActivation output_activation = OutputActivation::kLinear;
  bool bias_uses_command = true;
  // Save a generator snapshot every this many interactions (0 = never).
  std::int64_t snapshot_interval = 0;

  /// Throws ConfigError naming the first invalid key.
  void validate() const;
  std::string to_text() const;
};

struct ArsConfig {
  std::string env = "mountaincar";
  int hidden = 256;
  int slice = 16;
  double step_size = 0.01;
  int directions = 1;
  int elite_directions = 1;
  double noise = 0.05;
  std::int64_t budget = 100000;
  std::int64_t eval_interval = 1000;
  int eval_episodes = 10;
  std::uint64_t seed = 0;
  OutputActivation output_activation = OutputActivation::kLinear;

  void validate() const;
  std::string to_text() const;
};

TrainingConfig parse_training_config_text(const std::string& text);
TrainingConfig parse_training_config(const std::filesystem::path& path);
ArsConfig parse_ars_config_text(const std::string& text);
ArsConfig parse_ars_config(const std::filesystem::path& path);

}  // namespace gogepo
