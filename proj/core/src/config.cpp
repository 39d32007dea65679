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

#include "gogepo/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "gogepo/envs.hpp"

namespace gogepo {
namespace {

using Kind = ConfigError::Kind;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct RawValue {
  std::string text;
  int line = 0;
};

// Reads `key = value` lines into a map, rejecting malformed lines and
// duplicate keys.
class KeyValues {
 public:
  explicit KeyValues(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
      ++number;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string body = trim(line);
      if (body.empty()) continue;
      const auto eq = body.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(Kind::kSyntax, {},
                          "line " + std::to_string(number) + ": expected 'key = value'");
      }
      const std::string key = trim(std::string_view(body).substr(0, eq));
      const std::string value = trim(std::string_view(body).substr(eq + 1));
      if (key.empty()) {
        throw ConfigError(Kind::kSyntax, {}, "line " + std::to_string(number) + ": empty key");
      }
      if (!values_.emplace(key, RawValue{value, number}).second) {
        throw ConfigError(Kind::kSyntax, key,
                          "line " + std::to_string(number) + ": duplicate key '" + key + "'");
      }
    }
  }

  template <typename T>
  void take(const std::string& key, T& out) {
    auto it = values_.find(key);
    if (it == values_.end()) return;
    out = convert<T>(key, it->second);
    values_.erase(it);
  }

  void reject_leftovers() const {
    if (values_.empty()) return;
    const auto& [key, raw] = *values_.begin();
    throw ConfigError(Kind::kUnknownKey, key,
                      "line " + std::to_string(raw.line) + ": unknown key '" + key + "'");
  }

 private:
  static ConfigError bad(const std::string& key, const RawValue& raw, const std::string& what) {
    return ConfigError(Kind::kInvalidValue, key,
                       "line " + std::to_string(raw.line) + ": key '" + key + "': " + what +
                           ", got '" + raw.text + "'");
  }

  template <typename T>
  static T convert(const std::string& key, const RawValue& raw) {
    const std::string& s = raw.text;
    if constexpr (std::is_same_v<T, std::string>) {
      if (s.empty()) throw bad(key, raw, "expected a non-empty string");
      return s;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (s == "true" || s == "1") return true;
      if (s == "false" || s == "0") return false;
      throw bad(key, raw, "expected true or false");
    } else if constexpr (std::is_same_v<T, OutputActivation>) {
      if (s == "linear") return OutputActivation::kLinear;
      if (s == "tanh") return OutputActivation::kTanh;
      throw bad(key, raw, "expected linear or tanh");
    } else if constexpr (std::is_floating_point_v<T>) {
      try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
      } catch (const std::exception&) {
        throw bad(key, raw, "expected a number");
      }
    } else {
      T v{};
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) throw bad(key, raw, "expected an integer");
      return v;
    }
  }

  std::map<std::string, RawValue> values_;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(Kind::kMissingFile, {}, "cannot read config file " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

[[noreturn]] void invalid(const std::string& key, const std::string& what) {
  throw ConfigError(Kind::kInvalidValue, key, "key '" + key + "': " + what);
}

void check_env(const std::string& env) {
  for (const auto& n : environment_names()) {
    if (n == env) return;
  }
  invalid("env", "unknown environment '" + env + "'");
}

const char* activation_name(OutputActivation a) {
  return a == OutputActivation::kTanh ? "tanh" : "linear";
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void TrainingConfig::validate() const {
  check_env(env);
  if (hidden < 1) invalid("hidden", "must be >= 1");
  if (slice < 1) invalid("slice", "must be >= 1");
  if (hidden % slice != 0) {
    invalid("hidden", "must be a multiple of slice (" + std::to_string(slice) + ")");
  }
  if (embed_dim < 1) invalid("embed_dim", "must be >= 1");
  if (head_hidden < 1) invalid("head_hidden", "must be >= 1");
  if (probes < 1) invalid("probes", "must be >= 1");
  if (value_hidden < 1) invalid("value_hidden", "must be >= 1");
  if (!(noise >= 0.0) || !std::isfinite(noise)) invalid("noise", "must be >= 0");
  if (!std::isfinite(drive)) invalid("drive", "must be finite");
  if (batch_size < 1) invalid("batch_size", "must be >= 1");
  if (!(generator_lr >= 0.0) || !std::isfinite(generator_lr)) invalid("generator_lr", "must be >= 0");
  if (!(evaluator_lr >= 0.0) || !std::isfinite(evaluator_lr)) invalid("evaluator_lr", "must be >= 0");
  if (generator_updates < 1) invalid("generator_updates", "must be >= 1");
  if (evaluator_updates < 1) invalid("evaluator_updates", "must be >= 1");
  if (buffer_capacity < 1) invalid("buffer_capacity", "must be >= 1");
  if (!(recency_exponent >= 0.0) || !std::isfinite(recency_exponent)) {
    invalid("recency_exponent", "must be >= 0");
  }
  if (budget < 1) invalid("budget", "must be >= 1");
  if (eval_interval < 1) invalid("eval_interval", "must be >= 1");
  if (eval_episodes < 1) invalid("eval_episodes", "must be >= 1");
  if (!std::isfinite(command_scale)) invalid("command_scale", "must be finite");
  if (snapshot_interval < 0) invalid("snapshot_interval", "must be >= 0");
}

std::string TrainingConfig::to_text() const {
  std::ostringstream os;
  os << "env = " << env << "\n"
     << "hidden = " << hidden << "\n"
     << "slice = " << slice << "\n"
     << "embed_dim = " << embed_dim << "\n"
     << "head_hidden = " << head_hidden << "\n"
     << "probes = " << probes << "\n"
     << "value_hidden = " << value_hidden << "\n"
     << "noise = " << format_double(noise) << "\n"
     << "drive = " << format_double(drive) << "\n"
     << "batch_size = " << batch_size << "\n"
     << "generator_lr = " << format_double(generator_lr) << "\n"
     << "evaluator_lr = " << format_double(evaluator_lr) << "\n"
     << "generator_updates = " << generator_updates << "\n"
     << "evaluator_updates = " << evaluator_updates << "\n"
     << "buffer_capacity = " << buffer_capacity << "\n"
     << "recency_exponent = " << format_double(recency_exponent) << "\n"
     << "budget = " << budget << "\n"
     << "eval_interval = " << eval_interval << "\n"
     << "eval_episodes = " << eval_episodes << "\n"
     << "seed = " << seed << "\n"
     << "command_scale = " << format_double(command_scale) << "\n"
     << "output_scaling = " << (output_scaling ? "true" : "false") << "\n"
     << "output_activation = " << activation_name(output_activation) << "\n"
     << "bias_uses_command = " << (bias_uses_command ? "true" : "false") << "\n"
     << "snapshot_interval = " << snapshot_interval << "\n";
  return os.str();
}

TrainingConfig parse_training_config_text(const std::string& text) {
  KeyValues kv(text);
  TrainingConfig c;
  kv.take("env", c.env);
  kv.take("hidden", c.hidden);
  kv.take("slice", c.slice);
  kv.take("embed_dim", c.embed_dim);
  kv.take("head_hidden", c.head_hidden);
  kv.take("probes", c.probes);
  kv.take("value_hidden", c.value_hidden);
  kv.take("noise", c.noise);
  kv.take("drive", c.drive);
  kv.take("batch_size", c.batch_size);
  kv.take("generator_lr", c.generator_lr);
  kv.take("evaluator_lr", c.evaluator_lr);
  kv.take("generator_updates", c.generator_updates);
  kv.take("evaluator_updates", c.evaluator_updates);
  kv.take("buffer_capacity", c.buffer_capacity);
  kv.take("recency_exponent", c.recency_exponent);
  kv.take("budget", c.budget);
  kv.take("eval_interval", c.eval_interval);
  kv.take("eval_episodes", c.eval_episodes);
  kv.take("seed", c.seed);
  kv.take("command_scale", c.command_scale);
  kv.take("output_scaling", c.output_scaling);
  kv.take("output_activation", c.output_activation);
  kv.take("bias_uses_command", c.bias_uses_command);
  kv.take("snapshot_interval", c.snapshot_interval);
  kv.reject_leftovers();
  c.validate();
  return c;
}

TrainingConfig parse_training_config(const std::filesystem::path& path) {
  return parse_training_config_text(read_file(path));
}

void ArsConfig::validate() const {
  check_env(env);
  if (hidden < 1) invalid("hidden", "must be >= 1");
  if (slice < 1) invalid("slice", "must be >= 1");
  if (hidden % slice != 0) {
    invalid("hidden", "must be a multiple of slice (" + std::to_string(slice) + ")");
  }
  if (!(step_size > 0.0) || !std::isfinite(step_size)) invalid("step_size", "must be > 0");
  if (directions < 1) invalid("directions", "must be >= 1");
  if (elite_directions < 1 || elite_directions > directions) {
    invalid("elite_directions", "must be between 1 and directions");
  }
  if (!(noise > 0.0) || !std::isfinite(noise)) invalid("noise", "must be > 0");
  if (budget < 1) invalid("budget", "must be >= 1");
  if (eval_interval < 1) invalid("eval_interval", "must be >= 1");
  if (eval_episodes < 1) invalid("eval_episodes", "must be >= 1");
}

std::string ArsConfig::to_text() const {
  std::ostringstream os;
  os << "env = " << env << "\n"
     << "hidden = " << hidden << "\n"
     << "slice = " << slice << "\n"
     << "step_size = " << format_double(step_size) << "\n"
     << "directions = " << directions << "\n"
     << "elite_directions = " << elite_directions << "\n"
     << "noise = " << format_double(noise) << "\n"
     << "budget = " << budget << "\n"
     << "eval_interval = " << eval_interval << "\n"
     << "eval_episodes = " << eval_episodes << "\n"
     << "seed = " << seed << "\n"
     << "output_activation = " << activation_name(output_activation) << "\n";
  return os.str();
}

ArsConfig parse_ars_config_text(const std::string& text) {
  KeyValues kv(text);
  ArsConfig c;
  kv.take("env", c.env);
  kv.take("hidden", c.hidden);
  kv.take("slice", c.slice);
  kv.take("step_size", c.step_size);
  kv.take("directions", c.directions);
  kv.take("elite_directions", c.elite_directions);
  kv.take("noise", c.noise);
  kv.take("budget", c.budget);
  kv.take("eval_interval", c.eval_interval);
  kv.take("eval_episodes", c.eval_episodes);
  kv.take("seed", c.seed);
  kv.take("output_activation", c.output_activation);
  kv.reject_leftovers();
  c.validate();
  return c;
}

ArsConfig parse_ars_config(const std::filesystem::path& path) {
  return parse_ars_config_text(read_file(path));
}

}  // namespace gogepo
