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

#include "gogepo/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "binary_io.hpp"

namespace gogepo {
namespace {

constexpr char kMagic[8] = {'G', 'G', 'P', 'C', 'K', 'P', 'T', '\0'};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

ParamSet section(const Checkpoint& ckpt, const std::string& prefix) {
  ParamSet out;
  for (const auto& e : ckpt.arrays.entries()) {
    if (e.name.rfind(prefix, 0) == 0) out.add(e.name.substr(prefix.size()), e.value);
  }
  return out;
}

// Copies arrays of `section` into `target`, which fixes names and shapes.
void fill(ParamSet& target, const ParamSet& section, const std::string& what) {
  if (section.size() != target.size()) {
    throw CheckpointError(what + ": expected " + std::to_string(target.size()) + " arrays, found " +
                          std::to_string(section.size()));
  }
  for (auto& e : target.entries()) {
    if (!section.contains(e.name)) throw CheckpointError(what + ": missing array '" + e.name + "'");
    const Matrix& v = section.at(e.name);
    if (v.rows() != e.value.rows() || v.cols() != e.value.cols()) {
      throw CheckpointError(what + ": array '" + e.name + "' has the wrong shape");
    }
    e.value = v;
  }
}

OutputActivation activation_from(const std::string& s) {
  if (s == "linear") return OutputActivation::kLinear;
  if (s == "tanh") return OutputActivation::kTanh;
  throw CheckpointError("unknown output activation '" + s + "'");
}

const char* activation_name(OutputActivation a) {
  return a == OutputActivation::kTanh ? "tanh" : "linear";
}

}  // namespace

const std::string& Checkpoint::meta(const std::string& key) const {
  auto it = metadata.find(key);
  if (it == metadata.end()) throw CheckpointError("checkpoint lacks metadata '" + key + "'");
  return it->second;
}

double Checkpoint::meta_double(const std::string& key) const {
  try {
    return std::stod(meta(key));
  } catch (const std::logic_error&) {
    throw CheckpointError("metadata '" + key + "' is not a number");
  }
}

std::int64_t Checkpoint::meta_int(const std::string& key) const {
  try {
    return std::stoll(meta(key));
  } catch (const std::logic_error&) {
    throw CheckpointError("metadata '" + key + "' is not an integer");
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CheckpointError("cannot open " + path.string() + " for writing");
  os.write(kMagic, sizeof(kMagic));
  io::put<std::uint32_t>(os, ckpt.version);
  nlohmann::json meta(ckpt.metadata);
  io::put_string(os, meta.dump());
  io::put<std::uint64_t>(os, ckpt.arrays.size());
  for (const auto& e : ckpt.arrays.entries()) {
    io::put_string(os, e.name);
    io::put<std::uint64_t>(os, static_cast<std::uint64_t>(e.value.rows()));
    io::put<std::uint64_t>(os, static_cast<std::uint64_t>(e.value.cols()));
    io::put_doubles(os, e.value.data(), static_cast<std::size_t>(e.value.size()));
  }
  os.flush();
  if (!os) throw CheckpointError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open checkpoint " + path.string());
  Checkpoint ckpt;
  try {
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
      throw CheckpointError("not a checkpoint file");
    }
    ckpt.version = io::get<std::uint32_t>(is);
    if (ckpt.version != Checkpoint::kVersion) {
      throw CheckpointError("unsupported checkpoint version " + std::to_string(ckpt.version) +
                            " (expected " + std::to_string(Checkpoint::kVersion) + ")");
    }
    const auto meta = nlohmann::json::parse(io::get_string(is));
    ckpt.metadata = meta.get<std::map<std::string, std::string>>();
    const auto count = io::get<std::uint64_t>(is);
    for (std::uint64_t i = 0; i < count; ++i) {
      std::string name = io::get_string(is, 4096);
      const auto rows = io::get<std::uint64_t>(is);
      const auto cols = io::get<std::uint64_t>(is);
      if (rows > (1ULL << 31) || cols > (1ULL << 31)) throw CheckpointError("corrupt array shape");
      Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
      io::get_doubles(is, m.data(), static_cast<std::size_t>(m.size()));
      ckpt.arrays.add(std::move(name), std::move(m));
    }
  } catch (const CheckpointError& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  } catch (const std::exception& e) {
    throw CheckpointError(path.string() + ": corrupt checkpoint (" + e.what() + ")");
  }
  return ckpt;
}

void store_generator(Checkpoint& ckpt, const GeneratorParams& rho) {
  const GeneratorConfig& c = rho.config;
  ckpt.metadata["generator.obs_dim"] = std::to_string(c.policy.obs_dim);
  ckpt.metadata["generator.act_dim"] = std::to_string(c.policy.act_dim);
  ckpt.metadata["generator.hidden"] = std::to_string(c.policy.hidden);
  ckpt.metadata["generator.output_activation"] = activation_name(c.policy.output);
  ckpt.metadata["generator.slice"] = std::to_string(c.slice);
  ckpt.metadata["generator.embed_dim"] = std::to_string(c.embed_dim);
  ckpt.metadata["generator.head_hidden"] = std::to_string(c.head_hidden);
  ckpt.metadata["generator.output_scaling"] = c.output_scaling ? "1" : "0";
  ckpt.metadata["generator.command_scale"] = fmt(c.command_scale);
  ckpt.metadata["generator.bias_uses_command"] = c.bias_uses_command ? "1" : "0";
  for (const auto& e : rho.params.entries()) ckpt.arrays.add("generator/" + e.name, e.value);
}

GeneratorParams load_generator(const Checkpoint& ckpt) {
  GeneratorConfig c;
  c.policy.obs_dim = static_cast<int>(ckpt.meta_int("generator.obs_dim"));
  c.policy.act_dim = static_cast<int>(ckpt.meta_int("generator.act_dim"));
  c.policy.hidden = static_cast<int>(ckpt.meta_int("generator.hidden"));
  c.policy.output = activation_from(ckpt.meta("generator.output_activation"));
  c.slice = static_cast<int>(ckpt.meta_int("generator.slice"));
  c.embed_dim = static_cast<int>(ckpt.meta_int("generator.embed_dim"));
  c.head_hidden = static_cast<int>(ckpt.meta_int("generator.head_hidden"));
  c.output_scaling = ckpt.meta("generator.output_scaling") == "1";
  c.command_scale = ckpt.meta_double("generator.command_scale");
  c.bias_uses_command = ckpt.meta("generator.bias_uses_command") == "1";
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("generator metadata: ") + e.what());
  }
  // Shapes come from a throwaway initialization; values from the file.
  Rng scratch(0);
  GeneratorParams rho = init_generator(c, scratch);
  fill(rho.params, section(ckpt, "generator/"), "generator");
  return rho;
}

void store_evaluator(Checkpoint& ckpt, const EvaluatorParams& w) {
  const EvaluatorConfig& c = w.config;
  ckpt.metadata["evaluator.obs_dim"] = std::to_string(c.policy.obs_dim);
  ckpt.metadata["evaluator.act_dim"] = std::to_string(c.policy.act_dim);
  ckpt.metadata["evaluator.hidden_policy"] = std::to_string(c.policy.hidden);
  ckpt.metadata["evaluator.output_activation"] = activation_name(c.policy.output);
  ckpt.metadata["evaluator.probes"] = std::to_string(c.probes);
  ckpt.metadata["evaluator.hidden"] = std::to_string(c.hidden);
  for (const auto& e : w.params.entries()) ckpt.arrays.add("evaluator/" + e.name, e.value);
}

EvaluatorParams load_evaluator(const Checkpoint& ckpt) {
  EvaluatorConfig c;
  c.policy.obs_dim = static_cast<int>(ckpt.meta_int("evaluator.obs_dim"));
  c.policy.act_dim = static_cast<int>(ckpt.meta_int("evaluator.act_dim"));
  c.policy.hidden = static_cast<int>(ckpt.meta_int("evaluator.hidden_policy"));
  c.policy.output = activation_from(ckpt.meta("evaluator.output_activation"));
  c.probes = static_cast<int>(ckpt.meta_int("evaluator.probes"));
  c.hidden = static_cast<int>(ckpt.meta_int("evaluator.hidden"));
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("evaluator metadata: ") + e.what());
  }
  Rng scratch(0);
  EvaluatorParams w = init_evaluator(c, scratch);
  fill(w.params, section(ckpt, "evaluator/"), "evaluator");
  return w;
}

void store_running_stat(Checkpoint& ckpt, const RunningStat& stat) {
  ckpt.metadata["obs_stat.count"] = std::to_string(stat.count());
  ckpt.arrays.add("obs_stat/mean", Matrix(stat.mean().transpose()));
  ckpt.arrays.add("obs_stat/m2", Matrix(stat.m2().transpose()));
}

RunningStat load_running_stat(const Checkpoint& ckpt) {
  const ParamSet s = section(ckpt, "obs_stat/");
  if (!s.contains("mean") || !s.contains("m2")) throw CheckpointError("missing obs_stat arrays");
  const Matrix& mean = s.at("mean");
  const Matrix& m2 = s.at("m2");
  if (mean.rows() != 1 || m2.rows() != 1 || mean.cols() != m2.cols()) {
    throw CheckpointError("obs_stat arrays have inconsistent shapes");
  }
  return RunningStat::restore(ckpt.meta_int("obs_stat.count"), mean.row(0).transpose(),
                              m2.row(0).transpose());
}

void store_adam(Checkpoint& ckpt, const std::string& name, const AdamState& state,
                const ParamSet& params) {
  ckpt.metadata[name + ".step"] = std::to_string(state.step);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::string& p = params.entries()[i].name;
    ckpt.arrays.add(name + "/m/" + p, state.first_moment.at(i));
    ckpt.arrays.add(name + "/v/" + p, state.second_moment.at(i));
  }
}

AdamState load_adam(const Checkpoint& ckpt, const std::string& name, const ParamSet& params) {
  AdamState s = AdamState::for_params(params);
  s.step = ckpt.meta_int(name + ".step");
  ParamSet m = params;
  ParamSet v = params;
  fill(m, section(ckpt, name + "/m/"), name + " first moment");
  fill(v, section(ckpt, name + "/v/"), name + " second moment");
  for (std::size_t i = 0; i < params.size(); ++i) {
    s.first_moment[i] = m.entries()[i].value;
    s.second_moment[i] = v.entries()[i].value;
  }
  return s;
}

}  // namespace gogepo
