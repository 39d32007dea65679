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

#include "gogepo/param_set.hpp"

#include <cstring>
#include <stdexcept>

namespace gogepo {

void ParamSet::add(std::string name, Matrix value) {
  if (contains(name)) throw std::invalid_argument("duplicate parameter '" + name + "'");
  entries_.push_back({std::move(name), std::move(value)});
}

bool ParamSet::contains(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return true;
  }
  return false;
}

Matrix& ParamSet::at(std::string_view name) {
  for (auto& e : entries_) {
    if (e.name == name) return e.value;
  }
  throw std::out_of_range("no parameter named '" + std::string(name) + "'");
}

const Matrix& ParamSet::at(std::string_view name) const {
  return const_cast<ParamSet*>(this)->at(name);
}

Eigen::Index ParamSet::total_size() const {
  Eigen::Index n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

Vector ParamSet::flatten() const {
  Vector flat(total_size());
  Eigen::Index at = 0;
  for (const auto& e : entries_) {
    flat.segment(at, e.value.size()) = e.value.reshaped<Eigen::RowMajor>();
    at += e.value.size();
  }
  return flat;
}

void ParamSet::assign_flat(const Vector& flat) {
  if (flat.size() != total_size()) {
    throw std::invalid_argument("assign_flat: expected " + std::to_string(total_size()) +
                                " values, got " + std::to_string(flat.size()));
  }
  Eigen::Index at = 0;
  for (auto& e : entries_) {
    e.value.reshaped<Eigen::RowMajor>() = flat.segment(at, e.value.size());
    at += e.value.size();
  }
}

VarMap ParamSet::bind_parameters(diff::Tape& tape, std::string_view prefix) const {
  VarMap vars;
  for (const auto& e : entries_) vars[e.name] = tape.parameter(std::string(prefix) + e.name, e.value);
  return vars;
}

VarMap ParamSet::bind_constants(diff::Tape& tape, std::string_view prefix) const {
  VarMap vars;
  for (const auto& e : entries_) vars[e.name] = tape.constant(std::string(prefix) + e.name, e.value);
  return vars;
}

ParamSet ParamSet::select_gradients(const NamedMatrices& grads, std::string_view prefix) const {
  ParamSet out;
  for (const auto& e : entries_) {
    auto it = grads.find(std::string(prefix) + e.name);
    if (it == grads.end()) {
      throw std::out_of_range("no gradient for parameter '" + std::string(prefix) + e.name + "'");
    }
    out.add(e.name, it->second);
  }
  return out;
}

bool ParamSet::operator==(const ParamSet& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& a = entries_[i];
    const auto& b = other.entries_[i];
    if (a.name != b.name || a.value.rows() != b.value.rows() || a.value.cols() != b.value.cols()) {
      return false;
    }
    if (a.value.size() > 0 &&
        std::memcmp(a.value.data(), b.value.data(), sizeof(double) * a.value.size()) != 0) {
      return false;
    }
  }
  return true;
}

}  // namespace gogepo
