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

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gogepo/diff.hpp"

namespace gogepo {

/// Tape handles keyed by unprefixed parameter name.
using VarMap = std::map<std::string, diff::Var, std::less<>>;

/// Ordered collection of named parameter matrices. Order is insertion order
/// and defines the flat layout used by flatten()/assign_flat().
class ParamSet {
 public:
  struct Entry {
    std::string name;
    Matrix value;
  };

  void add(std::string name, Matrix value);
  bool contains(std::string_view name) const;
  Matrix& at(std::string_view name);
  const Matrix& at(std::string_view name) const;

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  Eigen::Index total_size() const;

  Vector flatten() const;
  void assign_flat(const Vector& flat);

  /// Binds every entry as a parameter on the tape, prefixed by `prefix`.
  VarMap bind_parameters(diff::Tape& tape, std::string_view prefix) const;
  /// Binds every entry as a named constant, prefixed by `prefix`.
  VarMap bind_constants(diff::Tape& tape, std::string_view prefix) const;
  /// Collects gradients for this set's entries out of a tape gradient map.
  ParamSet select_gradients(const NamedMatrices& grads, std::string_view prefix) const;

  bool operator==(const ParamSet& other) const;

 private:
  std::vector<Entry> entries_;
};

}  // namespace gogepo
