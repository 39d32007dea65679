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

// Reverse-mode differentiation over dense row-major matrices.
//
// A Tape records primitive operations eagerly: every call computes its value
// immediately and appends a node. Inputs are either parameters (reported by
// gradient()) or constants. Because nodes are stored in insertion order, the
// tape is already topologically sorted and evaluate() can replay it with new
// input bindings.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace gogepo {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using NamedMatrices = std::map<std::string, Matrix>;

}  // namespace gogepo

namespace gogepo::diff {

/// Raised when operand shapes are inconsistent. The message names the node
/// and both shapes.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Op {
  kInput,
  kMatMul,
  kAddBias,
  kTanh,
  kRelu,
  kConcat,
  kScale,
  kSquare,
  kMean,
  kGather,
};

enum class Axis { kRows, kCols };

/// Handle to a node on a specific tape.
struct Var {
  std::size_t index = 0;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  /// Trainable input. Names must be unique on the tape.
  Var parameter(std::string name, Matrix value);
  /// Non-trainable input; may be rebound by name in evaluate().
  Var constant(std::string name, Matrix value);
  /// Anonymous constant.
  Var constant(Matrix value);

  Var matmul(Var a, Var b);
  /// x + b where b is either x-shaped or a 1 x cols row broadcast over rows.
  Var add_bias(Var x, Var b);
  Var tanh(Var x);
  Var relu(Var x);
  Var concat(std::span<const Var> parts, Axis axis);
  Var scale(Var x, double factor);
  Var square(Var x);
  /// Mean of all entries, as a 1 x 1 matrix.
  Var mean(Var x);
  /// out.reshaped(rows*cols)[i] = x.reshaped()[index[i]] over row-major
  /// storage. Covers reshape, transpose, slicing and tiling.
  Var gather(Var x, Eigen::Index rows, Eigen::Index cols,
             std::shared_ptr<const std::vector<Eigen::Index>> index);

  /// Names a node so evaluate() reports its value.
  void mark_output(Var v, std::string name);

  /// Rebinds named inputs, replays every node in order and returns the
  /// values of all marked outputs.
  NamedMatrices evaluate(const NamedMatrices& bindings = {});

  /// d loss / d parameter for every parameter on the tape. The loss must be
  /// 1 x 1. Adjoints are cleared before returning.
  NamedMatrices gradient(Var loss);

  const Matrix& value(Var v) const { return nodes_.at(v.index).value; }
  double scalar(Var v) const;
  std::size_t size() const { return nodes_.size(); }
  std::vector<std::string> parameter_names() const;

 private:
  struct Node {
    Op op = Op::kInput;
    std::vector<std::size_t> inputs;
    Matrix value;
    Matrix adjoint;
    double factor = 0.0;
    Axis axis = Axis::kRows;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    std::shared_ptr<const std::vector<Eigen::Index>> index;
    std::string name;
    bool is_parameter = false;
    bool needs_grad = false;
  };

  Var push(Node node);
  void compute(std::size_t i);
  void backprop(std::size_t i);
  std::string describe(std::size_t i) const;
  Var add_input(std::string name, Matrix value, bool is_parameter);

  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::size_t> inputs_by_name_;
  std::vector<std::pair<std::string, std::size_t>> outputs_;
};

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every coordinate.
Vector finite_difference(const std::function<double(const Vector&)>& f,
                         const Vector& x, double h);

/// Largest |a - b| / max(|a|, |b|, floor) over all coordinates.
double max_relative_error(const Vector& a, const Vector& b, double floor = 1e-6);

}  // namespace gogepo::diff
