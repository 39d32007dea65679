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

#include "gogepo/diff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gogepo::diff {
namespace {

std::string shape_of(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

const char* op_name(Op op) {
  switch (op) {
    case Op::kInput: return "input";
    case Op::kMatMul: return "matmul";
    case Op::kAddBias: return "add_bias";
    case Op::kTanh: return "tanh";
    case Op::kRelu: return "relu";
    case Op::kConcat: return "concat";
    case Op::kScale: return "scale";
    case Op::kSquare: return "square";
    case Op::kMean: return "mean";
    case Op::kGather: return "gather";
  }
  return "?";
}

}  // namespace

Var Tape::push(Node node) {
  for (std::size_t in : node.inputs) {
    if (in >= nodes_.size()) {
      throw std::out_of_range("tape: operand refers to a node not on this tape");
    }
    node.needs_grad = node.needs_grad || nodes_[in].needs_grad;
  }
  nodes_.push_back(std::move(node));
  const std::size_t i = nodes_.size() - 1;
  try {
    compute(i);
  } catch (...) {
    nodes_.pop_back();
    throw;
  }
  return Var{i};
}

Var Tape::add_input(std::string name, Matrix value, bool is_parameter) {
  if (!name.empty() && inputs_by_name_.contains(name)) {
    throw std::invalid_argument("tape: duplicate input name '" + name + "'");
  }
  Node n;
  n.op = Op::kInput;
  n.value = std::move(value);
  n.name = name;
  n.is_parameter = is_parameter;
  n.needs_grad = is_parameter;
  nodes_.push_back(std::move(n));
  const std::size_t i = nodes_.size() - 1;
  if (!name.empty()) inputs_by_name_.emplace(std::move(name), i);
  return Var{i};
}

Var Tape::parameter(std::string name, Matrix value) {
  if (name.empty()) throw std::invalid_argument("tape: parameters must be named");
  return add_input(std::move(name), std::move(value), true);
}

Var Tape::constant(std::string name, Matrix value) {
  return add_input(std::move(name), std::move(value), false);
}

Var Tape::constant(Matrix value) { return add_input({}, std::move(value), false); }

Var Tape::matmul(Var a, Var b) {
  Node n;
  n.op = Op::kMatMul;
  n.inputs = {a.index, b.index};
  return push(std::move(n));
}

Var Tape::add_bias(Var x, Var b) {
  Node n;
  n.op = Op::kAddBias;
  n.inputs = {x.index, b.index};
  return push(std::move(n));
}

Var Tape::tanh(Var x) {
  Node n;
  n.op = Op::kTanh;
  n.inputs = {x.index};
  return push(std::move(n));
}

Var Tape::relu(Var x) {
  Node n;
  n.op = Op::kRelu;
  n.inputs = {x.index};
  return push(std::move(n));
}

Var Tape::concat(std::span<const Var> parts, Axis axis) {
  if (parts.empty()) throw std::invalid_argument("tape: concat of zero operands");
  Node n;
  n.op = Op::kConcat;
  n.axis = axis;
  for (Var p : parts) n.inputs.push_back(p.index);
  return push(std::move(n));
}

Var Tape::scale(Var x, double factor) {
  Node n;
  n.op = Op::kScale;
  n.inputs = {x.index};
  n.factor = factor;
  return push(std::move(n));
}

Var Tape::square(Var x) {
  Node n;
  n.op = Op::kSquare;
  n.inputs = {x.index};
  return push(std::move(n));
}

Var Tape::mean(Var x) {
  Node n;
  n.op = Op::kMean;
  n.inputs = {x.index};
  return push(std::move(n));
}

Var Tape::gather(Var x, Eigen::Index rows, Eigen::Index cols,
                 std::shared_ptr<const std::vector<Eigen::Index>> index) {
  if (!index) throw std::invalid_argument("tape: gather without an index map");
  Node n;
  n.op = Op::kGather;
  n.inputs = {x.index};
  n.rows = rows;
  n.cols = cols;
  n.index = std::move(index);
  return push(std::move(n));
}

void Tape::mark_output(Var v, std::string name) {
  if (v.index >= nodes_.size()) throw std::out_of_range("tape: unknown node");
  outputs_.emplace_back(std::move(name), v.index);
}

std::string Tape::describe(std::size_t i) const {
  std::ostringstream os;
  os << op_name(nodes_[i].op) << " (node " << i;
  if (!nodes_[i].name.empty()) os << " '" << nodes_[i].name << "'";
  os << ")";
  return os.str();
}

void Tape::compute(std::size_t i) {
  Node& n = nodes_[i];
  auto in = [&](std::size_t k) -> const Matrix& { return nodes_[n.inputs[k]].value; };
  switch (n.op) {
    case Op::kInput:
      return;
    case Op::kMatMul: {
      const Matrix& a = in(0);
      const Matrix& b = in(1);
      if (a.cols() != b.rows()) {
        throw ShapeError(describe(i) + ": inner dimensions differ, " + shape_of(a) +
                         " * " + shape_of(b));
      }
      n.value.noalias() = a * b;
      return;
    }
    case Op::kAddBias: {
      const Matrix& x = in(0);
      const Matrix& b = in(1);
      if (b.rows() == x.rows() && b.cols() == x.cols()) {
        n.value = x + b;
      } else if (b.rows() == 1 && b.cols() == x.cols()) {
        n.value = x.rowwise() + b.row(0);
      } else {
        throw ShapeError(describe(i) + ": expected bias 1x" + std::to_string(x.cols()) +
                         " or " + shape_of(x) + ", got " + shape_of(b));
      }
      return;
    }
    case Op::kTanh:
      n.value = in(0).array().tanh().matrix();
      return;
    case Op::kRelu:
      n.value = in(0).cwiseMax(0.0);
      return;
    case Op::kConcat: {
      Eigen::Index rows = 0;
      Eigen::Index cols = 0;
      const Matrix& first = in(0);
      for (std::size_t k = 0; k < n.inputs.size(); ++k) {
        const Matrix& p = in(k);
        if (n.axis == Axis::kRows) {
          if (p.cols() != first.cols()) {
            throw ShapeError(describe(i) + ": operand " + std::to_string(k) + " is " +
                             shape_of(p) + ", expected " + std::to_string(first.cols()) +
                             " columns");
          }
          rows += p.rows();
        } else {
          if (p.rows() != first.rows()) {
            throw ShapeError(describe(i) + ": operand " + std::to_string(k) + " is " +
                             shape_of(p) + ", expected " + std::to_string(first.rows()) +
                             " rows");
          }
          cols += p.cols();
        }
      }
      if (n.axis == Axis::kRows) {
        n.value.resize(rows, first.cols());
        Eigen::Index at = 0;
        for (std::size_t k = 0; k < n.inputs.size(); ++k) {
          n.value.middleRows(at, in(k).rows()) = in(k);
          at += in(k).rows();
        }
      } else {
        n.value.resize(first.rows(), cols);
        Eigen::Index at = 0;
        for (std::size_t k = 0; k < n.inputs.size(); ++k) {
          n.value.middleCols(at, in(k).cols()) = in(k);
          at += in(k).cols();
        }
      }
      return;
    }
    case Op::kScale:
      n.value = n.factor * in(0);
      return;
    case Op::kSquare:
      n.value = in(0).array().square().matrix();
      return;
    case Op::kMean: {
      const Matrix& x = in(0);
      if (x.size() == 0) throw ShapeError(describe(i) + ": mean of an empty matrix");
      n.value.resize(1, 1);
      n.value(0, 0) = x.mean();
      return;
    }
    case Op::kGather: {
      const Matrix& x = in(0);
      const auto& idx = *n.index;
      if (static_cast<Eigen::Index>(idx.size()) != n.rows * n.cols) {
        throw ShapeError(describe(i) + ": index map has " + std::to_string(idx.size()) +
                         " entries for a " + std::to_string(n.rows) + "x" +
                         std::to_string(n.cols) + " result");
      }
      n.value.resize(n.rows, n.cols);
      const double* src = x.data();
      double* dst = n.value.data();
      const Eigen::Index limit = x.size();
      for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] < 0 || idx[k] >= limit) {
          throw ShapeError(describe(i) + ": index " + std::to_string(idx[k]) +
                           " out of range for " + shape_of(x));
        }
        dst[k] = src[idx[k]];
      }
      return;
    }
  }
}

NamedMatrices Tape::evaluate(const NamedMatrices& bindings) {
  for (const auto& [name, value] : bindings) {
    auto it = inputs_by_name_.find(name);
    if (it == inputs_by_name_.end()) {
      throw std::invalid_argument("tape: no input named '" + name + "'");
    }
    nodes_[it->second].value = value;
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) compute(i);
  NamedMatrices out;
  for (const auto& [name, i] : outputs_) out[name] = nodes_[i].value;
  return out;
}

double Tape::scalar(Var v) const {
  const Matrix& m = value(v);
  if (m.rows() != 1 || m.cols() != 1) {
    throw ShapeError(describe(v.index) + ": expected a scalar, got " + shape_of(m));
  }
  return m(0, 0);
}

std::vector<std::string> Tape::parameter_names() const {
  std::vector<std::string> names;
  for (const Node& n : nodes_) {
    if (n.is_parameter) names.push_back(n.name);
  }
  return names;
}

void Tape::backprop(std::size_t i) {
  Node& n = nodes_[i];
  const Matrix& g = n.adjoint;
  auto accumulate = [&](std::size_t k, const auto& expr) {
    Node& src = nodes_[n.inputs[k]];
    if (!src.needs_grad) return;
    if (src.adjoint.size() == 0) {
      src.adjoint = expr;
    } else {
      src.adjoint += expr;
    }
  };
  switch (n.op) {
    case Op::kInput:
      return;
    case Op::kMatMul: {
      const Matrix& a = nodes_[n.inputs[0]].value;
      const Matrix& b = nodes_[n.inputs[1]].value;
      if (nodes_[n.inputs[0]].needs_grad) accumulate(0, Matrix(g * b.transpose()));
      if (nodes_[n.inputs[1]].needs_grad) accumulate(1, Matrix(a.transpose() * g));
      return;
    }
    case Op::kAddBias: {
      const Matrix& x = nodes_[n.inputs[0]].value;
      const Matrix& b = nodes_[n.inputs[1]].value;
      accumulate(0, g);
      if (nodes_[n.inputs[1]].needs_grad) {
        if (b.rows() == x.rows()) {
          accumulate(1, g);
        } else {
          accumulate(1, Matrix(g.colwise().sum()));
        }
      }
      return;
    }
    case Op::kTanh:
      accumulate(0, Matrix(g.array() * (1.0 - n.value.array().square())));
      return;
    case Op::kRelu: {
      const Matrix& x = nodes_[n.inputs[0]].value;
      accumulate(0, Matrix((x.array() > 0.0).select(g.array(), 0.0)));
      return;
    }
    case Op::kConcat: {
      Eigen::Index at = 0;
      for (std::size_t k = 0; k < n.inputs.size(); ++k) {
        const Matrix& p = nodes_[n.inputs[k]].value;
        if (n.axis == Axis::kRows) {
          if (nodes_[n.inputs[k]].needs_grad) accumulate(k, Matrix(g.middleRows(at, p.rows())));
          at += p.rows();
        } else {
          if (nodes_[n.inputs[k]].needs_grad) accumulate(k, Matrix(g.middleCols(at, p.cols())));
          at += p.cols();
        }
      }
      return;
    }
    case Op::kScale:
      accumulate(0, Matrix(n.factor * g));
      return;
    case Op::kSquare: {
      const Matrix& x = nodes_[n.inputs[0]].value;
      accumulate(0, Matrix(2.0 * x.array() * g.array()));
      return;
    }
    case Op::kMean: {
      const Matrix& x = nodes_[n.inputs[0]].value;
      const double share = g(0, 0) / static_cast<double>(x.size());
      accumulate(0, Matrix::Constant(x.rows(), x.cols(), share));
      return;
    }
    case Op::kGather: {
      Node& src = nodes_[n.inputs[0]];
      if (!src.needs_grad) return;
      if (src.adjoint.size() == 0) src.adjoint = Matrix::Zero(src.value.rows(), src.value.cols());
      const auto& idx = *n.index;
      double* dst = src.adjoint.data();
      const double* from = g.data();
      for (std::size_t k = 0; k < idx.size(); ++k) dst[idx[k]] += from[k];
      return;
    }
  }
}

NamedMatrices Tape::gradient(Var loss) {
  const Matrix& l = value(loss);
  if (l.rows() != 1 || l.cols() != 1) {
    throw ShapeError(describe(loss.index) + ": loss must be 1x1, got " + shape_of(l));
  }
  for (Node& n : nodes_) n.adjoint.resize(0, 0);
  nodes_[loss.index].adjoint = Matrix::Ones(1, 1);
  for (std::size_t i = loss.index + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.needs_grad || n.adjoint.size() == 0) continue;
    backprop(i);
  }
  NamedMatrices grads;
  for (Node& n : nodes_) {
    if (n.is_parameter) {
      if (n.adjoint.size() == 0) {
        grads[n.name] = Matrix::Zero(n.value.rows(), n.value.cols());
      } else {
        grads[n.name] = std::move(n.adjoint);
      }
    }
    n.adjoint.resize(0, 0);
  }
  return grads;
}

Vector finite_difference(const std::function<double(const Vector&)>& f, const Vector& x,
                         double h) {
  Vector grad(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + h;
    const double up = f(probe);
    probe[i] = orig - h;
    const double down = f(probe);
    probe[i] = orig;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double max_relative_error(const Vector& a, const Vector& b, double floor) {
  if (a.size() != b.size()) throw std::invalid_argument("max_relative_error: size mismatch");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

}  // namespace gogepo::diff
