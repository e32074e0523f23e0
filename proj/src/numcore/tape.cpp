// Copyright 2026 The MT-RAM Authors.
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

#include "numcore/tape.hpp"

#include <cmath>

namespace mtram::num {

void check_finite(const Matrix& m, const char* op) {
  for (double v : m.data()) {
    if (!std::isfinite(v)) {
      throw NumError(std::string(op) + ": non-finite value in output");
    }
  }
}

const Matrix& DiffTensor::value() const { return tape_->value(id_); }
const Matrix& DiffTensor::grad() const {
  return static_cast<const Tape*>(tape_)->grad(id_);
}

DiffTensor Tape::constant(Matrix value) {
  check_finite(value, "constant");
  owned_doubles_ += value.size();
  Node n;
  n.owned = std::move(value);
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

DiffTensor Tape::parameter(Parameter& p) {
  check_finite(p.value, p.name.c_str());
  Node n;
  n.external = &p.value;
  n.param = &p;
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

DiffTensor Tape::record(const char* op, Matrix value, BackwardFn fn) {
  check_finite(value, op);
  owned_doubles_ += value.size();
  Node n;
  n.owned = std::move(value);
  n.backward = std::move(fn);
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

const Matrix& Tape::value(std::size_t id) const {
  const Node& n = nodes_.at(id);
  return n.external != nullptr ? *n.external : n.owned;
}

Matrix& Tape::grad(std::size_t id) {
  return nodes_.at(id).grad;
}

const Matrix& Tape::grad(std::size_t id) const {
  const Node& n = nodes_.at(id);
  if (n.grad.size() != value(id).size()) {
    throw NumError("Tape::grad: gradient requested before backward()");
  }
  return n.grad;
}

void Tape::backward(DiffTensor loss) {
  if (loss.tape() != this) throw NumError("backward: loss belongs to another tape");
  const Matrix& lv = value(loss.id());
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw NumError("backward: loss must be 1x1, got " + lv.shape_str());
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Matrix& v = value(i);
    nodes_[i].grad = Matrix(v.rows(), v.cols());
  }
  nodes_[loss.id()].grad[0] = 1.0;
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.backward) n.backward(*this, i);
  }
  for (Node& n : nodes_) {
    if (n.param == nullptr) continue;
    if (!n.param->grad.same_shape(n.param->value)) n.param->zero_grad();
    std::vector<double>& dst = n.param->grad.data();
    const std::vector<double>& src = n.grad.data();
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] += src[k];
  }
}

}  // namespace mtram::num
