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

#ifndef MTRAM_NUMCORE_TAPE_HPP_
#define MTRAM_NUMCORE_TAPE_HPP_

#include <cstddef>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "numcore/matrix.hpp"

namespace mtram::num {

// A learned weight array. The tape reads `value` in place and accumulates
// into `grad` when a backward pass reaches it.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Matrix v)
      : name(std::move(n)), value(std::move(v)), grad(value.rows(), value.cols()) {}

  void zero_grad() { grad = Matrix(value.rows(), value.cols()); }
};

class Tape;

// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
class DiffTensor {
 public:
  DiffTensor() = default;

  const Matrix& value() const;
  const Matrix& grad() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  std::size_t id() const { return id_; }
  Tape* tape() const { return tape_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  DiffTensor(Tape* t, std::size_t id) : tape_(t), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Reverse-mode tape. Nodes are appended in evaluation order, so the
// recording order is already topological; backward walks it in reverse.
class Tape {
 public:
  // Propagates the output gradient of node `self` into its inputs.
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf holding an owned value. Its gradient is available after backward().
  DiffTensor constant(Matrix value);

  // Leaf bound to a parameter. The value is read in place; backward()
  // adds the node gradient into p.grad.
  DiffTensor parameter(Parameter& p);

  // Appends an op output. Throws NumError if `value` has non-finite entries.
  DiffTensor record(const char* op, Matrix value, BackwardFn fn);

  // Fills gradient buffers with d(loss)/d(node). Nodes recorded after
  // `loss`, or not reachable from it, keep a zero gradient.
  void backward(DiffTensor loss);

  const Matrix& value(std::size_t id) const;
  Matrix& grad(std::size_t id);
  const Matrix& grad(std::size_t id) const;

  std::size_t size() const { return nodes_.size(); }
  // Doubles held by owned node values; used to bound per-document memory.
  std::size_t owned_value_doubles() const { return owned_doubles_; }

 private:
  struct Node {
    Matrix owned;
    const Matrix* external = nullptr;
    Parameter* param = nullptr;
    Matrix grad;
    BackwardFn backward;
  };

  // Deque keeps value()/grad() references stable while the tape grows.
  std::deque<Node> nodes_;
  std::size_t owned_doubles_ = 0;
};

// Throws NumError naming `op` if any entry of `m` is NaN or infinite.
void check_finite(const Matrix& m, const char* op);

}  // namespace mtram::num

#endif  // MTRAM_NUMCORE_TAPE_HPP_
