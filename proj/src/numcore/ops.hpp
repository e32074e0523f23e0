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

#ifndef MTRAM_NUMCORE_OPS_HPP_
#define MTRAM_NUMCORE_OPS_HPP_

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "numcore/tape.hpp"

namespace mtram::num {

// Convolution weights stored flat as in_channels x taps x out_channels,
// i.e. a (in_channels*taps) x out_channels matrix whose row c*taps+s holds
// tap s of input channel c.
struct KernelGroup {
  std::size_t in_channels = 0;
  std::size_t taps = 0;
  std::size_t out_channels = 0;
  Parameter weights;

  KernelGroup() = default;
  KernelGroup(std::string name, std::size_t in, std::size_t k, std::size_t out);

  // Throws NumError if taps is even/zero or the buffer size is wrong.
  void validate() const;
};

enum class ElementwiseOp { kAdd, kMul, kTanh, kSigmoid };

// a (n x p) times b (p x q).
DiffTensor matmul(DiffTensor a, DiffTensor b);
// transpose(a) (p x n) times b (n x q), without materializing the transpose.
DiffTensor matmul_tn(DiffTensor a, DiffTensor b);

DiffTensor add(DiffTensor a, DiffTensor b);
DiffTensor sub(DiffTensor a, DiffTensor b);
DiffTensor mul(DiffTensor a, DiffTensor b);
DiffTensor scale(DiffTensor a, double s);
DiffTensor tanh(DiffTensor a);
DiffTensor sigmoid(DiffTensor a);

// Dispatches to add/mul (two operands) or tanh/sigmoid (one operand).
DiffTensor elementwise(ElementwiseOp op, std::span<const DiffTensor> operands);

// a (n x c) plus a 1 x c row broadcast over every row.
DiffTensor add_row(DiffTensor a, DiffTensor row);

// Softmax down each column: every column of the result sums to one.
DiffTensor softmax_over_rows(DiffTensor x);

// Same-length stride-1 convolution realised as overlap-add of the per-tap
// products h * W_s, with (taps-1)/2 rows trimmed from each end:
//   out[i] = sum_s h[i + (taps-1)/2 - s] * W_s, rows outside [0,n) are zero.
DiffTensor overlap_add_conv(DiffTensor h, DiffTensor kernel, std::size_t taps);
DiffTensor overlap_add_conv(DiffTensor h, const KernelGroup& kg);

DiffTensor concat_cols(DiffTensor a, DiffTensor b);
DiffTensor slice_rows(DiffTensor a, std::size_t begin, std::size_t count);
// Stacks 1 x c rows (all the same width) into an n x c matrix.
DiffTensor stack_rows(std::span<const DiffTensor> rows);

// Rows of `table` selected by `ids`. Gradients are scattered into
// table.grad directly; row `frozen_row` (if < rows) never receives one.
DiffTensor gather_rows(Tape& tape, Parameter& table, std::span<const int> ids,
                       std::size_t frozen_row);

// Inverted dropout. Identity when !training or rate == 0.
DiffTensor dropout(DiffTensor x, double rate, std::mt19937_64& rng, bool training);

// Sum of all entries as a 1 x 1 node.
DiffTensor sum(DiffTensor a);
// Row-wise inner products: out[i] = <a[i,:], b[i,:]>, shape n x 1.
DiffTensor row_dot(DiffTensor a, DiffTensor b);

// Uniform double in [0,1) from the top 53 bits of one draw.
double uniform01(std::mt19937_64& rng);

}  // namespace mtram::num

#endif  // MTRAM_NUMCORE_OPS_HPP_
