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


// Independent reference implementations of the same-length convolution.

#ifndef MTRAM_TESTS_CONV_ORACLES_HPP_
#define MTRAM_TESTS_CONV_ORACLES_HPP_

#include <cstddef>

#include "numcore/matrix.hpp"

namespace mtram::testing {

using num::Matrix;

// Direct sliding window: out[i][o] = sum_s sum_c h[i + c0 - s][c] * w[c*k+s][o].
inline Matrix sliding_window_conv(const Matrix& h, const Matrix& w, std::size_t k) {
  const std::size_t n = h.rows(), cin = h.cols(), cout = w.cols();
  const long c0 = static_cast<long>((k - 1) / 2);
  Matrix out(n, cout);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t o = 0; o < cout; ++o) {
      double acc = 0.0;
      for (std::size_t s = 0; s < k; ++s) {
        const long src = static_cast<long>(i) + c0 - static_cast<long>(s);
        if (src < 0 || src >= static_cast<long>(n)) continue;
        for (std::size_t c = 0; c < cin; ++c) acc += h(src, c) * w(c * k + s, o);
      }
      out(i, o) = acc;
    }
  }
  return out;
}

// Literal overlap-add: place each per-tap product at row offset s in an
// (n+k-1)-row buffer, sum, then trim (k-1)/2 rows from both ends.
inline Matrix overlap_add_enumeration(const Matrix& h, const Matrix& w, std::size_t k) {
  const std::size_t n = h.rows(), cin = h.cols(), cout = w.cols();
  Matrix full(n + k - 1, cout);
  for (std::size_t s = 0; s < k; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t o = 0; o < cout; ++o) {
        double p = 0.0;
        for (std::size_t c = 0; c < cin; ++c) p += h(i, c) * w(c * k + s, o);
        full(i + s, o) += p;
      }
    }
  }
  Matrix out(n, cout);
  const std::size_t trim = (k - 1) / 2;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t o = 0; o < cout; ++o) out(i, o) = full(i + trim, o);
  }
  return out;
}

}  // namespace mtram::testing

#endif  // MTRAM_TESTS_CONV_ORACLES_HPP_
