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

#include "numcore/ops.hpp"

#include <cmath>
#include <string>

namespace mtram::num {
namespace {

Tape& same_tape(DiffTensor a, DiffTensor b, const char* op) {
  if (!a.valid() || a.tape() != b.tape()) {
    throw NumError(std::string(op) + ": operands must live on the same tape");
  }
  return *a.tape();
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b)) {
    throw NumError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                   b.shape_str());
  }
}

double sigmoid_scalar(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

KernelGroup::KernelGroup(std::string name, std::size_t in, std::size_t k, std::size_t out)
    : in_channels(in), taps(k), out_channels(out),
      weights(std::move(name), Matrix(in * k, out)) {
  validate();
}

void KernelGroup::validate() const {
  if (taps == 0 || taps % 2 == 0) {
    throw NumError("KernelGroup " + weights.name + ": taps must be odd, got " +
                   std::to_string(taps));
  }
  if (weights.value.rows() != in_channels * taps || weights.value.cols() != out_channels) {
    throw NumError("KernelGroup " + weights.name + ": weights are " +
                   weights.value.shape_str() + ", expected " +
                   std::to_string(in_channels * taps) + "x" + std::to_string(out_channels));
  }
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

DiffTensor matmul(DiffTensor a, DiffTensor b) {
  Tape& t = same_tape(a, b, "matmul");
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols() != bv.rows()) {
    throw NumError("matmul: inner dimensions differ " + av.shape_str() + " * " +
                   bv.shape_str());
  }
  const std::size_t n = av.rows(), p = av.cols(), q = bv.cols();
  Matrix out(n, q);
  for (std::size_t i = 0; i < n; ++i) {
    double* orow = out.row(i).data();
    for (std::size_t k = 0; k < p; ++k) {
      const double x = av(i, k);
      if (x == 0.0) continue;
      const double* brow = bv.row(k).data();
      for (std::size_t j = 0; j < q; ++j) orow[j] += x * brow[j];
    }
  }
  const std::size_t ia = a.id(), ib = b.id();
  return t.record("matmul", std::move(out), [ia, ib, n, p, q](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    const Matrix& av = tp.value(ia);
    const Matrix& bv = tp.value(ib);
    Matrix& ga = tp.grad(ia);
    for (std::size_t i = 0; i < n; ++i) {
      const double* grow = g.row(i).data();
      for (std::size_t k = 0; k < p; ++k) {
        const double* brow = bv.row(k).data();
        double acc = 0.0;
        for (std::size_t j = 0; j < q; ++j) acc += grow[j] * brow[j];
        ga(i, k) += acc;
      }
    }
    Matrix& gb = tp.grad(ib);
    for (std::size_t i = 0; i < n; ++i) {
      const double* grow = g.row(i).data();
      for (std::size_t k = 0; k < p; ++k) {
        const double x = av(i, k);
        if (x == 0.0) continue;
        double* gbrow = gb.row(k).data();
        for (std::size_t j = 0; j < q; ++j) gbrow[j] += x * grow[j];
      }
    }
  });
}

DiffTensor matmul_tn(DiffTensor a, DiffTensor b) {
  Tape& t = same_tape(a, b, "matmul_tn");
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.rows() != bv.rows()) {
    throw NumError("matmul_tn: row counts differ " + av.shape_str() + " vs " +
                   bv.shape_str());
  }
  const std::size_t n = av.rows(), p = av.cols(), q = bv.cols();
  Matrix out(p, q);
  for (std::size_t i = 0; i < n; ++i) {
    const double* brow = bv.row(i).data();
    for (std::size_t k = 0; k < p; ++k) {
      const double x = av(i, k);
      double* orow = out.row(k).data();
      for (std::size_t j = 0; j < q; ++j) orow[j] += x * brow[j];
    }
  }
  const std::size_t ia = a.id(), ib = b.id();
  return t.record("matmul_tn", std::move(out), [ia, ib, n, p, q](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    const Matrix& av = tp.value(ia);
    const Matrix& bv = tp.value(ib);
    Matrix& ga = tp.grad(ia);
    Matrix& gb = tp.grad(ib);
    for (std::size_t i = 0; i < n; ++i) {
      const double* brow = bv.row(i).data();
      double* gbrow = gb.row(i).data();
      for (std::size_t k = 0; k < p; ++k) {
        const double* grow = g.row(k).data();
        double acc = 0.0;
        for (std::size_t j = 0; j < q; ++j) acc += brow[j] * grow[j];
        ga(i, k) += acc;
        const double x = av(i, k);
        for (std::size_t j = 0; j < q; ++j) gbrow[j] += x * grow[j];
      }
    }
  });
}

DiffTensor add(DiffTensor a, DiffTensor b) {
  Tape& t = same_tape(a, b, "add");
  require_same_shape(a.value(), b.value(), "add");
  Matrix out = a.value();
  const auto& bd = b.value().data();
  for (std::size_t k = 0; k < bd.size(); ++k) out[k] += bd[k];
  const std::size_t ia = a.id(), ib = b.id();
  return t.record("add", std::move(out), [ia, ib](Tape& tp, std::size_t self) {
    const auto& g = tp.grad(self).data();
    auto& ga = tp.grad(ia).data();
    for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k];
    auto& gb = tp.grad(ib).data();
    for (std::size_t k = 0; k < g.size(); ++k) gb[k] += g[k];
  });
}

DiffTensor sub(DiffTensor a, DiffTensor b) {
  Tape& t = same_tape(a, b, "sub");
  require_same_shape(a.value(), b.value(), "sub");
  Matrix out = a.value();
  const auto& bd = b.value().data();
  for (std::size_t k = 0; k < bd.size(); ++k) out[k] -= bd[k];
  const std::size_t ia = a.id(), ib = b.id();
  return t.record("sub", std::move(out), [ia, ib](Tape& tp, std::size_t self) {
    const auto& g = tp.grad(self).data();
    auto& ga = tp.grad(ia).data();
    for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k];
    auto& gb = tp.grad(ib).data();
    for (std::size_t k = 0; k < g.size(); ++k) gb[k] -= g[k];
  });
}

DiffTensor mul(DiffTensor a, DiffTensor b) {
  Tape& t = same_tape(a, b, "mul");
  require_same_shape(a.value(), b.value(), "mul");
  Matrix out = a.value();
  const auto& bd = b.value().data();
  for (std::size_t k = 0; k < bd.size(); ++k) out[k] *= bd[k];
  const std::size_t ia = a.id(), ib = b.id();
  return t.record("mul", std::move(out), [ia, ib](Tape& tp, std::size_t self) {
    const auto& g = tp.grad(self).data();
    const auto& av = tp.value(ia).data();
    const auto& bv = tp.value(ib).data();
    auto& ga = tp.grad(ia).data();
    for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * bv[k];
    auto& gb = tp.grad(ib).data();
    for (std::size_t k = 0; k < g.size(); ++k) gb[k] += g[k] * av[k];
  });
}

DiffTensor scale(DiffTensor a, double s) {
  Matrix out = a.value();
  for (double& v : out.data()) v *= s;
  const std::size_t ia = a.id();
  return a.tape()->record("scale", std::move(out), [ia, s](Tape& tp, std::size_t self) {
    const auto& g = tp.grad(self).data();
    auto& ga = tp.grad(ia).data();
    for (std::size_t k = 0; k < g.size(); ++k) ga[k] += s * g[k];
  });
}

DiffTensor tanh(DiffTensor a) {
  Matrix out = a.value();
  for (double& v : out.data()) v = std::tanh(v);
  const std::size_t ia = a.id();
  return a.tape()->record("tanh", std::move(out), [ia](Tape& tp, std::size_t self) {
    const auto& g = tp.grad(self).data();
    const auto& y = tp.value(self).data();
    auto& ga = tp.grad(ia).data();
    for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * (1.0 - y[k] * y[k]);
  });
}

DiffTensor sigmoid(DiffTensor a) {
  Matrix out = a.value();
  for (double& v : out.data()) v = sigmoid_scalar(v);
  const std::size_t ia = a.id();
  return a.tape()->record("sigmoid", std::move(out), [ia](Tape& tp, std::size_t self) {
    const auto& g = tp.grad(self).data();
    const auto& y = tp.value(self).data();
    auto& ga = tp.grad(ia).data();
    for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * y[k] * (1.0 - y[k]);
  });
}

DiffTensor elementwise(ElementwiseOp op, std::span<const DiffTensor> operands) {
  const bool binary = op == ElementwiseOp::kAdd || op == ElementwiseOp::kMul;
  const std::size_t want = binary ? 2 : 1;
  if (operands.size() != want) {
    throw NumError("elementwise: expected " + std::to_string(want) + " operands, got " +
                   std::to_string(operands.size()));
  }
  switch (op) {
    case ElementwiseOp::kAdd: return add(operands[0], operands[1]);
    case ElementwiseOp::kMul: return mul(operands[0], operands[1]);
    case ElementwiseOp::kTanh: return tanh(operands[0]);
    case ElementwiseOp::kSigmoid: return sigmoid(operands[0]);
  }
  throw NumError("elementwise: unknown op");
}

DiffTensor add_row(DiffTensor a, DiffTensor row) {
  Tape& t = same_tape(a, row, "add_row");
  const Matrix& rv = row.value();
  if (rv.rows() != 1 || rv.cols() != a.cols()) {
    throw NumError("add_row: expected 1x" + std::to_string(a.cols()) + " row, got " +
                   rv.shape_str());
  }
  Matrix out = a.value();
  const std::size_t c = out.cols();
  for (std::size_t i = 0; i < out.rows(); ++i) {
    double* o = out.row(i).data();
    for (std::size_t j = 0; j < c; ++j) o[j] += rv[j];
  }
  const std::size_t ia = a.id(), ir = row.id();
  return t.record("add_row", std::move(out), [ia, ir](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    auto& ga = tp.grad(ia).data();
    for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k];
    Matrix& gr = tp.grad(ir);
    for (std::size_t i = 0; i < g.rows(); ++i) {
      const auto grow = g.row(i);
      for (std::size_t j = 0; j < g.cols(); ++j) gr[j] += grow[j];
    }
  });
}

DiffTensor softmax_over_rows(DiffTensor x) {
  const Matrix& xv = x.value();
  const std::size_t n = xv.rows(), m = xv.cols();
  if (n == 0) throw NumError("softmax_over_rows: needs at least one row");
  Matrix out(n, m);
  for (std::size_t j = 0; j < m; ++j) {
    double mx = xv(0, j);
    for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, xv(i, j));
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      out(i, j) = std::exp(xv(i, j) - mx);
      total += out(i, j);
    }
    for (std::size_t i = 0; i < n; ++i) out(i, j) /= total;
  }
  const std::size_t ix = x.id();
  return x.tape()->record("softmax_over_rows", std::move(out),
                          [ix, n, m](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    const Matrix& y = tp.value(self);
    Matrix& gx = tp.grad(ix);
    std::vector<double> dots(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) dots[j] += g(i, j) * y(i, j);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) gx(i, j) += y(i, j) * (g(i, j) - dots[j]);
    }
  });
}

DiffTensor overlap_add_conv(DiffTensor h, DiffTensor kernel, std::size_t taps) {
  Tape& t = same_tape(h, kernel, "overlap_add_conv");
  if (taps == 0 || taps % 2 == 0) {
    throw NumError("overlap_add_conv: taps must be odd, got " + std::to_string(taps));
  }
  const Matrix& hv = h.value();
  const Matrix& kv = kernel.value();
  const std::size_t n = hv.rows(), cin = hv.cols(), cout = kv.cols();
  if (n == 0) throw NumError("overlap_add_conv: empty sequence");
  if (kv.rows() != cin * taps) {
    throw NumError("overlap_add_conv: kernel " + kv.shape_str() + " does not match " +
                   std::to_string(cin) + " input channels x " + std::to_string(taps) +
                   " taps");
  }
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(taps / 2);
  const std::ptrdiff_t len = static_cast<std::ptrdiff_t>(n);
  Matrix out(n, cout);
  // Slice s of the untrimmed overlap-add sits at row offset s; after
  // trimming `half` rows, output row i receives h[i + half - s] * W_s.
  for (std::ptrdiff_t i = 0; i < len; ++i) {
    double* orow = out.row(static_cast<std::size_t>(i)).data();
    for (std::size_t s = 0; s < taps; ++s) {
      const std::ptrdiff_t src = i + half - static_cast<std::ptrdiff_t>(s);
      if (src < 0 || src >= len) continue;
      const double* hrow = hv.row(static_cast<std::size_t>(src)).data();
      for (std::size_t c = 0; c < cin; ++c) {
        const double x = hrow[c];
        if (x == 0.0) continue;
        const double* w = kv.row(c * taps + s).data();
        for (std::size_t o = 0; o < cout; ++o) orow[o] += x * w[o];
      }
    }
  }
  const std::size_t ih = h.id(), ik = kernel.id();
  return t.record("overlap_add_conv", std::move(out),
                  [ih, ik, taps, half, len, cin, cout](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    const Matrix& hv = tp.value(ih);
    const Matrix& kv = tp.value(ik);
    Matrix& gh = tp.grad(ih);
    Matrix& gk = tp.grad(ik);
    for (std::ptrdiff_t i = 0; i < len; ++i) {
      const double* grow = g.row(static_cast<std::size_t>(i)).data();
      for (std::size_t s = 0; s < taps; ++s) {
        const std::ptrdiff_t src = i + half - static_cast<std::ptrdiff_t>(s);
        if (src < 0 || src >= len) continue;
        const double* hrow = hv.row(static_cast<std::size_t>(src)).data();
        double* ghrow = gh.row(static_cast<std::size_t>(src)).data();
        for (std::size_t c = 0; c < cin; ++c) {
          const double* w = kv.row(c * taps + s).data();
          double* gw = gk.row(c * taps + s).data();
          const double x = hrow[c];
          double acc = 0.0;
          for (std::size_t o = 0; o < cout; ++o) {
            acc += grow[o] * w[o];
            gw[o] += x * grow[o];
          }
          ghrow[c] += acc;
        }
      }
    }
  });
}

DiffTensor overlap_add_conv(DiffTensor h, const KernelGroup& kg) {
  kg.validate();
  if (h.cols() != kg.in_channels) {
    throw NumError("overlap_add_conv: input has " + std::to_string(h.cols()) +
                   " channels, kernel group " + kg.weights.name + " expects " +
                   std::to_string(kg.in_channels));
  }
  // The tape binds the parameter by address; the group must outlive it.
  DiffTensor w = h.tape()->parameter(const_cast<Parameter&>(kg.weights));
  return overlap_add_conv(h, w, kg.taps);
}

DiffTensor concat_cols(DiffTensor a, DiffTensor b) {
  Tape& t = same_tape(a, b, "concat_cols");
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.rows() != bv.rows()) {
    throw NumError("concat_cols: row counts differ " + av.shape_str() + " vs " +
                   bv.shape_str());
  }
  const std::size_t n = av.rows(), p = av.cols(), q = bv.cols();
  Matrix out(n, p + q);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(av.row(i).begin(), av.row(i).end(), out.row(i).begin());
    std::copy(bv.row(i).begin(), bv.row(i).end(), out.row(i).begin() + p);
  }
  const std::size_t ia = a.id(), ib = b.id();
  return t.record("concat_cols", std::move(out), [ia, ib, n, p, q](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    Matrix& ga = tp.grad(ia);
    Matrix& gb = tp.grad(ib);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) ga(i, j) += g(i, j);
      for (std::size_t j = 0; j < q; ++j) gb(i, j) += g(i, p + j);
    }
  });
}

DiffTensor slice_rows(DiffTensor a, std::size_t begin, std::size_t count) {
  const Matrix& av = a.value();
  if (begin + count > av.rows()) {
    throw NumError("slice_rows: rows [" + std::to_string(begin) + ", " +
                   std::to_string(begin + count) + ") out of range for " + av.shape_str());
  }
  const std::size_t c = av.cols();
  Matrix out(count, c);
  std::copy(av.data().begin() + static_cast<std::ptrdiff_t>(begin * c),
            av.data().begin() + static_cast<std::ptrdiff_t>((begin + count) * c),
            out.data().begin());
  const std::size_t ia = a.id();
  return a.tape()->record("slice_rows", std::move(out),
                          [ia, begin, c](Tape& tp, std::size_t self) {
    const auto& g = tp.grad(self).data();
    auto& ga = tp.grad(ia).data();
    for (std::size_t k = 0; k < g.size(); ++k) ga[begin * c + k] += g[k];
  });
}

DiffTensor stack_rows(std::span<const DiffTensor> rows) {
  if (rows.empty()) throw NumError("stack_rows: no rows");
  Tape* t = rows[0].tape();
  const std::size_t c = rows[0].cols();
  Matrix out(rows.size(), c);
  std::vector<std::size_t> ids;
  ids.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Matrix& v = rows[i].value();
    if (rows[i].tape() != t || v.rows() != 1 || v.cols() != c) {
      throw NumError("stack_rows: row " + std::to_string(i) + " is " + v.shape_str() +
                     ", expected 1x" + std::to_string(c) + " on the same tape");
    }
    std::copy(v.data().begin(), v.data().end(), out.row(i).begin());
    ids.push_back(rows[i].id());
  }
  return t->record("stack_rows", std::move(out),
                   [ids = std::move(ids), c](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      auto& gi = tp.grad(ids[i]).data();
      const auto grow = g.row(i);
      for (std::size_t j = 0; j < c; ++j) gi[j] += grow[j];
    }
  });
}

DiffTensor gather_rows(Tape& tape, Parameter& table, std::span<const int> ids,
                       std::size_t frozen_row) {
  const std::size_t vocab = table.value.rows(), d = table.value.cols();
  Matrix out(ids.size(), d);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= vocab) {
      throw NumError("gather_rows: id " + std::to_string(ids[i]) + " outside table of " +
                     std::to_string(vocab) + " rows");
    }
    const auto src = table.value.row(static_cast<std::size_t>(ids[i]));
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return tape.record("gather_rows", std::move(out),
                     [&table, idv = std::vector<int>(ids.begin(), ids.end()), d,
                      frozen_row](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    if (!table.grad.same_shape(table.value)) table.zero_grad();
    for (std::size_t i = 0; i < idv.size(); ++i) {
      const auto row = static_cast<std::size_t>(idv[i]);
      if (row == frozen_row) continue;
      double* dst = table.grad.row(row).data();
      const double* src = g.row(i).data();
      for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
    }
  });
}

DiffTensor dropout(DiffTensor x, double rate, std::mt19937_64& rng, bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw NumError("dropout: rate must be in [0,1), got " + std::to_string(rate));
  }
  if (!training || rate == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - rate);
  std::vector<double> mask(x.value().size());
  for (double& m : mask) m = uniform01(rng) < rate ? 0.0 : keep_scale;
  Matrix out = x.value();
  for (std::size_t k = 0; k < mask.size(); ++k) out[k] *= mask[k];
  const std::size_t ix = x.id();
  return x.tape()->record("dropout", std::move(out),
                          [ix, mask = std::move(mask)](Tape& tp, std::size_t self) {
    const auto& g = tp.grad(self).data();
    auto& gx = tp.grad(ix).data();
    for (std::size_t k = 0; k < g.size(); ++k) gx[k] += g[k] * mask[k];
  });
}

DiffTensor sum(DiffTensor a) {
  double total = 0.0;
  for (double v : a.value().data()) total += v;
  const std::size_t ia = a.id();
  return a.tape()->record("sum", Matrix(1, 1, total), [ia](Tape& tp, std::size_t self) {
    const double g = tp.grad(self)[0];
    for (double& v : tp.grad(ia).data()) v += g;
  });
}

DiffTensor row_dot(DiffTensor a, DiffTensor b) {
  Tape& t = same_tape(a, b, "row_dot");
  require_same_shape(a.value(), b.value(), "row_dot");
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  const std::size_t n = av.rows(), c = av.cols();
  Matrix out(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < c; ++j) acc += av(i, j) * bv(i, j);
    out(i, 0) = acc;
  }
  const std::size_t ia = a.id(), ib = b.id();
  return t.record("row_dot", std::move(out), [ia, ib, n, c](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    const Matrix& av = tp.value(ia);
    const Matrix& bv = tp.value(ib);
    Matrix& ga = tp.grad(ia);
    Matrix& gb = tp.grad(ib);
    for (std::size_t i = 0; i < n; ++i) {
      const double gi = g(i, 0);
      for (std::size_t j = 0; j < c; ++j) {
        ga(i, j) += gi * bv(i, j);
        gb(i, j) += gi * av(i, j);
      }
    }
  });
}

}  // namespace mtram::num
