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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "numcore/grad_check.hpp"
#include "numcore/hash.hpp"
#include "numcore/ops.hpp"
#include "conv_oracles.hpp"
#include "test_util.hpp"

namespace mtram::num {
namespace {

using mtram::testing::fd_max_rel_error;
using mtram::testing::overlap_add_enumeration;
using mtram::testing::sliding_window_conv;
using mtram::testing::max_abs_diff;
using mtram::testing::random_matrix;

Matrix conv_value(const Matrix& h, const Matrix& w, std::size_t k) {
  Tape t;
  return overlap_add_conv(t.constant(h), t.constant(w), k).value();
}

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  std::mt19937_64 rng(3);
  Tape t;
  const Matrix m = random_matrix(2, 2, rng);
  EXPECT_EQ(matmul(t.constant(Matrix::Identity(2)), t.constant(m)).value(), m);
}

TEST(Matmul, HandComputedProduct) {
  Tape t;
  auto out = matmul(t.constant(Matrix::FromRows({{1, 2}, {3, 4}})),
                    t.constant(Matrix::FromRows({{0}, {1}})));
  EXPECT_EQ(out.value(), Matrix::FromRows({{2}, {4}}));
}

TEST(Matmul, GradientOfSumIsReplicatedRowSumsOfB) {
  std::mt19937_64 rng(4);
  const Matrix a = random_matrix(3, 4, rng), b = random_matrix(4, 2, rng);
  Tape t;
  auto ta = t.constant(a);
  t.backward(sum(matmul(ta, t.constant(b))));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(ta.grad()(i, k), b(k, 0) + b(k, 1));
  }
  const double err = fd_max_rel_error(
      [](Tape&, const std::vector<DiffTensor>& x) { return sum(matmul(x[0], x[1])); }, {a, b});
  EXPECT_LE(err, 1e-6);
}

TEST(Matmul, RejectsInnerDimensionMismatch) {
  Tape t;
  EXPECT_THROW(matmul(t.constant(Matrix(2, 3)), t.constant(Matrix(2, 3))), NumError);
  EXPECT_THROW(matmul_tn(t.constant(Matrix(2, 3)), t.constant(Matrix(3, 3))), NumError);
}

TEST(Matmul, TransposedVariantMatchesExplicitTranspose) {
  std::mt19937_64 rng(5);
  const Matrix a = random_matrix(5, 3, rng), b = random_matrix(5, 2, rng);
  Matrix at(3, 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j) at(j, i) = a(i, j);
  Tape t;
  EXPECT_LE(max_abs_diff(matmul_tn(t.constant(a), t.constant(b)).value(),
                         matmul(t.constant(at), t.constant(b)).value()),
            1e-15);
  EXPECT_LE(fd_max_rel_error(
                [](Tape&, const std::vector<DiffTensor>& x) {
                  return sum(tanh(matmul_tn(x[0], x[1])));
                },
                {a, b}),
            1e-6);
}

TEST(Elementwise, AnalyticValues) {
  Tape t;
  const DiffTensor zero = t.constant(Matrix(1, 1));
  const DiffTensor one[] = {zero};
  EXPECT_EQ(elementwise(ElementwiseOp::kSigmoid, one).value()[0], 0.5);
  EXPECT_EQ(elementwise(ElementwiseOp::kTanh, one).value()[0], 0.0);
}

TEST(Elementwise, MulByZerosIsZeros) {
  std::mt19937_64 rng(6);
  Tape t;
  const DiffTensor ops[] = {t.constant(random_matrix(4, 3, rng)), t.constant(Matrix(4, 3))};
  EXPECT_EQ(elementwise(ElementwiseOp::kMul, ops).value(), Matrix(4, 3));
}

TEST(Elementwise, ShapeMismatchAndArityRejected) {
  Tape t;
  const DiffTensor bad[] = {t.constant(Matrix(2, 2)), t.constant(Matrix(2, 3))};
  EXPECT_THROW(elementwise(ElementwiseOp::kAdd, bad), NumError);
  EXPECT_THROW(elementwise(ElementwiseOp::kMul, bad), NumError);
  const DiffTensor single[] = {t.constant(Matrix(2, 2))};
  EXPECT_THROW(elementwise(ElementwiseOp::kAdd, single), NumError);
  EXPECT_THROW(elementwise(ElementwiseOp::kTanh, bad), NumError);
}

TEST(Elementwise, LocalDerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(7);
  const Matrix a = random_matrix(3, 4, rng, -2, 2), b = random_matrix(3, 4, rng, -2, 2);
  EXPECT_LE(fd_max_rel_error(
                [](Tape&, const std::vector<DiffTensor>& x) {
                  return sum(mul(tanh(x[0]), sigmoid(add(x[0], x[1]))));
                },
                {a, b}),
            1e-7);
}

TEST(Softmax, EqualColumnIsUniform) {
  Tape t;
  auto out = softmax_over_rows(t.constant(Matrix(4, 2, 1.7)));
  for (double v : out.value().data()) EXPECT_NEAR(v, 0.25, 1e-15);
}

TEST(Softmax, TwoPointAnalyticCase) {
  Tape t;
  auto out = softmax_over_rows(t.constant(Matrix::FromRows({{0.0}, {std::log(3.0)}})));
  EXPECT_NEAR(out.value()[0], 0.25, 1e-15);
  EXPECT_NEAR(out.value()[1], 0.75, 1e-15);
}

TEST(Softmax, BackwardMatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  const Matrix x = random_matrix(5, 3, rng, -3, 3), w = random_matrix(5, 3, rng);
  EXPECT_LE(fd_max_rel_error(
                [](Tape&, const std::vector<DiffTensor>& in) {
                  return sum(mul(softmax_over_rows(in[0]), in[1]));
                },
                {x, w}),
            1e-6);
}

TEST(Softmax, ColumnsSumToOneAndShiftInvariant) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> dim(1, 30);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = dim(rng), m = dim(rng);
    Matrix x = random_matrix(n, m, rng, -20, 20);
    Tape t;
    const Matrix p = softmax_over_rows(t.constant(x)).value();
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_GT(p(i, j), 0.0);
        EXPECT_LE(p(i, j), 1.0);
        s += p(i, j);
      }
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
    const Matrix shift = random_matrix(1, m, rng, -50, 50);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) x(i, j) += shift(0, j);
    EXPECT_LE(max_abs_diff(p, softmax_over_rows(t.constant(x)).value()), 1e-12);
  }
}

TEST(OverlapAddConv, CenterTapIsIdentity) {
  const Matrix h = Matrix::FromRows({{1}, {2}, {3}});
  EXPECT_EQ(conv_value(h, Matrix::FromRows({{0}, {1}, {0}}), 3), h);
}

TEST(OverlapAddConv, FirstTapShiftsUp) {
  const Matrix h = Matrix::FromRows({{1}, {2}, {3}});
  const Matrix w = Matrix::FromRows({{1}, {0}, {0}});
  const Matrix expected = Matrix::FromRows({{2}, {3}, {0}});
  EXPECT_EQ(overlap_add_enumeration(h, w, 3), expected);
  EXPECT_EQ(conv_value(h, w, 3), expected);
}

TEST(OverlapAddConv, MatchesSlidingWindowOnRandomInstances) {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> len(1, 40), ch(1, 8), tap(0, 2);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = len(rng), cin = ch(rng), cout = ch(rng), k = 2 * tap(rng) + 1;
    const Matrix h = random_matrix(n, cin, rng), w = random_matrix(cin * k, cout, rng);
    const Matrix got = conv_value(h, w, k);
    ASSERT_EQ(got.rows(), n);
    ASSERT_EQ(got.cols(), cout);
    worst = std::max(worst, max_abs_diff(got, sliding_window_conv(h, w, k)));
    worst = std::max(worst, max_abs_diff(got, overlap_add_enumeration(h, w, k)));
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(OverlapAddConv, RejectsEvenTapsAndBadShapes) {
  Tape t;
  EXPECT_THROW(overlap_add_conv(t.constant(Matrix(4, 2)), t.constant(Matrix(4, 1)), 2), NumError);
  EXPECT_THROW(overlap_add_conv(t.constant(Matrix(4, 2)), t.constant(Matrix(5, 1)), 3), NumError);
  EXPECT_THROW(KernelGroup("k", 2, 4, 3).validate(), NumError);
  EXPECT_NO_THROW(KernelGroup("k", 2, 5, 3).validate());
}

TEST(OverlapAddConv, GradientsReachInputAndKernel) {
  std::mt19937_64 rng(11);
  for (std::size_t k : {1u, 3u, 5u}) {
    const Matrix h = random_matrix(6, 3, rng), w = random_matrix(3 * k, 2, rng);
    EXPECT_LE(fd_max_rel_error(
                  [k](Tape&, const std::vector<DiffTensor>& x) {
                    return sum(tanh(overlap_add_conv(x[0], x[1], k)));
                  },
                  {h, w}),
              1e-6)
        << "k=" << k;
  }
}

TEST(OverlapAddConv, KernelGroupGradientAccumulatesIntoParameter) {
  std::mt19937_64 rng(12);
  KernelGroup kg("kg", 2, 3, 2);
  kg.weights.value = random_matrix(6, 2, rng);
  const Matrix h = random_matrix(5, 2, rng);
  Tape t;
  auto th = t.constant(h);
  auto tk = t.constant(kg.weights.value);
  t.backward(add(sum(overlap_add_conv(th, kg)), sum(overlap_add_conv(th, tk, 3))));
  EXPECT_LE(max_abs_diff(kg.weights.grad, tk.grad()), 1e-15);
}

TEST(ConcatCols, EmptyColumnOperandIsIdentity) {
  std::mt19937_64 rng(13);
  const Matrix m = random_matrix(4, 3, rng);
  Tape t;
  EXPECT_EQ(concat_cols(t.constant(m), t.constant(Matrix(4, 0))).value(), m);
  EXPECT_EQ(concat_cols(t.constant(Matrix(4, 0)), t.constant(m)).value(), m);
}

TEST(ConcatCols, ShapeAndBackward) {
  Tape t;
  auto a = t.constant(Matrix(5, 3, 1.0));
  auto b = t.constant(Matrix(5, 7, 2.0));
  auto c = concat_cols(a, b);
  EXPECT_EQ(c.rows(), 5u);
  EXPECT_EQ(c.cols(), 10u);
  t.backward(sum(c));
  EXPECT_EQ(a.grad(), Matrix(5, 3, 1.0));
  EXPECT_EQ(b.grad(), Matrix(5, 7, 1.0));
  EXPECT_THROW(concat_cols(a, t.constant(Matrix(4, 1))), NumError);
}

TEST(Dropout, IdentityCases) {
  std::mt19937_64 rng(14);
  const Matrix x = random_matrix(10, 10, rng);
  Tape t;
  auto tx = t.constant(x);
  EXPECT_EQ(dropout(tx, 0.0, rng, true).value(), x);
  EXPECT_EQ(dropout(tx, 0.2, rng, false).value(), x);
  EXPECT_EQ(dropout(tx, 0.9, rng, false).value(), x);
  EXPECT_THROW(dropout(tx, 1.0, rng, true), NumError);
  EXPECT_THROW(dropout(tx, -0.1, rng, true), NumError);
}

TEST(Dropout, ZeroFractionAndScaling) {
  std::mt19937_64 rng(15);
  Tape t;
  const Matrix out = dropout(t.constant(Matrix(1000, 1000, 1.0)), 0.2, rng, true).value();
  std::size_t zeros = 0;
  for (double v : out.data()) {
    if (v == 0.0) {
      ++zeros;
    } else {
      EXPECT_DOUBLE_EQ(v, 1.25);
    }
  }
  EXPECT_NEAR(static_cast<double>(zeros) / 1e6, 0.2, 0.005);
}

TEST(Backward, SumGivesOnes) {
  std::mt19937_64 rng(16);
  Tape t;
  auto x = t.constant(random_matrix(3, 4, rng));
  auto loss = sum(x);
  t.backward(loss);
  EXPECT_EQ(x.grad(), Matrix(3, 4, 1.0));
  EXPECT_EQ(loss.grad()[0], 1.0);
}

TEST(Backward, SquareGivesTwoX) {
  std::mt19937_64 rng(17);
  const Matrix v = random_matrix(3, 4, rng);
  Tape t;
  auto x = t.constant(v);
  t.backward(sum(mul(x, x)));
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_DOUBLE_EQ(x.grad()[i], 2.0 * v[i]);
}

TEST(Backward, NonScalarLossRejectedAndUnreachableNodesZero) {
  Tape t;
  auto x = t.constant(Matrix(2, 2, 1.0));
  auto stray = tanh(t.constant(Matrix(2, 2, 3.0)));
  EXPECT_THROW(t.backward(x), NumError);
  t.backward(sum(x));
  EXPECT_EQ(stray.grad(), Matrix(2, 2));
}

TEST(Backward, ParameterGradientsAccumulateAcrossTapes) {
  Parameter p("p", Matrix(2, 2, 0.5));
  for (int i = 0; i < 2; ++i) {
    Tape t;
    t.backward(sum(t.parameter(p)));
  }
  EXPECT_EQ(p.grad, Matrix(2, 2, 2.0));
}

TEST(Backward, NonFiniteValuesRaise) {
  Tape t;
  auto big = t.constant(Matrix(1, 1, 1e300));
  EXPECT_THROW(mul(big, big), NumError);
  EXPECT_THROW(t.constant(Matrix(1, 1, std::numeric_limits<double>::quiet_NaN())), NumError);
}

TEST(Backward, RandomCompositeGraphsMatchFiniteDifferences) {
  std::mt19937_64 rng(18);
  // n >= 2: a one-row softmax has an identically zero gradient, which the
  // relative-error floor cannot distinguish from difference noise.
  std::uniform_int_distribution<int> dim(1, 6), len(2, 6);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = len(rng), c = dim(rng), q = dim(rng);
    const Matrix h = random_matrix(n, c, rng), w = random_matrix(c * 3, q, rng),
                 u = random_matrix(c + q, q, rng), r = random_matrix(1, q, rng);
    const double err = fd_max_rel_error(
        [](Tape&, const std::vector<DiffTensor>& x) {
          auto conv = tanh(overlap_add_conv(x[0], x[1], 3));
          auto cat = concat_cols(x[0], conv);
          auto att = add_row(softmax_over_rows(matmul(cat, x[2])), x[3]);
          auto v = matmul_tn(att, cat);
          return sum(row_dot(tanh(v), v));
        },
        {h, w, u, r});
    EXPECT_LE(err, 1e-4) << "trial " << trial;
  }
}

TEST(Ops, OutputShapesFollowInputShapes) {
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<int> dim(1, 9);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = dim(rng), p = dim(rng), q = dim(rng);
    Tape t;
    auto a = t.constant(random_matrix(n, p, rng));
    auto b = t.constant(random_matrix(p, q, rng));
    EXPECT_EQ(matmul(a, b).value().shape_str(), Matrix(n, q).shape_str());
    EXPECT_EQ(matmul_tn(a, a).value().shape_str(), Matrix(p, p).shape_str());
    EXPECT_EQ(softmax_over_rows(a).value().shape_str(), Matrix(n, p).shape_str());
    EXPECT_EQ(row_dot(a, a).value().shape_str(), Matrix(n, 1).shape_str());
    EXPECT_EQ(slice_rows(a, 0, n).value(), a.value());
  }
}

TEST(GatherRows, FrozenRowReceivesNoGradient) {
  Parameter table("emb", Matrix::FromRows({{0, 0}, {1, 2}, {3, 4}}));
  Tape t;
  const std::vector<int> ids = {0, 2, 2, 1};
  auto g = gather_rows(t, table, ids, 0);
  EXPECT_EQ(g.value(), Matrix::FromRows({{0, 0}, {3, 4}, {3, 4}, {1, 2}}));
  t.backward(sum(g));
  EXPECT_EQ(table.grad, Matrix::FromRows({{0, 0}, {1, 1}, {2, 2}}));
}

TEST(GradCheck, QuadraticIsNearlyExact) {
  Parameter x("x", Matrix::FromRows({{0.3, -1.2, 2.5}}));
  Parameter* params[] = {&x};
  auto loss = [&] {
    double s = 0.0;
    for (double v : x.value.data()) s += v * v;
    return s;
  };
  auto loss_and_grad = [&] {
    x.zero_grad();
    Tape t;
    auto px = t.parameter(x);
    auto l = sum(mul(px, px));
    t.backward(l);
    return l.value()[0];
  };
  const GradCheckReport r = grad_check(loss_and_grad, loss, params, 1e-5, 1e-9);
  EXPECT_TRUE(r.passed()) << r.max_rel_error;
}

TEST(GradCheck, TanhChainAndCorruptedGradient) {
  Parameter x("x", Matrix::FromRows({{0.4, -0.7}, {1.1, 0.2}}));
  Parameter* params[] = {&x};
  auto build = [&](Tape& t) { return sum(tanh(scale(tanh(t.parameter(x)), 1.7))); };
  auto loss = [&] {
    Tape t;
    return build(t).value()[0];
  };
  auto loss_and_grad = [&] {
    x.zero_grad();
    Tape t;
    auto l = build(t);
    t.backward(l);
    return l.value()[0];
  };
  EXPECT_TRUE(grad_check(loss_and_grad, loss, params, 1e-5, 1e-6).passed());
  auto corrupted = [&] {
    const double v = loss_and_grad();
    x.grad[1] += 0.5;
    return v;
  };
  const GradCheckReport bad = grad_check(corrupted, loss, params, 1e-5, 1e-6);
  EXPECT_FALSE(bad.passed());
  EXPECT_GT(bad.max_rel_error, 1e-6);
  EXPECT_EQ(bad.entries.at(0).worst_index, 1u);
}

TEST(Determinism, IdenticalSeedsGiveIdenticalBits) {
  auto run = [] {
    std::mt19937_64 rng(20);
    Tape t;
    auto x = t.constant(random_matrix(8, 4, rng));
    auto w = t.constant(random_matrix(12, 4, rng));
    auto y = softmax_over_rows(tanh(overlap_add_conv(dropout(x, 0.3, rng, true), w, 3)));
    t.backward(sum(mul(y, y)));
    return std::pair{y.value(), x.grad()};
  };
  EXPECT_EQ(run(), run());
}

TEST(Hash, SeedDerivationSeparatesStreams) {
  EXPECT_NE(derive_seed(1, 1), derive_seed(1, 2));
  EXPECT_NE(derive_seed(1, 1), derive_seed(2, 1));
  EXPECT_EQ(derive_seed(5, 9), derive_seed(5, 9));
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(hex64(255), "00000000000000ff");
}

}  // namespace
}  // namespace mtram::num
