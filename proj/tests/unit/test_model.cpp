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
#include <random>
#include <string>
#include <vector>

#include "model/checkpoint.hpp"
#include "model/mtram.hpp"
#include "numcore/grad_check.hpp"
#include "scratch_dir.hpp"
#include "test_util.hpp"
#include "toy_model.hpp"

namespace mtram::model {
namespace {

using mtram::testing::max_abs_diff;
using mtram::testing::random_matrix;
using mtram::testing::toy_config;
using mtram::testing::toy_document;

void randomize(ModelParams& p, std::mt19937_64& rng, double scale) {
  for (Parameter* q : p.parameters()) {
    q->value = random_matrix(q->value.rows(), q->value.cols(), rng, -scale, scale);
  }
  for (double& v : p.embeddings.value.row(0)) v = 0.0;
}

void set_all(RamWeights& w, double v) {
  for (RamNode* n : {&w.down1, &w.down2, &w.lateral, &w.up1, &w.up2}) {
    n->first.weights.value.fill(v);
    n->second.weights.value.fill(v);
  }
}

TEST(Config, ValidationAndModeNames) {
  ModelConfig c = toy_config(RamMode::kMultiplicative);
  EXPECT_NO_THROW(c.validate());
  c.hidden_dim = 3;
  EXPECT_THROW(c.validate(), ModelError);
  c = toy_config(RamMode::kMultiplicative);
  c.taps = 2;
  EXPECT_THROW(c.validate(), ModelError);
  c = toy_config(RamMode::kMultiplicative);
  c.dropout = 1.0;
  EXPECT_THROW(c.validate(), ModelError);
  for (RamMode m : {RamMode::kMultiplicative, RamMode::kAdditive, RamMode::kOff}) {
    EXPECT_EQ(ram_mode_from_string(to_string(m)), m);
  }
  EXPECT_THROW(ram_mode_from_string("both"), ModelError);
}

TEST(Init, XavierBoundsZeroBiasesAndFrozenPad) {
  ModelConfig c = toy_config(RamMode::kMultiplicative);
  ModelParams p = init_params(c, 3);
  for (double v : p.embeddings.value.row(0)) EXPECT_EQ(v, 0.0);
  const double gru_bound = std::sqrt(6.0 / (6 + 4));
  for (double v : p.gru.forward.w_z.value.data()) EXPECT_LE(std::abs(v), gru_bound);
  for (double v : p.gru.backward.b_h.value.data()) EXPECT_EQ(v, 0.0);
  for (double v : p.head_fine.bias.value.data()) EXPECT_EQ(v, 0.0);
  const double k_bound = std::sqrt(6.0 / (8 * 3 + 4 * 3));
  for (double v : p.ram->down1.first.weights.value.data()) EXPECT_LE(std::abs(v), k_bound);
  EXPECT_EQ(p.ram->up2.second.weights.value.rows(), 8u * 3u);
  EXPECT_EQ(p.ram->up2.second.weights.value.cols(), 8u);
  EXPECT_EQ(p.head_fine.query.value.rows(), 8u);
  EXPECT_EQ(p.head_fine.query.value.cols(), 5u);
  Matrix emb(20, 6, 0.25);
  ModelParams q = init_params(c, 3, emb);
  for (double v : q.embeddings.value.row(0)) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(q.embeddings.value(5, 2), 0.25);
  EXPECT_THROW(init_params(c, 3, Matrix(19, 6)), ModelError);
}

TEST(Init, RamOffHasNoRamParameters) {
  ModelParams p = init_params(toy_config(RamMode::kOff), 1);
  EXPECT_FALSE(p.ram.has_value());
  for (const Parameter* q : p.parameters()) EXPECT_NE(q->name.rfind("ram.", 0), 0u) << q->name;
  const Checkpoint ck = deserialize_checkpoint(serialize_checkpoint(p, {}));
  EXPECT_FALSE(ck.params.ram.has_value());
  EXPECT_EQ(ck.params.parameters().size(), p.parameters().size());
}

TEST(Gru, ZeroWeightsGiveZeroState) {
  ModelParams p = init_params(toy_config(RamMode::kOff), 1);
  GruDirection& w = p.gru.forward;
  for (Parameter* q : {&w.w_z, &w.w_r, &w.w_h, &w.u_z, &w.u_r, &w.u_h}) q->value.fill(0.0);
  Tape t;
  std::mt19937_64 rng(2);
  auto h = gru_cell(t.constant(random_matrix(1, 6, rng)), t.constant(Matrix(1, 4)), w);
  EXPECT_EQ(h.value(), Matrix(1, 4));
}

TEST(Gru, ClosedUpdateGateKeepsPreviousState) {
  std::mt19937_64 rng(3);
  ModelParams p = init_params(toy_config(RamMode::kOff), 1);
  GruDirection& w = p.gru.forward;
  w.b_z.value.fill(-40.0);
  const Matrix prev = random_matrix(1, 4, rng);
  Tape t;
  auto h = gru_cell(t.constant(random_matrix(1, 6, rng)), t.constant(prev), w);
  EXPECT_LE(max_abs_diff(h.value(), prev), 1e-6);
}

TEST(Gru, CellGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  ModelParams p = init_params(toy_config(RamMode::kOff), 5);
  GruDirection& w = p.gru.forward;
  for (Parameter* q : {&w.b_z, &w.b_r, &w.b_h}) q->value = random_matrix(1, 4, rng);
  Parameter x("x", random_matrix(1, 6, rng)), h0("h0", random_matrix(1, 4, rng));
  std::vector<Parameter*> params = {&x, &h0, &w.w_z, &w.w_r, &w.w_h, &w.u_z, &w.u_r, &w.u_h,
                                    &w.b_z, &w.b_r, &w.b_h};
  auto run = [&](bool grad) {
    Tape t;
    auto out = num::sum(num::tanh(gru_cell(t.parameter(x), t.parameter(h0), w)));
    if (grad) t.backward(out);
    return out.value()[0];
  };
  const auto r = num::grad_check(
      [&] {
        for (Parameter* q : params) q->zero_grad();
        return run(true);
      },
      [&] { return run(false); }, params, 1e-5, 1e-5);
  EXPECT_TRUE(r.passed()) << r.max_rel_error;
}

TEST(BiGru, SingleTokenAndShapes) {
  std::mt19937_64 rng(5);
  ModelParams p = init_params(toy_config(RamMode::kOff), 6);
  for (std::size_t n = 1; n <= 20; ++n) {
    Tape t;
    auto h = bigru_forward(t.constant(random_matrix(n, 6, rng)), p.gru);
    EXPECT_EQ(h.rows(), n);
    EXPECT_EQ(h.cols(), 8u);
  }
  // One token: each half is one cell step from zero on that token.
  Tape t;
  auto x = t.constant(random_matrix(1, 6, rng));
  auto h = bigru_forward(x, p.gru);
  auto f = gru_cell(x, t.constant(Matrix(1, 4)), p.gru.forward);
  auto b = gru_cell(x, t.constant(Matrix(1, 4)), p.gru.backward);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_EQ(h.value()(0, j), f.value()(0, j));
    EXPECT_EQ(h.value()(0, 4 + j), b.value()(0, j));
  }
}

TEST(BiGru, ReversalSwapsHalves) {
  std::mt19937_64 rng(6);
  ModelParams p = init_params(toy_config(RamMode::kOff), 7);
  randomize(p, rng, 0.8);
  const std::size_t n = 9;
  const Matrix x = random_matrix(n, 6, rng);
  Matrix xr(n, 6);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 6; ++j) xr(i, j) = x(n - 1 - i, j);
  GruWeights swapped{p.gru.backward, p.gru.forward};
  Tape t;
  const Matrix h = bigru_forward(t.constant(x), p.gru).value();
  const Matrix hr = bigru_forward(t.constant(xr), swapped).value();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_NEAR(hr(n - 1 - i, j), h(i, 4 + j), 1e-15);
      EXPECT_NEAR(hr(n - 1 - i, 4 + j), h(i, j), 1e-15);
    }
  }
}

TEST(Ram, ZeroKernels) {
  std::mt19937_64 rng(7);
  ModelParams p = init_params(toy_config(RamMode::kMultiplicative), 8);
  set_all(*p.ram, 0.0);
  const Matrix h = random_matrix(7, 8, rng);
  Tape t;
  EXPECT_EQ(ram_forward(t.constant(h), *p.ram).value(), Matrix(7, 8));
  p.ram->mode = RamMode::kAdditive;
  const Matrix out = ram_forward(t.constant(h), *p.ram).value();
  for (std::size_t i = 0; i < h.size(); ++i) EXPECT_DOUBLE_EQ(out[i], std::tanh(h[i]));
}

TEST(Ram, ShapePreservedAcrossSizes) {
  std::mt19937_64 rng(8);
  for (std::size_t d : {4u, 8u, 16u}) {
    ModelConfig c = toy_config(RamMode::kMultiplicative);
    c.hidden_dim = d;
    ModelParams p = init_params(c, d);
    for (std::size_t n = 1; n <= 64; ++n) {
      Tape t;
      auto out = ram_forward(t.constant(random_matrix(n, 2 * d, rng)), *p.ram);
      ASSERT_EQ(out.rows(), n);
      ASSERT_EQ(out.cols(), 2 * d);
    }
  }
}

TEST(Ram, FullPathGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(9);
  for (RamMode mode : {RamMode::kMultiplicative, RamMode::kAdditive}) {
    ModelParams p = init_params(toy_config(mode), 10);
    randomize(p, rng, 0.7);
    Parameter h("h", random_matrix(7, 8, rng));
    std::vector<Parameter*> params = {&h};
    for (RamNode* n : {&p.ram->down1, &p.ram->down2, &p.ram->lateral, &p.ram->up1, &p.ram->up2}) {
      params.push_back(&n->first.weights);
      params.push_back(&n->second.weights);
    }
    const Matrix probe = random_matrix(7, 8, rng);
    auto run = [&](bool grad) {
      Tape t;
      auto out = num::sum(num::mul(ram_forward(t.parameter(h), *p.ram), t.constant(probe)));
      if (grad) t.backward(out);
      return out.value()[0];
    };
    const auto r = num::grad_check(
        [&] {
          for (Parameter* q : params) q->zero_grad();
          return run(true);
        },
        [&] { return run(false); }, params, 1e-5, 1e-4);
    EXPECT_TRUE(r.passed()) << to_string(mode) << " " << r.max_rel_error;
  }
}

TEST(Attention, SingleRowAndZeroClassifier) {
  std::mt19937_64 rng(10);
  ModelParams p = init_params(toy_config(RamMode::kOff), 11);
  const Matrix h = random_matrix(1, 8, rng);
  Tape t;
  AttentionOutput out = attention_classify(t.constant(h), p.head_fine);
  for (double a : out.attn.value().data()) EXPECT_DOUBLE_EQ(a, 1.0);
  // With one row every label's document vector is that row.
  for (std::size_t j = 0; j < 5; ++j) {
    double expect = 0.0;
    for (std::size_t c = 0; c < 8; ++c) expect += h(0, c) * p.head_fine.weight.value(j, c);
    EXPECT_NEAR(out.scores.value()[j], expect, 1e-15);
  }
  p.head_fine.weight.value.fill(0.0);
  p.head_fine.bias.value.fill(0.0);
  out = attention_classify(t.constant(random_matrix(6, 8, rng)), p.head_fine);
  for (double v : out.probs.value().data()) EXPECT_EQ(v, 0.5);
}

TEST(Attention, ColumnsSumToOne) {
  std::mt19937_64 rng(12);
  ModelParams p = init_params(toy_config(RamMode::kOff), 13);
  std::uniform_int_distribution<int> len(1, 40);
  for (int s = 0; s < 100; ++s) {
    randomize(p, rng, 2.0);
    Tape t;
    const std::size_t n = len(rng);
    const Matrix a = attention_classify(t.constant(random_matrix(n, 8, rng, -3, 3)), p.head_coarse)
                         .attn.value();
    for (std::size_t j = 0; j < a.cols(); ++j) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) total += a(i, j);
      ASSERT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(Forward, RejectsEmptyAndAllPadDocuments) {
  ModelParams p = init_params(toy_config(RamMode::kMultiplicative), 14);
  corpus::EncodedDocument d = toy_document(1);
  d.token_ids.clear();
  EXPECT_THROW(predict(d, p), ModelError);
  d.token_ids.assign(5, corpus::kPadId);
  EXPECT_THROW(predict(d, p), ModelError);
  d.token_ids = {1, 25};
  EXPECT_THROW(predict(d, p), ModelError);
}

TEST(Forward, DatasetScaleOutputLengthsAndEvalDeterminism) {
  ModelConfig c;
  c.vocab_size = 50;
  c.embed_dim = 8;
  c.hidden_dim = 6;
  ModelParams p = init_params(c, 15);
  corpus::EncodedDocument d;
  d.token_ids = {4, 9, 2, 17, 33, 1};
  d.fine_labels.assign(50, 0);
  d.coarse_labels.assign(38, 0);
  const Prediction a = predict(d, p);
  EXPECT_EQ(a.fine.size(), 50u);
  EXPECT_EQ(a.coarse.size(), 38u);
  const Prediction b = predict(d, p);
  EXPECT_EQ(a.fine, b.fine);
  EXPECT_EQ(a.coarse, b.coarse);
}

TEST(Forward, FiniteForBoundedWeights) {
  std::mt19937_64 rng(16);
  for (RamMode mode : {RamMode::kMultiplicative, RamMode::kAdditive, RamMode::kOff}) {
    ModelParams p = init_params(toy_config(mode), 17);
    for (int s = 0; s < 10; ++s) {
      randomize(p, rng, 10.0);
      Tape t;
      std::mt19937_64 drop(1);
      const ForwardOutput f = model_forward(t, toy_document(s, 30), p, true, drop);
      for (double v : f.fine.probs.value().data()) ASSERT_TRUE(std::isfinite(v));
      for (double v : f.coarse.probs.value().data()) ASSERT_TRUE(std::isfinite(v));
    }
  }
}

TEST(Forward, JointLossGradientOnToyModel) {
  std::mt19937_64 rng(18);
  for (RamMode mode : {RamMode::kMultiplicative, RamMode::kAdditive, RamMode::kOff}) {
    ModelParams p = init_params(toy_config(mode), 19);
    randomize(p, rng, 0.5);
    const auto doc = toy_document(20);
    for (bool training : {false, true}) {
      // With a fixed dropout mask a few gradients sit near 1e-8, where the
      // h = 1e-5 difference quotient is dominated by loss roundoff.
      const double h = training ? 1e-4 : 1e-5;
      const auto r = mtram::testing::toy_joint_grad_check(p, doc, {0.7, 0.3}, training, h);
      EXPECT_TRUE(r.passed()) << to_string(mode) << " training=" << training << " "
                              << r.max_rel_error;
    }
  }
}

TEST(Checkpoint, RoundTripIsBitExactAndByteStable) {
  std::mt19937_64 rng(21);
  ModelParams p = init_params(toy_config(RamMode::kAdditive), 22);
  randomize(p, rng, 1.0);
  const nlohmann::json meta = {{"config_hash", "abc"}, {"seed", 5}};
  const std::string bytes = serialize_checkpoint(p, meta);
  EXPECT_EQ(serialize_checkpoint(p, meta), bytes);
  const auto dir = mtram::testing::scratch_dir();
  save_checkpoint(dir / "m.ckpt", p, meta);
  const Checkpoint ck = load_checkpoint(dir / "m.ckpt");
  EXPECT_EQ(ck.params.config, p.config);
  EXPECT_EQ(ck.meta.at("config_hash"), "abc");
  EXPECT_EQ(ck.params.ram->mode, RamMode::kAdditive);
  const auto a = p.parameters();
  const auto b = ck.params.parameters();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i]->name, b[i]->name);
    EXPECT_EQ(a[i]->value, b[i]->value) << a[i]->name;
  }
  const corpus::EncodedDocument d = toy_document(3);
  ModelParams loaded = ck.params;
  EXPECT_EQ(predict(d, p).fine, predict(d, loaded).fine);
}

TEST(Checkpoint, CorruptInputsRejected) {
  ModelParams p = init_params(toy_config(RamMode::kMultiplicative), 23);
  const std::string bytes = serialize_checkpoint(p, {});
  EXPECT_THROW(deserialize_checkpoint(""), ModelError);
  EXPECT_THROW(deserialize_checkpoint("NOTACKPT" + bytes.substr(8)), ModelError);
  EXPECT_THROW(deserialize_checkpoint(bytes.substr(0, bytes.size() - 3)), ModelError);
  EXPECT_THROW(deserialize_checkpoint(bytes + "x"), ModelError);
  std::string version = bytes;
  version[8] = 9;
  EXPECT_THROW(deserialize_checkpoint(version), ModelError);
  EXPECT_THROW(load_checkpoint(mtram::testing::scratch_dir() / "missing.ckpt"), ModelError);
}

}  // namespace
}  // namespace mtram::model
