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

#include "model/mtram.hpp"

#include <algorithm>
#include <cmath>

namespace mtram::model {
namespace {

class Init {
 public:
  explicit Init(std::uint64_t seed) : rng_(seed) {}

  Parameter xavier(std::string name, std::size_t rows, std::size_t cols, double fan_in,
                   double fan_out) {
    Matrix m(rows, cols);
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& v : m.data()) v = (2.0 * num::uniform01(rng_) - 1.0) * bound;
    return {std::move(name), std::move(m)};
  }
  Parameter matrix(std::string name, std::size_t rows, std::size_t cols) {
    return xavier(std::move(name), rows, cols, static_cast<double>(rows),
                  static_cast<double>(cols));
  }
  static Parameter zeros(std::string name, std::size_t rows, std::size_t cols) {
    return {std::move(name), Matrix(rows, cols)};
  }
  KernelGroup kernel(const std::string& name, std::size_t in, std::size_t taps,
                     std::size_t out) {
    KernelGroup kg(name, in, taps, out);
    kg.weights = xavier(name, in * taps, out, static_cast<double>(in * taps),
                        static_cast<double>(out * taps));
    return kg;
  }
  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

GruDirection init_direction(Init& init, const std::string& prefix, std::size_t e, std::size_t d) {
  GruDirection g;
  g.w_z = init.matrix(prefix + ".w_z", e, d);
  g.w_r = init.matrix(prefix + ".w_r", e, d);
  g.w_h = init.matrix(prefix + ".w_h", e, d);
  g.u_z = init.matrix(prefix + ".u_z", d, d);
  g.u_r = init.matrix(prefix + ".u_r", d, d);
  g.u_h = init.matrix(prefix + ".u_h", d, d);
  g.b_z = Init::zeros(prefix + ".b_z", 1, d);
  g.b_r = Init::zeros(prefix + ".b_r", 1, d);
  g.b_h = Init::zeros(prefix + ".b_h", 1, d);
  return g;
}

RamNode init_node(Init& init, const std::string& prefix, std::size_t in, std::size_t taps,
                  std::size_t out) {
  return {init.kernel(prefix + ".k1", in, taps, out), init.kernel(prefix + ".k2", out, taps, out)};
}

AttentionHead init_head(Init& init, const std::string& prefix, std::size_t width, std::size_t m) {
  AttentionHead h;
  h.query = init.matrix(prefix + ".query", width, m);
  h.weight = init.matrix(prefix + ".weight", m, width);
  h.bias = Init::zeros(prefix + ".bias", m, 1);
  return h;
}

void push_direction(std::vector<Parameter*>& out, GruDirection& g) {
  for (Parameter* p : {&g.w_z, &g.w_r, &g.w_h, &g.u_z, &g.u_r, &g.u_h, &g.b_z, &g.b_r, &g.b_h}) {
    out.push_back(p);
  }
}

// Tape handles for one GRU direction, bound once per forward pass.
struct BoundDirection {
  DiffTensor w_z, w_r, w_h, u_z, u_r, u_h, b_z, b_r, b_h;

  BoundDirection(Tape& t, GruDirection& g)
      : w_z(t.parameter(g.w_z)), w_r(t.parameter(g.w_r)), w_h(t.parameter(g.w_h)),
        u_z(t.parameter(g.u_z)), u_r(t.parameter(g.u_r)), u_h(t.parameter(g.u_h)),
        b_z(t.parameter(g.b_z)), b_r(t.parameter(g.b_r)), b_h(t.parameter(g.b_h)) {}
};

// Gates given the input projections x*W + b of one position.
DiffTensor gru_step(DiffTensor xz, DiffTensor xr, DiffTensor xh, DiffTensor h,
                    const BoundDirection& w) {
  DiffTensor z = num::sigmoid(num::add(xz, num::matmul(h, w.u_z)));
  DiffTensor r = num::sigmoid(num::add(xr, num::matmul(h, w.u_r)));
  DiffTensor cand = num::tanh(num::add(xh, num::matmul(num::mul(r, h), w.u_h)));
  // (1 - z) * h + z * cand
  return num::add(h, num::mul(z, num::sub(cand, h)));
}

DiffTensor run_direction(DiffTensor x, GruDirection& g, bool reverse) {
  Tape& t = *x.tape();
  const BoundDirection w(t, g);
  DiffTensor xz = num::add_row(num::matmul(x, w.w_z), w.b_z);
  DiffTensor xr = num::add_row(num::matmul(x, w.w_r), w.b_r);
  DiffTensor xh = num::add_row(num::matmul(x, w.w_h), w.b_h);
  const std::size_t n = x.rows();
  DiffTensor h = t.constant(Matrix(1, g.u_z.value.rows()));
  std::vector<DiffTensor> states(n);
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t i = reverse ? n - 1 - step : step;
    h = gru_step(num::slice_rows(xz, i, 1), num::slice_rows(xr, i, 1), num::slice_rows(xh, i, 1),
                 h, w);
    states[i] = h;
  }
  return num::stack_rows(states);
}

void check_width(DiffTensor x, std::size_t want, const char* what) {
  if (x.cols() != want) {
    throw ModelError(std::string(what) + ": input has width " + std::to_string(x.cols()) +
                     ", expected " + std::to_string(want));
  }
}

}  // namespace

const char* to_string(RamMode mode) {
  switch (mode) {
    case RamMode::kMultiplicative: return "mult";
    case RamMode::kAdditive: return "add";
    case RamMode::kOff: return "off";
  }
  return "?";
}

RamMode ram_mode_from_string(const std::string& s) {
  if (s == "mult") return RamMode::kMultiplicative;
  if (s == "add") return RamMode::kAdditive;
  if (s == "off") return RamMode::kOff;
  throw ModelError("unknown RAM mode '" + s + "' (expected mult, add or off)");
}

void ModelConfig::validate() const {
  if (vocab_size < 2) throw ModelError("model: vocab_size must cover PAD and UNK");
  if (embed_dim == 0) throw ModelError("model: embed_dim must be positive");
  if (hidden_dim < 2 || hidden_dim % 2 != 0) {
    throw ModelError("model: hidden_dim must be even and >= 2, got " + std::to_string(hidden_dim));
  }
  if (taps == 0 || taps % 2 == 0) throw ModelError("model: taps must be odd");
  if (m_fine == 0 || m_coarse == 0) throw ModelError("model: label counts must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ModelError("model: dropout must be in [0,1)");
}

std::vector<Parameter*> ModelParams::parameters() {
  std::vector<Parameter*> out{&embeddings};
  push_direction(out, gru.forward);
  push_direction(out, gru.backward);
  if (ram) {
    for (RamNode* n : {&ram->down1, &ram->down2, &ram->lateral, &ram->up1, &ram->up2}) {
      out.push_back(&n->first.weights);
      out.push_back(&n->second.weights);
    }
  }
  for (AttentionHead* h : {&head_fine, &head_coarse}) {
    out.push_back(&h->query);
    out.push_back(&h->weight);
    out.push_back(&h->bias);
  }
  return out;
}

std::vector<const Parameter*> ModelParams::parameters() const {
  auto mut = const_cast<ModelParams*>(this)->parameters();
  return {mut.begin(), mut.end()};
}

void ModelParams::zero_grad() {
  for (Parameter* p : parameters()) p->zero_grad();
}

ModelParams init_params(const ModelConfig& config, std::uint64_t seed,
                        const std::optional<Matrix>& embeddings) {
  config.validate();
  Init init(seed);
  ModelParams p;
  p.config = config;
  const std::size_t e = config.embed_dim, d = config.hidden_dim, k = config.taps;
  if (embeddings) {
    if (embeddings->rows() != config.vocab_size || embeddings->cols() != e) {
      throw ModelError("init_params: embeddings are " + embeddings->shape_str() + ", expected " +
                       std::to_string(config.vocab_size) + "x" + std::to_string(e));
    }
    p.embeddings = Parameter("embeddings", *embeddings);
  } else {
    Matrix m(config.vocab_size, e);
    const double r = 0.5 / static_cast<double>(e);
    for (double& v : m.data()) v = (2.0 * num::uniform01(init.rng()) - 1.0) * r;
    p.embeddings = Parameter("embeddings", std::move(m));
  }
  auto pad = p.embeddings.value.row(corpus::kPadId);
  std::fill(pad.begin(), pad.end(), 0.0);

  p.gru.forward = init_direction(init, "gru.forward", e, d);
  p.gru.backward = init_direction(init, "gru.backward", e, d);
  if (config.ram != RamMode::kOff) {
    RamWeights r;
    r.mode = config.ram;
    r.down1 = init_node(init, "ram.down1", 2 * d, k, d);
    r.down2 = init_node(init, "ram.down2", d, k, d / 2);
    r.lateral = init_node(init, "ram.lateral", d / 2, k, d / 2);
    r.up1 = init_node(init, "ram.up1", d / 2, k, d);
    r.up2 = init_node(init, "ram.up2", d, k, 2 * d);
    p.ram = std::move(r);
  }
  p.head_fine = init_head(init, "head_fine", 2 * d, config.m_fine);
  p.head_coarse = init_head(init, "head_coarse", 2 * d, config.m_coarse);
  return p;
}

DiffTensor gru_cell(DiffTensor x_t, DiffTensor h_prev, GruDirection& g) {
  check_width(x_t, g.w_z.value.rows(), "gru_cell");
  check_width(h_prev, g.u_z.value.rows(), "gru_cell state");
  if (x_t.rows() != 1 || h_prev.rows() != 1) throw ModelError("gru_cell: expects row vectors");
  const BoundDirection w(*x_t.tape(), g);
  return gru_step(num::add(num::matmul(x_t, w.w_z), w.b_z),
                  num::add(num::matmul(x_t, w.w_r), w.b_r),
                  num::add(num::matmul(x_t, w.w_h), w.b_h), h_prev, w);
}

DiffTensor bigru_forward(DiffTensor x, GruWeights& w) {
  check_width(x, w.forward.w_z.value.rows(), "bigru_forward");
  if (x.rows() == 0) throw ModelError("bigru_forward: empty sequence");
  DiffTensor fwd = run_direction(x, w.forward, false);
  DiffTensor bwd = run_direction(x, w.backward, true);
  return num::concat_cols(fwd, bwd);
}

DiffTensor ram_node_forward(DiffTensor x, RamNode& node) {
  return num::overlap_add_conv(num::tanh(num::overlap_add_conv(x, node.first)), node.second);
}

DiffTensor ram_forward(DiffTensor h, RamWeights& w) {
  check_width(h, w.down1.first.in_channels, "ram_forward");
  DiffTensor a = ram_node_forward(h, w.down1);
  DiffTensor a2 = ram_node_forward(a, w.down2);
  DiffTensor lat = ram_node_forward(a2, w.lateral);
  DiffTensor b = num::add(a, ram_node_forward(lat, w.up1));
  DiffTensor o = ram_node_forward(b, w.up2);
  switch (w.mode) {
    case RamMode::kMultiplicative: return num::tanh(num::mul(o, h));
    case RamMode::kAdditive: return num::tanh(num::add(o, h));
    case RamMode::kOff: break;
  }
  throw ModelError("ram_forward: RAM weights present but mode is off");
}

AttentionOutput attention_classify(DiffTensor h, AttentionHead& head) {
  check_width(h, head.query.value.rows(), "attention_classify");
  Tape& t = *h.tape();
  AttentionOutput out;
  out.attn = num::softmax_over_rows(num::matmul(h, t.parameter(head.query)));
  DiffTensor v = num::matmul_tn(out.attn, h);  // m x 2d
  out.scores = num::add(num::row_dot(v, t.parameter(head.weight)), t.parameter(head.bias));
  out.probs = num::sigmoid(out.scores);
  return out;
}

ForwardOutput model_forward(Tape& tape, const corpus::EncodedDocument& doc, ModelParams& params,
                            bool training, std::mt19937_64& rng) {
  const bool any_token = std::any_of(doc.token_ids.begin(), doc.token_ids.end(),
                                     [](int id) { return id != corpus::kPadId; });
  if (!any_token) throw ModelError("model_forward: document " + doc.id + " has no tokens");
  for (int id : doc.token_ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= params.config.vocab_size) {
      throw ModelError("model_forward: document " + doc.id + " has token id " +
                       std::to_string(id) + " outside the vocabulary of " +
                       std::to_string(params.config.vocab_size));
    }
  }
  DiffTensor x = num::gather_rows(tape, params.embeddings, doc.token_ids, corpus::kPadId);
  x = num::dropout(x, params.config.dropout, rng, training);
  DiffTensor h = bigru_forward(x, params.gru);
  ForwardOutput out;
  out.encoded = params.ram ? ram_forward(h, *params.ram) : h;
  out.fine = attention_classify(out.encoded, params.head_fine);
  out.coarse = attention_classify(out.encoded, params.head_coarse);
  return out;
}

Prediction predict(const corpus::EncodedDocument& doc, ModelParams& params) {
  Tape tape;
  std::mt19937_64 unused(0);
  ForwardOutput f = model_forward(tape, doc, params, false, unused);
  const auto& pf = f.fine.probs.value().data();
  const auto& pc = f.coarse.probs.value().data();
  return {pf, pc};
}

}  // namespace mtram::model
