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


// The small end-to-end configuration used for whole-model gradient checks:
// 12 tokens, d_e = 6, d_r = 4, five fine and three coarse labels, k = 3.

#ifndef MTRAM_TESTS_TOY_MODEL_HPP_
#define MTRAM_TESTS_TOY_MODEL_HPP_

#include <cstdint>
#include <random>

#include "corpus/synthetic.hpp"
#include "corpus/text.hpp"
#include "model/mtram.hpp"
#include "numcore/grad_check.hpp"
#include "train/optim.hpp"

namespace mtram::testing {

inline model::ModelConfig toy_config(model::RamMode ram) {
  model::ModelConfig c;
  c.vocab_size = 20;
  c.embed_dim = 6;
  c.hidden_dim = 4;
  c.taps = 3;
  c.m_fine = 5;
  c.m_coarse = 3;
  c.ram = ram;
  c.dropout = 0.2;
  return c;
}

// Random non-PAD tokens and at least one active fine code.
inline corpus::EncodedDocument toy_document(std::uint64_t seed, std::size_t n = 12) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> tok(1, 19), bit(0, 1);
  corpus::EncodedDocument d;
  d.id = "toy";
  for (std::size_t i = 0; i < n; ++i) d.token_ids.push_back(tok(rng));
  d.fine_labels.assign(5, 0);
  for (auto& y : d.fine_labels) y = static_cast<std::uint8_t>(bit(rng));
  d.fine_labels[0] = 1;
  d.coarse_labels = corpus::block_code_map(5, 3).map_fine_to_coarse(d.fine_labels);
  return d;
}

// Central-difference check of the joint loss over every model parameter.
// Training mode reseeds dropout identically for every evaluation.
inline num::GradCheckReport toy_joint_grad_check(model::ModelParams& params,
                                                 const corpus::EncodedDocument& doc,
                                                 const train::LossWeights& w, bool training,
                                                 double h = 1e-5, double tol = 1e-4) {
  auto forward = [&](bool with_grad) {
    num::Tape tape;
    std::mt19937_64 rng(99);
    const model::ForwardOutput f = model::model_forward(tape, doc, params, training, rng);
    const num::DiffTensor loss =
        train::joint_loss(train::bce_loss(f.fine.probs, doc.fine_labels),
                          train::bce_loss(f.coarse.probs, doc.coarse_labels), w);
    if (with_grad) tape.backward(loss);
    return loss.value()[0];
  };
  const auto plist = params.parameters();
  return num::grad_check(
      [&] {
        params.zero_grad();
        return forward(true);
      },
      [&] { return forward(false); }, plist, h, tol);
}

}  // namespace mtram::testing

#endif  // MTRAM_TESTS_TOY_MODEL_HPP_
