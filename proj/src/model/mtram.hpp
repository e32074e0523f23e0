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

// BiGRU encoder, recalibrated aggregation module and the two label-wise
// attention heads (fine and coarse codes) sharing one encoder.

#ifndef MTRAM_MODEL_MTRAM_HPP_
#define MTRAM_MODEL_MTRAM_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "corpus/text.hpp"
#include "numcore/ops.hpp"
#include "numcore/tape.hpp"

namespace mtram::model {

using num::DiffTensor;
using num::KernelGroup;
using num::Matrix;
using num::Parameter;
using num::Tape;

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RamMode { kMultiplicative, kAdditive, kOff };

const char* to_string(RamMode mode);
RamMode ram_mode_from_string(const std::string& s);  // "mult" | "add" | "off"

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 100;
  std::size_t hidden_dim = 300;  // per GRU direction
  std::size_t taps = 3;
  std::size_t m_fine = 50;
  std::size_t m_coarse = 38;
  RamMode ram = RamMode::kMultiplicative;
  double dropout = 0.2;

  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct GruDirection {
  Parameter w_z, w_r, w_h;  // embed_dim x hidden_dim
  Parameter u_z, u_r, u_h;  // hidden_dim x hidden_dim
  Parameter b_z, b_r, b_h;  // 1 x hidden_dim
};

struct GruWeights {
  GruDirection forward;
  GruDirection backward;
};

// conv -> tanh -> conv
struct RamNode {
  KernelGroup first;
  KernelGroup second;
};

// Channel chain 2d -> d -> d/2 -> d/2 -> d -> 2d.
struct RamWeights {
  RamNode down1;    // 2d -> d
  RamNode down2;    // d -> d/2
  RamNode lateral;  // d/2 -> d/2
  RamNode up1;      // d/2 -> d
  RamNode up2;      // d -> 2d
  RamMode mode = RamMode::kMultiplicative;
};

struct AttentionHead {
  Parameter query;   // 2d x m
  Parameter weight;  // m x 2d
  Parameter bias;    // m x 1
};

struct ModelParams {
  ModelConfig config;
  Parameter embeddings;  // vocab x embed_dim, row 0 (PAD) frozen at zero
  GruWeights gru;
  std::optional<RamWeights> ram;
  AttentionHead head_fine;
  AttentionHead head_coarse;

  ModelParams() = default;
  ModelParams(const ModelParams&) = default;
  ModelParams& operator=(const ModelParams&) = default;

  // Every learned array in a fixed order (embeddings first).
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  void zero_grad();
};

// Xavier-uniform matrices and kernel groups, zero biases. `embeddings`, when
// given, must be vocab_size x embed_dim; its PAD row is zeroed.
ModelParams init_params(const ModelConfig& config, std::uint64_t seed,
                        const std::optional<Matrix>& embeddings = std::nullopt);

// One GRU step on a 1 x embed_dim input and 1 x hidden_dim state.
DiffTensor gru_cell(DiffTensor x_t, DiffTensor h_prev, GruDirection& w);

// n x embed_dim -> n x 2*hidden_dim; row i is [forward h_i, backward h_i],
// both directions start from a zero state.
DiffTensor bigru_forward(DiffTensor x, GruWeights& w);

// n x 2d -> n x 2d.
DiffTensor ram_node_forward(DiffTensor x, RamNode& node);
DiffTensor ram_forward(DiffTensor h, RamWeights& w);

struct AttentionOutput {
  DiffTensor scores;  // m x 1
  DiffTensor probs;   // m x 1
  DiffTensor attn;    // n x m, columns sum to one
};

AttentionOutput attention_classify(DiffTensor h, AttentionHead& head);

struct ForwardOutput {
  DiffTensor encoded;  // n x 2d after RAM (or BiGRU when RAM is off)
  AttentionOutput fine;
  AttentionOutput coarse;
};

// embed -> dropout -> BiGRU -> RAM -> both heads. Throws ModelError for an
// empty or all-PAD document.
ForwardOutput model_forward(Tape& tape, const corpus::EncodedDocument& doc, ModelParams& params,
                            bool training, std::mt19937_64& rng);

struct Prediction {
  std::vector<double> fine;
  std::vector<double> coarse;
};

// Eval-mode forward on a fresh tape.
Prediction predict(const corpus::EncodedDocument& doc, ModelParams& params);

}  // namespace mtram::model

#endif  // MTRAM_MODEL_MTRAM_HPP_
