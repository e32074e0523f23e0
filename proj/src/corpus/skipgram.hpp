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

#ifndef MTRAM_CORPUS_SKIPGRAM_HPP_
#define MTRAM_CORPUS_SKIPGRAM_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "corpus/text.hpp"
#include "numcore/matrix.hpp"

namespace mtram::corpus {

struct SkipgramOptions {
  std::size_t dim = 100;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  std::uint64_t seed = 1;
};

// Word vectors for a vocabulary; row kPadId is all zeros.
struct EmbeddingTable {
  num::Matrix vectors;
  std::size_t dim() const { return vectors.cols(); }
};

// Initial table: uniform in +-0.5/dim, PAD row zero.
EmbeddingTable init_embeddings(std::size_t vocab_size, std::size_t dim, std::uint64_t seed);

// Skip-gram with negative sampling over already-encoded documents. Negatives
// are drawn from the unigram distribution raised to 0.75; PAD positions are
// ignored. Deterministic for a fixed seed.
EmbeddingTable pretrain_skipgram(std::span<const std::vector<int>> docs, std::size_t vocab_size,
                                 const SkipgramOptions& opts);

double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace mtram::corpus

#endif  // MTRAM_CORPUS_SKIPGRAM_HPP_
