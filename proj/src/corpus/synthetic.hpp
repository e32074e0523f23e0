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

#ifndef MTRAM_CORPUS_SYNTHETIC_HPP_
#define MTRAM_CORPUS_SYNTHETIC_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "corpus/io.hpp"
#include "corpus/text.hpp"

namespace mtram::corpus {

// Generator parameters. Defaults mirror the scale of a top-50 ICD /
// 38 CCS discharge-summary benchmark with short documents.
struct SyntheticSpec {
  std::size_t n_docs = 8000;
  std::size_t vocab_size = 2000;
  std::size_t m_fine = 50;
  std::size_t m_coarse = 38;
  std::size_t min_len = 30;
  std::size_t max_len = 60;
  // Expected number of active fine codes per document.
  double label_sparsity = 4.0;
  // Fraction of positions filled with background tokens.
  double noise_rate = 0.8;
  std::size_t signal_tokens_per_code = 5;
  // Code priors fall off as (rank+1)^-prior_decay before normalisation.
  double prior_decay = 0.3;

  void validate() const;
};

struct SyntheticCorpus {
  std::vector<DocumentRecord> docs;  // ccs filled in
  CodeMap code_map;
  std::vector<double> priors;        // per fine code
};

// Token string for generator index `i` (fixed-width lowercase letters).
std::string synthetic_token(std::size_t i);
std::string fine_code_name(std::size_t i, std::size_t m_fine);
std::string coarse_code_name(std::size_t i, std::size_t m_coarse);

// Inclusion probability per fine code, summing to label_sparsity (each
// capped at 0.95).
std::vector<double> code_priors(const SyntheticSpec& spec);

// Contiguous blocks of fine codes per coarse code; the trailing (rarest)
// blocks absorb the extra codes when m_fine is not a multiple of m_coarse.
CodeMap block_code_map(std::size_t m_fine, std::size_t m_coarse);

// Independent Bernoulli draw per code.
LabelVector sample_fine_labels(const std::vector<double>& priors, std::mt19937_64& rng);

// Each fine code owns a disjoint set of signal tokens; every position is a
// background token with probability noise_rate, otherwise a signal token of
// a uniformly chosen active code.
SyntheticCorpus gen_synthetic_corpus(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace mtram::corpus

#endif  // MTRAM_CORPUS_SYNTHETIC_HPP_
