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

#include "corpus/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "numcore/ops.hpp"

namespace mtram::corpus {
namespace {

std::string padded(char prefix, std::size_t i, std::size_t count) {
  const int width = std::max(2, static_cast<int>(std::to_string(count - 1).size()));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%0*zu", prefix, width, i);
  return buf;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(num::uniform01(rng) * static_cast<double>(n)));
}

}  // namespace

void SyntheticSpec::validate() const {
  if (n_docs == 0) throw CorpusError("synthetic: n_docs must be positive");
  if (m_fine == 0 || m_coarse == 0) throw CorpusError("synthetic: label counts must be positive");
  if (m_coarse > m_fine) throw CorpusError("synthetic: m_coarse must not exceed m_fine");
  if (min_len == 0 || min_len > max_len) {
    throw CorpusError("synthetic: need 0 < min_len <= max_len");
  }
  if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) {
    throw CorpusError("synthetic: noise_rate must be in [0,1]");
  }
  if (!(label_sparsity > 0.0)) throw CorpusError("synthetic: label_sparsity must be positive");
  if (signal_tokens_per_code == 0) {
    throw CorpusError("synthetic: signal_tokens_per_code must be positive");
  }
  if (m_fine * signal_tokens_per_code >= vocab_size) {
    throw CorpusError("synthetic: vocab_size " + std::to_string(vocab_size) +
                      " too small for " + std::to_string(m_fine) + " signal sets of " +
                      std::to_string(signal_tokens_per_code) + " tokens plus background");
  }
  if (vocab_size > 26u * 26u * 26u * 26u) throw CorpusError("synthetic: vocab_size too large");
}

std::string synthetic_token(std::size_t i) {
  std::string s(5, 'a');
  s[0] = 't';
  for (std::size_t k = 4; k >= 1; --k) {
    s[k] = static_cast<char>('a' + i % 26);
    i /= 26;
  }
  return s;
}

std::string fine_code_name(std::size_t i, std::size_t m_fine) { return padded('D', i, m_fine); }
std::string coarse_code_name(std::size_t i, std::size_t m_coarse) {
  return padded('G', i, m_coarse);
}

std::vector<double> code_priors(const SyntheticSpec& spec) {
  std::vector<double> w(spec.m_fine);
  double total = 0.0;
  for (std::size_t j = 0; j < spec.m_fine; ++j) {
    w[j] = std::pow(static_cast<double>(j + 1), -spec.prior_decay);
    total += w[j];
  }
  for (double& p : w) p = std::min(0.95, p * spec.label_sparsity / total);
  return w;
}

CodeMap block_code_map(std::size_t m_fine, std::size_t m_coarse) {
  if (m_coarse == 0 || m_coarse > m_fine) {
    throw CorpusError("block_code_map: need 0 < m_coarse <= m_fine");
  }
  const std::size_t base = m_fine / m_coarse;
  const std::size_t extra = m_fine % m_coarse;
  std::map<std::string, std::string> pairs;
  std::size_t fine = 0;
  for (std::size_t b = 0; b < m_coarse; ++b) {
    const std::size_t size = base + (b >= m_coarse - extra ? 1 : 0);
    for (std::size_t k = 0; k < size; ++k, ++fine) {
      pairs.emplace(fine_code_name(fine, m_fine), coarse_code_name(b, m_coarse));
    }
  }
  return CodeMap(pairs);
}

LabelVector sample_fine_labels(const std::vector<double>& priors, std::mt19937_64& rng) {
  LabelVector y(priors.size(), 0);
  for (std::size_t j = 0; j < priors.size(); ++j) y[j] = num::uniform01(rng) < priors[j] ? 1 : 0;
  return y;
}

SyntheticCorpus gen_synthetic_corpus(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  SyntheticCorpus out;
  out.code_map = block_code_map(spec.m_fine, spec.m_coarse);
  out.priors = code_priors(spec);
  const std::size_t sig = spec.signal_tokens_per_code;
  const std::size_t background_begin = spec.m_fine * sig;
  const std::size_t background = spec.vocab_size - background_begin;

  std::mt19937_64 rng(seed);
  out.docs.reserve(spec.n_docs);
  // At least six digits so ids stay fixed as the corpus grows.
  const int id_width = std::max(6, static_cast<int>(std::to_string(spec.n_docs).size()));
  for (std::size_t d = 0; d < spec.n_docs; ++d) {
    const LabelVector fine = sample_fine_labels(out.priors, rng);
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < fine.size(); ++j) {
      if (fine[j]) active.push_back(j);
    }
    const std::size_t len =
        spec.min_len + uniform_index(rng, spec.max_len - spec.min_len + 1);
    std::string text;
    for (std::size_t t = 0; t < len; ++t) {
      std::size_t tok;
      const double u = num::uniform01(rng);
      if (active.empty() || u < spec.noise_rate) {
        tok = background_begin + uniform_index(rng, background);
      } else {
        const std::size_t code = active[uniform_index(rng, active.size())];
        tok = code * sig + uniform_index(rng, sig);
      }
      if (t > 0) text += ' ';
      text += synthetic_token(tok);
    }
    DocumentRecord rec;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "doc%0*zu", id_width, d);
    rec.id = buf;
    rec.text = std::move(text);
    std::vector<std::string> ccs;
    const LabelVector coarse = out.code_map.map_fine_to_coarse(fine);
    for (std::size_t j : active) rec.icd.push_back(out.code_map.fine_codes()[j]);
    for (std::size_t c = 0; c < coarse.size(); ++c) {
      if (coarse[c]) ccs.push_back(out.code_map.coarse_codes()[c]);
    }
    rec.ccs = std::move(ccs);
    out.docs.push_back(std::move(rec));
  }
  return out;
}

}  // namespace mtram::corpus
