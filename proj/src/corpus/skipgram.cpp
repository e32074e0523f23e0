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

#include "corpus/skipgram.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "numcore/ops.hpp"

namespace mtram::corpus {
namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Cumulative unigram^0.75 weights for inverse-CDF negative sampling.
std::vector<double> noise_cdf(std::span<const std::vector<int>> docs, std::size_t vocab_size) {
  std::vector<double> counts(vocab_size, 0.0);
  for (const auto& d : docs) {
    for (int id : d) {
      if (id != kPadId) counts[static_cast<std::size_t>(id)] += 1.0;
    }
  }
  std::vector<double> cdf(vocab_size, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < vocab_size; ++i) {
    total += std::pow(counts[i], 0.75);
    cdf[i] = total;
  }
  for (double& c : cdf) c /= total;
  return cdf;
}

}  // namespace

EmbeddingTable init_embeddings(std::size_t vocab_size, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw CorpusError("embedding dimension must be positive");
  std::mt19937_64 rng(seed);
  EmbeddingTable t{num::Matrix(vocab_size, dim)};
  const double r = 0.5 / static_cast<double>(dim);
  for (std::size_t i = 0; i < vocab_size; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double u = num::uniform01(rng);
      t.vectors(i, j) = i == static_cast<std::size_t>(kPadId) ? 0.0 : (2.0 * u - 1.0) * r;
    }
  }
  return t;
}

EmbeddingTable pretrain_skipgram(std::span<const std::vector<int>> docs, std::size_t vocab_size,
                                 const SkipgramOptions& opts) {
  if (opts.dim == 0) throw CorpusError("pretrain_skipgram: dimension must be positive");
  if (opts.window == 0) throw CorpusError("pretrain_skipgram: window must be positive");
  EmbeddingTable table = init_embeddings(vocab_size, opts.dim, opts.seed);
  std::size_t total_tokens = 0;
  for (const auto& d : docs) total_tokens += d.size();
  if (total_tokens == 0 || opts.epochs == 0) return table;

  const std::size_t dim = opts.dim;
  num::Matrix context(vocab_size, dim);
  const std::vector<double> cdf = noise_cdf(docs, vocab_size);
  std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  auto draw_negative = [&] {
    const double u = num::uniform01(rng);
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        it - cdf.begin(), static_cast<std::ptrdiff_t>(vocab_size) - 1));
  };

  const double total_work = static_cast<double>(total_tokens * opts.epochs);
  double done = 0.0;
  std::vector<double> grad_in(dim);
  for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
    for (const auto& doc : docs) {
      const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(doc.size());
      for (std::ptrdiff_t i = 0; i < n; ++i, done += 1.0) {
        const int center = doc[static_cast<std::size_t>(i)];
        if (center == kPadId) continue;
        const double lr = std::max(opts.learning_rate * 1e-4,
                                   opts.learning_rate * (1.0 - done / total_work));
        // word2vec-style random window shrink.
        const auto shrink = static_cast<std::ptrdiff_t>(rng() % opts.window);
        const std::ptrdiff_t w = static_cast<std::ptrdiff_t>(opts.window) - shrink;
        for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - w);
             j <= std::min(n - 1, i + w); ++j) {
          if (j == i) continue;
          const int ctx = doc[static_cast<std::size_t>(j)];
          if (ctx == kPadId) continue;
          double* in_vec = table.vectors.row(static_cast<std::size_t>(center)).data();
          std::fill(grad_in.begin(), grad_in.end(), 0.0);
          for (std::size_t s = 0; s <= opts.negatives; ++s) {
            const std::size_t target = s == 0 ? static_cast<std::size_t>(ctx) : draw_negative();
            if (s > 0 && target == static_cast<std::size_t>(ctx)) continue;
            const double label = s == 0 ? 1.0 : 0.0;
            double* out_vec = context.row(target).data();
            double dot = 0.0;
            for (std::size_t k = 0; k < dim; ++k) dot += in_vec[k] * out_vec[k];
            const double g = lr * (label - sigmoid(dot));
            for (std::size_t k = 0; k < dim; ++k) {
              grad_in[k] += g * out_vec[k];
              out_vec[k] += g * in_vec[k];
            }
          }
          for (std::size_t k = 0; k < dim; ++k) in_vec[k] += grad_in[k];
        }
      }
    }
  }
  std::fill(table.vectors.row(kPadId).begin(), table.vectors.row(kPadId).end(), 0.0);
  return table;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

}  // namespace mtram::corpus
