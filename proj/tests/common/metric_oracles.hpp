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


// Brute-force reference implementations for the evaluation metrics. They
// favour obviousness over speed and share no code with the library.

#ifndef MTRAM_TESTS_METRIC_ORACLES_HPP_
#define MTRAM_TESTS_METRIC_ORACLES_HPP_

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "metrics/metrics.hpp"

namespace mtram::testing {

inline double oracle_f1(double tp, double fp, double fn) {
  const double denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2 * tp / denom;
}

struct OracleF1 {
  double micro = 0.0;
  double macro = 0.0;
};

inline OracleF1 oracle_micro_macro_f1(const metrics::PredictionSet& ps) {
  double tp = 0, fp = 0, fn = 0, macro = 0;
  for (std::size_t l = 0; l < ps.labels; ++l) {
    double ltp = 0, lfp = 0, lfn = 0;
    for (std::size_t d = 0; d < ps.docs; ++d) {
      const bool pred = ps.score(d, l) > ps.threshold;
      const bool gold = ps.target(d, l);
      if (pred && gold) ++ltp;
      if (pred && !gold) ++lfp;
      if (!pred && gold) ++lfn;
    }
    tp += ltp;
    fp += lfp;
    fn += lfn;
    macro += oracle_f1(ltp, lfp, lfn);
  }
  return {oracle_f1(tp, fp, fn), macro / static_cast<double>(ps.labels)};
}

// Fraction of (positive, negative) pairs ordered correctly, ties at 1/2.
inline std::optional<double> oracle_pairwise_auc(const std::vector<double>& s,
                                                 const std::vector<std::uint8_t>& y) {
  double credit = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!y[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j]) continue;
      pairs += 1;
      credit += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  if (pairs == 0) return std::nullopt;
  return credit / pairs;
}

inline double oracle_precision_at_k(const metrics::PredictionSet& ps, std::size_t k) {
  double total = 0;
  for (std::size_t d = 0; d < ps.docs; ++d) {
    std::vector<std::size_t> idx(ps.labels);
    std::iota(idx.begin(), idx.end(), 0);
    // Selection by repeated arg-max keeps the lowest index among ties.
    double hits = 0;
    std::vector<bool> taken(ps.labels, false);
    for (std::size_t r = 0; r < k; ++r) {
      std::size_t best = ps.labels;
      for (std::size_t l = 0; l < ps.labels; ++l) {
        if (taken[l]) continue;
        if (best == ps.labels || ps.score(d, l) > ps.score(d, best)) best = l;
      }
      taken[best] = true;
      hits += ps.target(d, best) ? 1 : 0;
    }
    total += hits / static_cast<double>(k);
  }
  return total / static_cast<double>(ps.docs);
}

// Random set with coarse scores so ties occur.
inline metrics::PredictionSet random_prediction_set(std::mt19937_64& rng, std::size_t docs,
                                                    std::size_t labels, int levels = 10) {
  metrics::PredictionSet ps(docs, labels);
  std::uniform_int_distribution<int> level(0, levels), bit(0, 3);
  for (std::size_t d = 0; d < docs; ++d) {
    for (std::size_t l = 0; l < labels; ++l) {
      ps.set(d, l, level(rng) / static_cast<double>(levels), bit(rng) == 0);
    }
  }
  return ps;
}

}  // namespace mtram::testing

#endif  // MTRAM_TESTS_METRIC_ORACLES_HPP_
