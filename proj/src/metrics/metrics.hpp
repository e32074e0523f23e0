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

#ifndef MTRAM_METRICS_METRICS_HPP_
#define MTRAM_METRICS_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace mtram::metrics {

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scores and binary targets for `docs` x `labels` cells, row-major.
struct PredictionSet {
  std::size_t docs = 0;
  std::size_t labels = 0;
  std::vector<double> scores;
  std::vector<std::uint8_t> targets;
  // A cell is predicted positive when score > threshold.
  double threshold = 0.5;

  PredictionSet() = default;
  PredictionSet(std::size_t n_docs, std::size_t n_labels)
      : docs(n_docs), labels(n_labels), scores(n_docs * n_labels, 0.0),
        targets(n_docs * n_labels, 0) {}

  double score(std::size_t d, std::size_t l) const { return scores[d * labels + l]; }
  bool target(std::size_t d, std::size_t l) const { return targets[d * labels + l] != 0; }
  void set(std::size_t d, std::size_t l, double s, bool y) {
    scores[d * labels + l] = s;
    targets[d * labels + l] = y ? 1 : 0;
  }

  // Throws MetricsError on shape mismatch, no documents, or non-finite scores.
  void validate() const;
};

struct F1Scores {
  double micro = 0.0;
  double macro = 0.0;
};

struct AucScores {
  double micro = 0.0;
  double macro = 0.0;
  std::size_t skipped_labels = 0;  // labels lacking a positive or a negative
};

// Micro pools TP/FP/FN over all cells; macro averages per-label F1.
// F1 with no positives predicted or present counts as 0.
F1Scores micro_macro_f1(const PredictionSet& ps);

// Mann-Whitney AUC with tied scores credited one half. Throws MetricsError
// when the flattened matrix lacks either class or no label is valid.
AucScores micro_macro_auc(const PredictionSet& ps);

// AUC of one score/target column; nullopt when a class is missing.
std::optional<double> rank_auc(const std::vector<double>& scores,
                               const std::vector<std::uint8_t>& targets);

// Mean over documents of |top-k labels in gold| / k; ties go to the lower
// label index. Throws MetricsError if k is 0 or exceeds the label count.
double precision_at_k(const PredictionSet& ps, std::size_t k);

struct MetricsReport {
  std::optional<double> macro_auc;
  std::optional<double> micro_auc;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  double p_at_k = 0.0;
  std::size_t k = 5;
  std::size_t auc_skipped_labels = 0;
};

// All metrics; AUCs are left empty when undefined for this set. k is
// clamped to the label count.
MetricsReport evaluate(const PredictionSet& ps, std::size_t k = 5);

// Flat JSON object with raw fractions; AUCs are null when undefined.
nlohmann::json report_to_json(const MetricsReport& r);
MetricsReport report_from_json(const nlohmann::json& j);

// "macro-AUC 92.1  micro-AUC 94.3  macro-F1 65.2  micro-F1 70.7  P@5 66.4"
std::string format_percent(const MetricsReport& r);

}  // namespace mtram::metrics

#endif  // MTRAM_METRICS_METRICS_HPP_
