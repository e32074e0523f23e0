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

#include "metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace mtram::metrics {
namespace {

double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

}  // namespace

void PredictionSet::validate() const {
  if (docs == 0) throw MetricsError("prediction set has no documents");
  if (scores.size() != docs * labels || targets.size() != docs * labels) {
    throw MetricsError("prediction set: scores/targets do not match " + std::to_string(docs) +
                       "x" + std::to_string(labels));
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw MetricsError("prediction set: non-finite score");
  }
}

F1Scores micro_macro_f1(const PredictionSet& ps) {
  ps.validate();
  std::size_t tp = 0, fp = 0, fn = 0;
  double macro_sum = 0.0;
  for (std::size_t l = 0; l < ps.labels; ++l) {
    std::size_t ltp = 0, lfp = 0, lfn = 0;
    for (std::size_t d = 0; d < ps.docs; ++d) {
      const bool pred = ps.score(d, l) > ps.threshold;
      const bool gold = ps.target(d, l);
      ltp += pred && gold;
      lfp += pred && !gold;
      lfn += !pred && gold;
    }
    macro_sum += f1(ltp, lfp, lfn);
    tp += ltp;
    fp += lfp;
    fn += lfn;
  }
  F1Scores out;
  out.micro = f1(tp, fp, fn);
  out.macro = ps.labels == 0 ? 0.0 : macro_sum / static_cast<double>(ps.labels);
  return out;
}

std::optional<double> rank_auc(const std::vector<double>& scores,
                               const std::vector<std::uint8_t>& targets) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] < scores[b];
    return a < b;
  });
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // Ranks i+1 .. j share their mean.
    const double mean_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (targets[order[k]] != 0) {
        positive_rank_sum += mean_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;
  const double p = static_cast<double>(positives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

AucScores micro_macro_auc(const PredictionSet& ps) {
  ps.validate();
  AucScores out;
  auto micro = rank_auc(ps.scores, ps.targets);
  if (!micro) throw MetricsError("micro-AUC undefined: need both positive and negative cells");
  out.micro = *micro;
  double total = 0.0;
  std::size_t valid = 0;
  std::vector<double> col(ps.docs);
  std::vector<std::uint8_t> ycol(ps.docs);
  for (std::size_t l = 0; l < ps.labels; ++l) {
    for (std::size_t d = 0; d < ps.docs; ++d) {
      col[d] = ps.score(d, l);
      ycol[d] = ps.targets[d * ps.labels + l];
    }
    if (auto a = rank_auc(col, ycol)) {
      total += *a;
      ++valid;
    } else {
      ++out.skipped_labels;
    }
  }
  if (valid == 0) throw MetricsError("macro-AUC undefined: no label has both classes");
  out.macro = total / static_cast<double>(valid);
  return out;
}

double precision_at_k(const PredictionSet& ps, std::size_t k) {
  ps.validate();
  if (k == 0) throw MetricsError("precision_at_k: k must be >= 1");
  if (k > ps.labels) {
    throw MetricsError("precision_at_k: k=" + std::to_string(k) + " exceeds " +
                       std::to_string(ps.labels) + " labels");
  }
  std::vector<std::size_t> idx(ps.labels);
  double total = 0.0;
  for (std::size_t d = 0; d < ps.docs; ++d) {
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double sa = ps.score(d, a), sb = ps.score(d, b);
                        return sa != sb ? sa > sb : a < b;
                      });
    std::size_t hits = 0;
    for (std::size_t i = 0; i < k; ++i) hits += ps.target(d, idx[i]);
    total += static_cast<double>(hits) / static_cast<double>(k);
  }
  return total / static_cast<double>(ps.docs);
}

MetricsReport evaluate(const PredictionSet& ps, std::size_t k) {
  ps.validate();
  MetricsReport r;
  const F1Scores f = micro_macro_f1(ps);
  r.micro_f1 = f.micro;
  r.macro_f1 = f.macro;
  r.k = std::min(k, ps.labels);
  r.p_at_k = r.k == 0 ? 0.0 : precision_at_k(ps, r.k);
  if (auto micro = rank_auc(ps.scores, ps.targets)) {
    r.micro_auc = *micro;
    try {
      const AucScores a = micro_macro_auc(ps);
      r.macro_auc = a.macro;
      r.auc_skipped_labels = a.skipped_labels;
    } catch (const MetricsError&) {
      r.auc_skipped_labels = ps.labels;
    }
  } else {
    r.auc_skipped_labels = ps.labels;
  }
  return r;
}

nlohmann::json report_to_json(const MetricsReport& r) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return {{"macro_auc", opt(r.macro_auc)},
          {"micro_auc", opt(r.micro_auc)},
          {"macro_f1", r.macro_f1},
          {"micro_f1", r.micro_f1},
          {"p_at_k", r.p_at_k},
          {"k", r.k},
          {"auc_skipped_labels", r.auc_skipped_labels}};
}

MetricsReport report_from_json(const nlohmann::json& j) {
  auto opt = [&](const char* key) -> std::optional<double> {
    const auto& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
  };
  MetricsReport r;
  r.macro_auc = opt("macro_auc");
  r.micro_auc = opt("micro_auc");
  r.macro_f1 = j.at("macro_f1").get<double>();
  r.micro_f1 = j.at("micro_f1").get<double>();
  r.p_at_k = j.at("p_at_k").get<double>();
  r.k = j.at("k").get<std::size_t>();
  r.auc_skipped_labels = j.at("auc_skipped_labels").get<std::size_t>();
  return r;
}

std::string format_percent(const MetricsReport& r) {
  auto pct = [](const std::optional<double>& v) {
    if (!v) return std::string("n/a");
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * *v);
    return std::string(buf);
  };
  return "macro-AUC " + pct(r.macro_auc) + "  micro-AUC " + pct(r.micro_auc) + "  macro-F1 " +
         pct(r.macro_f1) + "  micro-F1 " + pct(r.micro_f1) + "  P@" + std::to_string(r.k) +
         " " + pct(r.p_at_k);
}

}  // namespace mtram::metrics
