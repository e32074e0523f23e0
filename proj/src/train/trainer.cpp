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

#include "train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "numcore/hash.hpp"
#include "numcore/ops.hpp"

namespace mtram::train {
namespace {

constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kDropoutStream = 2;

}  // namespace

const char* to_string(TaskMode mode) {
  switch (mode) {
    case TaskMode::kMultitask: return "multitask";
    case TaskMode::kFineOnly: return "fine_only";
    case TaskMode::kCoarseOnly: return "coarse_only";
  }
  return "?";
}

TaskMode task_mode_from_string(const std::string& s) {
  if (s == "multitask") return TaskMode::kMultitask;
  if (s == "fine_only") return TaskMode::kFineOnly;
  if (s == "coarse_only") return TaskMode::kCoarseOnly;
  throw TrainError("unknown task mode '" + s + "' (expected multitask, fine_only or coarse_only)");
}

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw TrainError("train: lr must be positive");
  if (batch_size == 0) throw TrainError("train: batch_size must be positive");
  if (lambda_fine < 0.0 || lambda_coarse < 0.0 || (lambda_fine == 0.0 && lambda_coarse == 0.0)) {
    throw TrainError("train: loss weights must be non-negative and not both zero");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
    throw TrainError("train: Adam betas must be in [0,1)");
  }
  if (!(epsilon > 0.0)) throw TrainError("train: Adam epsilon must be positive");
  if (top_k == 0) throw TrainError("train: top_k must be positive");
}

LossWeights TrainConfig::loss_weights() const {
  switch (mode) {
    case TaskMode::kFineOnly: return {1.0, 0.0};
    case TaskMode::kCoarseOnly: return {0.0, 1.0};
    case TaskMode::kMultitask: break;
  }
  return {lambda_fine, lambda_coarse};
}

AdamConfig TrainConfig::adam() const { return {lr, beta1, beta2, epsilon}; }

nlohmann::json EpochRecord::to_json() const {
  nlohmann::json j = {{"epoch", epoch},
                      {"loss_fine", loss_fine},
                      {"loss_coarse", loss_coarse},
                      {"loss_joint", loss_joint}};
  for (const auto& [prefix, rep] : {std::pair{"dev_fine_", &dev_fine},
                                    std::pair{"dev_coarse_", &dev_coarse}}) {
    const nlohmann::json r = metrics::report_to_json(*rep);
    for (const auto& [key, value] : r.items()) {
      j[std::string(prefix) + key] = value;
    }
  }
  return j;
}

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = std::min(i - 1, static_cast<std::size_t>(num::uniform01(rng) *
                                                            static_cast<double>(i)));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

SplitPredictions predict_split(const Split& docs, model::ModelParams& params, double threshold) {
  SplitPredictions out{metrics::PredictionSet(docs.size(), params.config.m_fine),
                       metrics::PredictionSet(docs.size(), params.config.m_coarse)};
  out.fine.threshold = threshold;
  out.coarse.threshold = threshold;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const model::Prediction p = model::predict(docs[d], params);
    if (docs[d].fine_labels.size() != p.fine.size() ||
        docs[d].coarse_labels.size() != p.coarse.size()) {
      throw TrainError("document " + docs[d].id + ": label space does not match model heads");
    }
    for (std::size_t l = 0; l < p.fine.size(); ++l) {
      out.fine.set(d, l, p.fine[l], docs[d].fine_labels[l] != 0);
    }
    for (std::size_t l = 0; l < p.coarse.size(); ++l) {
      out.coarse.set(d, l, p.coarse[l], docs[d].coarse_labels[l] != 0);
    }
  }
  return out;
}

SplitReport evaluate_split(const Split& docs, model::ModelParams& params, double threshold,
                           std::size_t k) {
  if (docs.empty()) throw TrainError("evaluate_split: empty split");
  SplitPredictions p = predict_split(docs, params, threshold);
  return {metrics::evaluate(p.fine, k), metrics::evaluate(p.coarse, k)};
}

TrainResult train(const Split& train_docs, const Split& dev_docs, model::ModelParams params,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  if (train_docs.empty()) throw TrainError("train: empty training split");
  if (dev_docs.empty()) throw TrainError("train: empty dev split");
  {
    std::set<std::string> ids;
    for (const auto& d : train_docs) ids.insert(d.id);
    for (const auto& d : dev_docs) {
      if (ids.count(d.id) != 0) {
        throw TrainError("train: document " + d.id + " appears in both train and dev splits");
      }
    }
  }

  const LossWeights weights = cfg.loss_weights();
  const AdamConfig adam = cfg.adam();
  TrainResult result;
  params.zero_grad();
  result.best = params;
  if (cfg.epochs == 0) return result;

  std::vector<num::Parameter*> plist = params.parameters();
  AdamState state;
  const std::size_t n = train_docs.size();
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto order =
        shuffled_order(n, num::derive_seed(cfg.seed, kShuffleStream * 1000003 + epoch));
    std::mt19937_64 drop_rng(num::derive_seed(cfg.seed, kDropoutStream * 1000003 + epoch));
    double sum_fine = 0.0, sum_coarse = 0.0, sum_joint = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size, ++batch_index) {
      const std::size_t stop = std::min(n, start + cfg.batch_size);
      const double inv_batch = 1.0 / static_cast<double>(stop - start);
      params.zero_grad();
      double b_fine = 0.0, b_coarse = 0.0, b_joint = 0.0;
      const auto where = [&] {
        return "epoch " + std::to_string(epoch) + " batch " + std::to_string(batch_index) + ": ";
      };
      try {
        for (std::size_t i = start; i < stop; ++i) {
          const corpus::EncodedDocument& doc = train_docs[order[i]];
          num::Tape tape;
          model::ForwardOutput f = model::model_forward(tape, doc, params, true, drop_rng);
          num::DiffTensor lf = bce_loss(f.fine.probs, doc.fine_labels);
          num::DiffTensor lc = bce_loss(f.coarse.probs, doc.coarse_labels);
          num::DiffTensor lj = joint_loss(lf, lc, weights);
          tape.backward(num::scale(lj, inv_batch));
          b_fine += lf.value()[0];
          b_coarse += lc.value()[0];
          b_joint += lj.value()[0];
          result.peak_tape_doubles =
              std::max(result.peak_tape_doubles, tape.owned_value_doubles());
        }
        adam_step(plist, state, adam);
      } catch (const num::NumError& e) {
        throw TrainError(where() + e.what());
      } catch (const TrainError& e) {
        throw TrainError(where() + e.what());
      }
      if (!std::isfinite(b_joint)) {
        throw TrainError(where() + "non-finite loss");
      }
      result.steps.push_back({epoch, batch_index, b_fine * inv_batch, b_coarse * inv_batch,
                              b_joint * inv_batch});
      sum_fine += b_fine;
      sum_coarse += b_coarse;
      sum_joint += b_joint;
    }
    params.zero_grad();

    EpochRecord rec;
    rec.epoch = epoch;
    const double inv_n = 1.0 / static_cast<double>(n);
    rec.loss_fine = sum_fine * inv_n;
    rec.loss_coarse = sum_coarse * inv_n;
    rec.loss_joint = sum_joint * inv_n;
    const SplitReport dev = evaluate_split(dev_docs, params, cfg.threshold, cfg.top_k);
    rec.dev_fine = dev.fine;
    rec.dev_coarse = dev.coarse;
    const double score =
        cfg.mode == TaskMode::kCoarseOnly ? dev.coarse.micro_f1 : dev.fine.micro_f1;
    if (result.best_epoch == 0 || score > result.best_score) {
      result.best = params;
      result.best_epoch = epoch;
      result.best_score = score;
    }
    result.log.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return result;
}

}  // namespace mtram::train
