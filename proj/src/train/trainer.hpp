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

#ifndef MTRAM_TRAIN_TRAINER_HPP_
#define MTRAM_TRAIN_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "corpus/text.hpp"
#include "json.hpp"
#include "metrics/metrics.hpp"
#include "model/mtram.hpp"
#include "train/optim.hpp"

namespace mtram::train {

enum class TaskMode { kMultitask, kFineOnly, kCoarseOnly };

const char* to_string(TaskMode mode);
TaskMode task_mode_from_string(const std::string& s);  // multitask | fine_only | coarse_only

struct TrainConfig {
  double lr = 0.008;
  std::size_t batch_size = 16;
  std::size_t epochs = 10;
  double lambda_fine = 0.7;
  double lambda_coarse = 0.3;
  std::uint64_t seed = 1;
  TaskMode mode = TaskMode::kMultitask;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double threshold = 0.5;
  std::size_t top_k = 5;

  void validate() const;
  // (lambda_fine, lambda_coarse) in multitask mode, (1,0) / (0,1) otherwise.
  LossWeights loss_weights() const;
  AdamConfig adam() const;
};

using Split = std::vector<corpus::EncodedDocument>;

struct StepRecord {
  std::size_t epoch = 0;
  std::size_t batch = 0;
  double loss_fine = 0.0;   // batch means
  double loss_coarse = 0.0;
  double loss_joint = 0.0;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double loss_fine = 0.0;  // means over training documents
  double loss_coarse = 0.0;
  double loss_joint = 0.0;
  metrics::MetricsReport dev_fine;
  metrics::MetricsReport dev_coarse;

  nlohmann::json to_json() const;
};

struct TrainResult {
  model::ModelParams best;
  std::size_t best_epoch = 0;  // 0 when no epoch ran
  double best_score = 0.0;
  std::vector<EpochRecord> log;
  std::vector<StepRecord> steps;
  // Largest per-document tape footprint seen, in doubles.
  std::size_t peak_tape_doubles = 0;
};

struct SplitPredictions {
  metrics::PredictionSet fine;
  metrics::PredictionSet coarse;
};

SplitPredictions predict_split(const Split& docs, model::ModelParams& params, double threshold);

struct SplitReport {
  metrics::MetricsReport fine;
  metrics::MetricsReport coarse;
};
SplitReport evaluate_split(const Split& docs, model::ModelParams& params, double threshold,
                           std::size_t k);

// Seeded Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed);

// Optional per-epoch observer, e.g. for progress output.
using EpochCallback = std::function<void(const EpochRecord&)>;

// Mini-batch Adam on the joint loss. Each batch loss is the mean over its
// documents of the per-document label-sum BCE. After every epoch the dev
// split is scored and the parameters with the best dev micro-F1 (fine
// task; coarse task in coarse_only mode) are kept.
TrainResult train(const Split& train_docs, const Split& dev_docs, model::ModelParams params,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = {});

}  // namespace mtram::train

#endif  // MTRAM_TRAIN_TRAINER_HPP_
