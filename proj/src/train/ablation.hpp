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

#ifndef MTRAM_TRAIN_ABLATION_HPP_
#define MTRAM_TRAIN_ABLATION_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "train/trainer.hpp"

namespace mtram::train {

struct AblationCell {
  TaskMode mode = TaskMode::kMultitask;
  model::RamMode ram = model::RamMode::kMultiplicative;

  std::string name() const;  // e.g. "multitask/mult"
  friend bool operator==(const AblationCell&, const AblationCell&) = default;
};

// Parses "multitask/mult"-style names.
AblationCell parse_cell(const std::string& name);

struct SeedRun {
  std::uint64_t seed = 0;
  SplitReport eval;                       // on the evaluation split
  std::vector<EpochRecord> log;
  std::size_t best_epoch = 0;
  // 1 - final/first epoch-mean joint training loss.
  double train_loss_reduction = 0.0;
};

struct CellResult {
  AblationCell cell;
  std::vector<SeedRun> runs;
};

struct AblationResult {
  std::vector<CellResult> cells;
};

struct AblationInputs {
  const Split* train = nullptr;
  const Split* dev = nullptr;
  const Split* eval = nullptr;
  model::ModelConfig model;          // ram field is overridden per cell
  TrainConfig train_cfg;             // mode and seed are overridden per run
  std::optional<num::Matrix> embeddings;
};

using RunCallback = std::function<void(const AblationCell&, const SeedRun&)>;

// Trains every cell once per seed (model init and training both use the
// seed) and scores the selected checkpoint on the evaluation split.
AblationResult run_ablation(const AblationInputs& in, const std::vector<AblationCell>& grid,
                            const std::vector<std::uint64_t>& seeds,
                            const RunCallback& on_run = {});

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single seed
};
MeanStd mean_std(const std::vector<double>& xs);

// Names of the aggregated metrics, e.g. "fine_macro_f1".
std::vector<std::string> ablation_metric_names();
// Per-seed metric value by name; undefined AUCs read as NaN.
double metric_value(const SplitReport& r, const std::string& name);

// Columns: config, seeds, then <metric>_mean,<metric>_std per metric.
std::string ablation_csv(const AblationResult& result);
// Mean +- std per cell in percent, then per-seed directional comparisons.
std::string ablation_summary(const AblationResult& result);

// Seeds (by index) where cell `a` beats cell `b` strictly on `metric`.
std::vector<bool> per_seed_wins(const CellResult& a, const CellResult& b,
                                const std::string& metric);

}  // namespace mtram::train

#endif  // MTRAM_TRAIN_ABLATION_HPP_
