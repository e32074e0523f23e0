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

#include "train/ablation.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace mtram::train {
namespace {

constexpr const char* kMetrics[] = {"macro_auc", "micro_auc", "macro_f1", "micro_f1", "p_at_k"};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

}  // namespace

std::string AblationCell::name() const {
  return std::string(to_string(mode)) + "/" + model::to_string(ram);
}

AblationCell parse_cell(const std::string& name) {
  const auto slash = name.find('/');
  if (slash == std::string::npos) {
    throw TrainError("ablation cell '" + name + "' must look like <mode>/<ram>");
  }
  AblationCell c;
  c.mode = task_mode_from_string(name.substr(0, slash));
  c.ram = model::ram_mode_from_string(name.substr(slash + 1));
  return c;
}

AblationResult run_ablation(const AblationInputs& in, const std::vector<AblationCell>& grid,
                            const std::vector<std::uint64_t>& seeds, const RunCallback& on_run) {
  if (grid.empty()) throw TrainError("run_ablation: empty grid");
  if (seeds.empty()) throw TrainError("run_ablation: need at least one seed");
  if (!in.train || !in.dev || !in.eval) throw TrainError("run_ablation: missing split");
  AblationResult result;
  for (const AblationCell& cell : grid) {
    CellResult cr;
    cr.cell = cell;
    for (std::uint64_t seed : seeds) {
      model::ModelConfig mc = in.model;
      mc.ram = cell.ram;
      TrainConfig tc = in.train_cfg;
      tc.mode = cell.mode;
      tc.seed = seed;
      model::ModelParams init = model::init_params(mc, seed, in.embeddings);
      TrainResult tr = train(*in.train, *in.dev, std::move(init), tc);
      SeedRun run;
      run.seed = seed;
      run.best_epoch = tr.best_epoch;
      run.eval = evaluate_split(*in.eval, tr.best, tc.threshold, tc.top_k);
      if (!tr.log.empty() && tr.log.front().loss_joint > 0.0) {
        run.train_loss_reduction = 1.0 - tr.log.back().loss_joint / tr.log.front().loss_joint;
      }
      run.log = std::move(tr.log);
      if (on_run) on_run(cell, run);
      cr.runs.push_back(std::move(run));
    }
    result.cells.push_back(std::move(cr));
  }
  return result;
}

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return out;
  double total = 0.0;
  for (double x : xs) total += x;
  out.mean = total / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

std::vector<std::string> ablation_metric_names() {
  std::vector<std::string> out;
  for (const char* task : {"fine", "coarse"}) {
    for (const char* m : kMetrics) out.push_back(std::string(task) + "_" + m);
  }
  return out;
}

double metric_value(const SplitReport& r, const std::string& name) {
  const bool fine = name.rfind("fine_", 0) == 0;
  const bool coarse = name.rfind("coarse_", 0) == 0;
  if (!fine && !coarse) throw TrainError("unknown metric " + name);
  const metrics::MetricsReport& m = fine ? r.fine : r.coarse;
  const std::string key = name.substr(fine ? 5 : 7);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (key == "macro_auc") return m.macro_auc.value_or(nan);
  if (key == "micro_auc") return m.micro_auc.value_or(nan);
  if (key == "macro_f1") return m.macro_f1;
  if (key == "micro_f1") return m.micro_f1;
  if (key == "p_at_k") return m.p_at_k;
  throw TrainError("unknown metric " + name);
}

std::string ablation_csv(const AblationResult& result) {
  const auto names = ablation_metric_names();
  std::string out = "config,seeds";
  for (const auto& n : names) out += "," + n + "_mean," + n + "_std";
  out += "\n";
  for (const CellResult& c : result.cells) {
    out += c.cell.name() + "," + std::to_string(c.runs.size());
    for (const auto& n : names) {
      std::vector<double> xs;
      for (const SeedRun& r : c.runs) xs.push_back(metric_value(r.eval, n));
      const MeanStd ms = mean_std(xs);
      out += "," + fmt("%.17g", ms.mean) + "," + fmt("%.17g", ms.std);
    }
    out += "\n";
  }
  return out;
}

std::vector<bool> per_seed_wins(const CellResult& a, const CellResult& b,
                                const std::string& metric) {
  if (a.runs.size() != b.runs.size()) throw TrainError("per_seed_wins: seed counts differ");
  std::vector<bool> wins;
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    wins.push_back(metric_value(a.runs[i].eval, metric) > metric_value(b.runs[i].eval, metric));
  }
  return wins;
}

std::string ablation_summary(const AblationResult& result) {
  std::string out;
  for (const CellResult& c : result.cells) {
    out += c.cell.name() + " (" + std::to_string(c.runs.size()) + " seeds)\n";
    for (const auto& n : ablation_metric_names()) {
      std::vector<double> xs;
      for (const SeedRun& r : c.runs) xs.push_back(metric_value(r.eval, n));
      const MeanStd ms = mean_std(xs);
      out += "  " + n + ": " + fmt("%.1f", 100.0 * ms.mean) + " +- " + fmt("%.1f", 100.0 * ms.std) +
             "\n";
    }
  }
  // Directional comparisons mirroring the usual ablation questions.
  auto find = [&](TaskMode m, model::RamMode r) -> const CellResult* {
    for (const CellResult& c : result.cells) {
      if (c.cell.mode == m && c.cell.ram == r) return &c;
    }
    return nullptr;
  };
  auto compare = [&](const CellResult* a, const CellResult* b, const char* label) {
    if (!a || !b || a->runs.size() != b->runs.size()) return;
    const auto wins = per_seed_wins(*a, *b, "fine_macro_f1");
    std::size_t count = 0;
    out += std::string(label) + " " + a->cell.name() + " vs " + b->cell.name() +
           " (fine macro-F1, per seed):";
    for (std::size_t i = 0; i < wins.size(); ++i) {
      out += wins[i] ? " win" : " loss";
      count += wins[i];
    }
    out += "  [" + std::to_string(count) + "/" + std::to_string(wins.size()) + "]\n";
  };
  using model::RamMode;
  compare(find(TaskMode::kMultitask, RamMode::kMultiplicative),
          find(TaskMode::kFineOnly, RamMode::kMultiplicative), "MTL:");
  compare(find(TaskMode::kFineOnly, RamMode::kMultiplicative),
          find(TaskMode::kFineOnly, RamMode::kOff), "RAM:");
  compare(find(TaskMode::kMultitask, RamMode::kMultiplicative),
          find(TaskMode::kMultitask, RamMode::kAdditive), "Mult-vs-Add:");
  return out;
}

}  // namespace mtram::train
