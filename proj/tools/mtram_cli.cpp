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

// mtram gen|pretrain|train|eval|ablate [--config PATH] [--seed N] [--out DIR]
//       [--section.field VALUE ...]
//
// Exit status: 0 success, 1 validation error, 2 runtime failure.

#include <algorithm>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mtram/mtram.h"

#include <CLI11.hpp>
#include <json.hpp>

namespace {

struct Options {
  std::string config;
  std::optional<unsigned long long> seed;
  std::string out;
  std::string data_dir;
  std::string embeddings;
  std::string checkpoint;
  std::string split;
  std::string task;
  std::string grid;
  std::string seeds;
  bool print_summary = false;
};

using ConfigPtr = std::unique_ptr<mtram_config, decltype(&mtram_config_destroy)>;

void print_errors(const std::string& msg) {
  std::size_t start = 0;
  while (start <= msg.size()) {
    const std::size_t end = std::min(msg.find('\n', start), msg.size());
    std::cerr << "error: " << msg.substr(start, end - start) << "\n";
    start = end + 1;
  }
}

int report_failure(mtram_status st) {
  print_errors(mtram_last_error());
  return static_cast<int>(st);
}

// "--a.b=v", "--a.b v" and "a.b=v" become (a.b, v).
bool parse_overrides(const std::vector<std::string>& extras,
                     std::vector<std::pair<std::string, std::string>>& out) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    std::string arg = extras[i];
    const bool dashed = arg.rfind("--", 0) == 0;
    if (dashed) arg = arg.substr(2);
    const std::size_t eq = arg.find('=');
    std::string key = arg.substr(0, eq);
    if (key.find('.') == std::string::npos) {
      std::cerr << "error: unrecognised argument '" << extras[i]
                << "' (overrides use dotted paths such as --train.epochs 3)\n";
      return false;
    }
    if (eq != std::string::npos) {
      out.emplace_back(key, arg.substr(eq + 1));
    } else if (dashed && i + 1 < extras.size()) {
      out.emplace_back(key, extras[++i]);
    } else {
      std::cerr << "error: override '" << extras[i] << "' has no value\n";
      return false;
    }
  }
  return true;
}

// A comma list as a JSON array of strings or numbers.
std::string json_list(const std::string& csv, bool numeric) {
  nlohmann::json arr = nlohmann::json::array();
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t end = std::min(csv.find(',', start), csv.size());
    const std::string item = csv.substr(start, end - start);
    if (!item.empty()) {
      if (numeric) {
        const nlohmann::json v = nlohmann::json::parse(item, nullptr, false);
        arr.push_back(v.is_discarded() ? nlohmann::json(item) : v);
      } else {
        arr.push_back(item);
      }
    }
    start = end + 1;
  }
  return arr.dump();
}

void log_line(const char* line, void*) { std::cerr << line << "\n"; }

int run(const std::string& command, const Options& o, const std::vector<std::string>& extras) {
  std::vector<std::pair<std::string, std::string>> overrides;
  if (!parse_overrides(extras, overrides)) return MTRAM_ERR_VALIDATION;
  if (!o.out.empty()) overrides.emplace_back("paths.out", o.out);
  if (!o.data_dir.empty()) overrides.emplace_back("paths.data_dir", o.data_dir);
  if (!o.embeddings.empty()) overrides.emplace_back("paths.embeddings", o.embeddings);
  if (!o.checkpoint.empty()) overrides.emplace_back("paths.checkpoint", o.checkpoint);
  if (!o.split.empty()) {
    overrides.emplace_back(command == "ablate" ? "ablate.split" : "eval.split", o.split);
  }
  if (!o.task.empty()) overrides.emplace_back("eval.task", o.task);
  if (!o.grid.empty()) overrides.emplace_back("ablate.grid", json_list(o.grid, false));
  if (!o.seeds.empty()) overrides.emplace_back("ablate.seeds", json_list(o.seeds, true));

  mtram_config* raw = nullptr;
  if (mtram_status st = mtram_config_create(&raw); st != MTRAM_OK) return report_failure(st);
  ConfigPtr cfg(raw, &mtram_config_destroy);
  if (!o.config.empty()) {
    if (mtram_status st = mtram_config_load(cfg.get(), o.config.c_str()); st != MTRAM_OK) {
      return report_failure(st);
    }
  }
  std::string problems;
  for (const auto& [key, value] : overrides) {
    if (mtram_config_set(cfg.get(), key.c_str(), value.c_str()) != MTRAM_OK) {
      problems += std::string(problems.empty() ? "" : "\n") + mtram_last_error();
    }
  }
  if (o.seed) mtram_config_set_seed(cfg.get(), *o.seed);
  if (!problems.empty()) {
    // Report the remaining field checks alongside the rejected overrides.
    if (mtram_config_validate(cfg.get()) != MTRAM_OK) {
      problems += "\n" + std::string(mtram_last_error());
    }
    print_errors(problems);
    return MTRAM_ERR_VALIDATION;
  }

  using Fn = mtram_status (*)(const mtram_config*, mtram_log_fn, void*, char**);
  Fn fn = command == "gen"        ? &mtram_cmd_gen
          : command == "pretrain" ? &mtram_cmd_pretrain
          : command == "train"    ? &mtram_cmd_train
          : command == "eval"     ? &mtram_cmd_eval
                                  : &mtram_cmd_ablate;
  char* result = nullptr;
  const mtram_status st = fn(cfg.get(), &log_line, nullptr, &result);
  if (st != MTRAM_OK) return report_failure(st);
  const nlohmann::json r = nlohmann::json::parse(result);
  mtram_string_free(result);
  for (const auto& w : r["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
  std::cout << r["text"].get<std::string>();
  if (o.print_summary) std::cout << r["summary"].dump(2) << "\n";
  return MTRAM_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MT-RAM: multitask ICD coding with a recalibrated aggregation module"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mtram_version());

  Options o;
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"gen", "generate a synthetic corpus with train/dev/test splits and a code map"},
      {"pretrain", "train skip-gram word embeddings on the training split"},
      {"train", "train a model; writes checkpoint, epoch log and dev report"},
      {"eval", "score a checkpoint on a split"},
      {"ablate", "train a grid of task modes and RAM variants over several seeds"},
  };
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->allow_extras();
    sub->add_option("--config", o.config, "JSON configuration file");
    sub->add_option("--seed", o.seed, "run seed");
    sub->add_option("--out", o.out, "output root directory");
    sub->add_option("--data-dir", o.data_dir, "corpus directory (default: generated corpus)");
    sub->add_flag("--print-summary", o.print_summary, "print the artifact summary as JSON");
    const std::string name = s.name;
    if (name == "train" || name == "ablate") {
      sub->add_option("--embeddings", o.embeddings, "pretrained embedding file");
    }
    if (name == "eval") {
      sub->add_option("--checkpoint", o.checkpoint, "checkpoint file");
      sub->add_option("--split", o.split, "train, dev or test");
      sub->add_option("--task", o.task, "fine, coarse or both");
    }
    if (name == "ablate") {
      sub->add_option("--grid", o.grid, "comma list of cells such as multitask/mult");
      sub->add_option("--seeds", o.seeds, "comma list of seeds");
      sub->add_option("--split", o.split, "evaluation split");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : MTRAM_ERR_VALIDATION;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    return run(sub->get_name(), o, sub->remaining());
  }
  return MTRAM_ERR_VALIDATION;
}
