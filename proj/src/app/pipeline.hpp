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

// The five commands behind the CLI. Every command validates the whole
// configuration first and reports all problems in one ValidationError;
// anything that fails afterwards is a runtime error. Output directories are
// named <kind>-<config hash>-s<seed> under paths.out, and every artifact
// records the config hash and seed.

#ifndef MTRAM_APP_PIPELINE_HPP_
#define MTRAM_APP_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "app/config.hpp"
#include "corpus/text.hpp"
#include "train/trainer.hpp"

#include <json.hpp>

namespace mtram::app {

// Progress lines (one per epoch or run); may be empty.
using Logger = std::function<void(const std::string&)>;

struct CommandResult {
  // {"command", "config_hash", "seed", "artifacts": {name: path}, ...}
  nlohmann::json summary;
  std::string text;  // human-readable report for stdout
  std::vector<std::string> warnings;
};

// "train", "dev" or "test" from a seeded hash of the document id, so a
// document keeps its split when the corpus grows.
std::string split_of(const std::string& doc_id, std::uint64_t seed, double train_frac,
                     double dev_frac);

std::filesystem::path run_dir(const RunConfig& cfg, const std::string& kind);

// Train-split vocabulary and all three splits encoded against it. The test
// split is loaded only when `with_test` is set.
struct PreparedData {
  corpus::Vocabulary vocab;
  corpus::CodeMap code_map;
  train::Split train;
  train::Split dev;
  train::Split test;
};
PreparedData prepare_data(const RunConfig& cfg, bool with_test);

CommandResult cmd_gen(const RunConfig& cfg, const Logger& log = {});
CommandResult cmd_pretrain(const RunConfig& cfg, const Logger& log = {});
CommandResult cmd_train(const RunConfig& cfg, const Logger& log = {});
CommandResult cmd_eval(const RunConfig& cfg, const Logger& log = {});
CommandResult cmd_ablate(const RunConfig& cfg, const Logger& log = {});

}  // namespace mtram::app

#endif  // MTRAM_APP_PIPELINE_HPP_
