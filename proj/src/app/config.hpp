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

#ifndef MTRAM_APP_CONFIG_HPP_
#define MTRAM_APP_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "corpus/skipgram.hpp"
#include "corpus/synthetic.hpp"
#include "model/mtram.hpp"
#include "train/ablation.hpp"
#include "train/trainer.hpp"

#include <json.hpp>

namespace mtram::app {

// Bad configuration or arguments; the CLI maps it to exit status 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// Every run setting as one JSON document. Sections: corpus, split,
// preprocess, model, train, metrics, pretrain, eval, ablate, paths, plus
// the top-level seed. Keys absent from a loaded file keep their defaults;
// unknown keys are rejected.
class RunConfig {
 public:
  RunConfig();

  static nlohmann::json defaults();
  // Merges a JSON object over the current values.
  void merge(const nlohmann::json& patch);
  void merge_file(const std::filesystem::path& path);
  // Sets one field by dotted path ("train.epochs"). The text is parsed as
  // JSON when possible and as a plain string otherwise.
  void set(const std::string& dotted, const std::string& text);

  const nlohmann::json& values() const { return j_; }
  std::uint64_t seed() const { return j_.at("seed").get<std::uint64_t>(); }
  void set_seed(std::uint64_t seed) { j_["seed"] = seed; }

  // FNV-1a over the canonical dump without the seed and the output root,
  // as 16 hex digits. Runs differing only in seed share a hash.
  std::string hash() const;

  // Field-level checks on every section; all problems are collected.
  std::vector<std::string> issues() const;
  // Throws ValidationError when issues() is non-empty.
  void validate() const;

  corpus::SyntheticSpec synthetic_spec() const;
  corpus::SkipgramOptions skipgram_options() const;
  // Dimensions that come from data (vocabulary, label counts) stay zero.
  model::ModelConfig model_config() const;
  train::TrainConfig train_config() const;
  std::vector<train::AblationCell> ablation_grid() const;
  std::vector<std::uint64_t> ablation_seeds() const;

  double split_train() const;
  double split_dev() const;
  std::size_t min_doc_freq() const;
  std::size_t max_len() const;

  std::filesystem::path out_root() const;
  // Explicit paths.data_dir, else the generated-corpus directory for this
  // corpus section and seed under the output root.
  std::filesystem::path data_dir() const;
  std::string path(const std::string& key) const;  // "" when unset
  std::string eval_split() const;
  std::string eval_task() const;
  std::string ablate_split() const;

 private:
  nlohmann::json j_;
};

// Hash of the corpus and split sections, keyed to the data a seed produces.
std::string corpus_hash(const RunConfig& cfg);

}  // namespace mtram::app

#endif  // MTRAM_APP_CONFIG_HPP_
