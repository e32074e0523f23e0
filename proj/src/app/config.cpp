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

#include "app/config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "corpus/io.hpp"
#include "numcore/hash.hpp"

namespace mtram::app {
namespace {

using nlohmann::json;

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : "; ") + x;
  return out;
}

const char* type_name(const json& v) {
  if (v.is_boolean()) return "boolean";
  if (v.is_number_unsigned() || v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  if (v.is_object()) return "object";
  return "null";
}

// Merges `patch` into `dst`, which holds the defaults' shape. Type rules:
// unsigned fields take non-negative integers, float fields any number,
// strings and arrays their own kind.
void merge_into(json& dst, const json& patch, const std::string& prefix,
                std::vector<std::string>& issues) {
  for (const auto& [key, value] : patch.items()) {
    const std::string where = prefix.empty() ? key : prefix + "." + key;
    if (!dst.contains(key)) {
      issues.push_back(where + ": unknown field");
      continue;
    }
    json& slot = dst[key];
    if (slot.is_object()) {
      if (!value.is_object()) {
        issues.push_back(where + ": expected object, got " + type_name(value));
      } else {
        merge_into(slot, value, where, issues);
      }
    } else if (slot.is_number_unsigned()) {
      if (value.is_number_unsigned()) {
        slot = value;
      } else if (value.is_number_integer() && value.get<std::int64_t>() >= 0) {
        slot = value.get<std::uint64_t>();
      } else if (value.is_number_integer()) {
        issues.push_back(where + ": must be non-negative, got " + value.dump());
      } else {
        issues.push_back(where + ": expected integer, got " + value.dump());
      }
    } else if (slot.is_number()) {
      if (value.is_number()) {
        slot = value.get<double>();
      } else {
        issues.push_back(where + ": expected number, got " + type_name(value));
      }
    } else if (std::string(type_name(slot)) != type_name(value)) {
      issues.push_back(where + ": expected " + type_name(slot) + ", got " + type_name(value));
    } else {
      slot = value;
    }
  }
}

template <typename Fn>
void collect(std::vector<std::string>& issues, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    issues.push_back(e.what());
  }
}

bool one_of(const std::string& s, std::initializer_list<const char*> options) {
  for (const char* o : options) {
    if (s == o) return true;
  }
  return false;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> issues)
    : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

RunConfig::RunConfig() : j_(defaults()) {}

json RunConfig::defaults() {
  const corpus::SyntheticSpec s;
  const model::ModelConfig m;
  const train::TrainConfig t;
  const corpus::SkipgramOptions p;
  return {
      {"seed", std::uint64_t{1}},
      {"corpus",
       {{"n_docs", s.n_docs},
        {"vocab_size", s.vocab_size},
        {"m_fine", s.m_fine},
        {"m_coarse", s.m_coarse},
        {"min_len", s.min_len},
        {"max_len", s.max_len},
        {"label_sparsity", s.label_sparsity},
        {"noise_rate", s.noise_rate},
        {"signal_tokens_per_code", s.signal_tokens_per_code},
        {"prior_decay", s.prior_decay}}},
      {"split", {{"train", 0.70}, {"dev", 0.15}}},
      {"preprocess",
       {{"min_doc_freq", corpus::kDefaultMinDocFreq}, {"max_len", corpus::kDefaultMaxLen}}},
      {"model",
       {{"embed_dim", m.embed_dim},
        {"hidden_dim", m.hidden_dim},
        {"taps", m.taps},
        {"ram", model::to_string(m.ram)},
        {"dropout", m.dropout}}},
      {"train",
       {{"lr", t.lr},
        {"batch_size", t.batch_size},
        {"epochs", t.epochs},
        {"lambda_fine", t.lambda_fine},
        {"lambda_coarse", t.lambda_coarse},
        {"mode", train::to_string(t.mode)},
        {"beta1", t.beta1},
        {"beta2", t.beta2},
        {"epsilon", t.epsilon}}},
      {"metrics", {{"threshold", t.threshold}, {"top_k", t.top_k}}},
      {"pretrain",
       {{"window", p.window},
        {"negatives", p.negatives},
        {"epochs", p.epochs},
        {"learning_rate", p.learning_rate}}},
      {"eval", {{"split", "test"}, {"task", "both"}}},
      {"ablate",
       {{"grid",
         json::array({"multitask/mult", "fine_only/mult", "fine_only/off", "multitask/add"})},
        {"seeds", std::vector<std::uint64_t>{1, 2, 3, 4, 5}},
        {"split", "test"}}},
      {"paths", {{"out", "runs"}, {"data_dir", ""}, {"embeddings", ""}, {"checkpoint", ""}}},
  };
}

void RunConfig::merge(const json& patch) {
  if (!patch.is_object()) throw ValidationError({"config: expected a JSON object"});
  std::vector<std::string> issues;
  json next = j_;
  merge_into(next, patch, "", issues);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  j_ = std::move(next);
}

void RunConfig::merge_file(const std::filesystem::path& path) {
  std::string text;
  try {
    text = corpus::read_file(path);
  } catch (const std::exception& e) {
    throw ValidationError({std::string("--config: ") + e.what()});
  }
  const json patch = json::parse(text, nullptr, false);
  if (patch.is_discarded()) throw ValidationError({"--config: " + path.string() + " is not JSON"});
  merge(patch);
}

void RunConfig::set(const std::string& dotted, const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(dotted);
  for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
  if (parts.empty() || dotted.back() == '.') {
    throw ValidationError({"override '" + dotted + "': empty field name"});
  }
  const json* slot = &j_;
  for (const auto& p : parts) {
    if (!slot->is_object() || !slot->contains(p)) {
      throw ValidationError({dotted + ": unknown field"});
    }
    slot = &(*slot)[p];
  }
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded() || slot->is_string()) value = text;
  json patch = std::move(value);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = json{{*it, std::move(patch)}};
  merge(patch);
}

std::string RunConfig::hash() const {
  json c = j_;
  c.erase("seed");
  c["paths"].erase("out");
  return num::hex64(num::fnv1a64(c.dump()));
}

std::string corpus_hash(const RunConfig& cfg) {
  const json c = {{"corpus", cfg.values().at("corpus")}, {"split", cfg.values().at("split")}};
  return num::hex64(num::fnv1a64(c.dump()));
}

std::vector<std::string> RunConfig::issues() const {
  std::vector<std::string> out;
  collect(out, [&] { synthetic_spec().validate(); });
  const double tr = split_train(), dv = split_dev();
  if (!(tr > 0.0 && dv > 0.0 && tr + dv <= 1.0)) {
    out.push_back("split: train and dev fractions must be positive with train + dev <= 1");
  }
  if (min_doc_freq() == 0) out.push_back("preprocess.min_doc_freq: must be positive");
  if (max_len() == 0) out.push_back("preprocess.max_len: must be positive");
  collect(out, [&] {
    model::ModelConfig m = model_config();
    m.vocab_size = 2;
    m.m_fine = 1;
    m.m_coarse = 1;
    m.validate();
  });
  collect(out, [&] { train_config().validate(); });
  const double th = j_["metrics"]["threshold"].get<double>();
  if (!(th >= 0.0 && th <= 1.0)) out.push_back("metrics.threshold: must be in [0,1]");
  const json& p = j_["pretrain"];
  if (p["window"].get<std::size_t>() == 0) out.push_back("pretrain.window: must be positive");
  if (p["negatives"].get<std::size_t>() == 0) out.push_back("pretrain.negatives: must be positive");
  if (!(p["learning_rate"].get<double>() > 0.0)) {
    out.push_back("pretrain.learning_rate: must be positive");
  }
  if (!one_of(eval_split(), {"train", "dev", "test"})) {
    out.push_back("eval.split: expected train, dev or test, got '" + eval_split() + "'");
  }
  if (!one_of(eval_task(), {"fine", "coarse", "both"})) {
    out.push_back("eval.task: expected fine, coarse or both, got '" + eval_task() + "'");
  }
  if (!one_of(ablate_split(), {"train", "dev", "test"})) {
    out.push_back("ablate.split: expected train, dev or test, got '" + ablate_split() + "'");
  }
  collect(out, [&] {
    const auto grid = ablation_grid();
    if (grid.empty()) throw std::runtime_error("ablate.grid: must not be empty");
    std::set<std::string> names;
    for (const auto& c : grid) {
      if (!names.insert(c.name()).second) {
        throw std::runtime_error("ablate.grid: duplicate cell " + c.name());
      }
    }
  });
  collect(out, [&] {
    if (ablation_seeds().empty()) throw std::runtime_error("ablate.seeds: must not be empty");
  });
  if (path("out").empty()) out.push_back("paths.out: must not be empty");
  return out;
}

void RunConfig::validate() const {
  auto found = issues();
  if (!found.empty()) throw ValidationError(std::move(found));
}

corpus::SyntheticSpec RunConfig::synthetic_spec() const {
  const json& c = j_.at("corpus");
  corpus::SyntheticSpec s;
  s.n_docs = c["n_docs"].get<std::size_t>();
  s.vocab_size = c["vocab_size"].get<std::size_t>();
  s.m_fine = c["m_fine"].get<std::size_t>();
  s.m_coarse = c["m_coarse"].get<std::size_t>();
  s.min_len = c["min_len"].get<std::size_t>();
  s.max_len = c["max_len"].get<std::size_t>();
  s.label_sparsity = c["label_sparsity"].get<double>();
  s.noise_rate = c["noise_rate"].get<double>();
  s.signal_tokens_per_code = c["signal_tokens_per_code"].get<std::size_t>();
  s.prior_decay = c["prior_decay"].get<double>();
  return s;
}

corpus::SkipgramOptions RunConfig::skipgram_options() const {
  const json& p = j_.at("pretrain");
  corpus::SkipgramOptions o;
  o.dim = j_["model"]["embed_dim"].get<std::size_t>();
  o.window = p["window"].get<std::size_t>();
  o.negatives = p["negatives"].get<std::size_t>();
  o.epochs = p["epochs"].get<std::size_t>();
  o.learning_rate = p["learning_rate"].get<double>();
  o.seed = seed();
  return o;
}

model::ModelConfig RunConfig::model_config() const {
  const json& m = j_.at("model");
  model::ModelConfig c;
  c.vocab_size = 0;
  c.m_fine = 0;
  c.m_coarse = 0;
  c.embed_dim = m["embed_dim"].get<std::size_t>();
  c.hidden_dim = m["hidden_dim"].get<std::size_t>();
  c.taps = m["taps"].get<std::size_t>();
  c.ram = model::ram_mode_from_string(m["ram"].get<std::string>());
  c.dropout = m["dropout"].get<double>();
  return c;
}

train::TrainConfig RunConfig::train_config() const {
  const json& t = j_.at("train");
  train::TrainConfig c;
  c.lr = t["lr"].get<double>();
  c.batch_size = t["batch_size"].get<std::size_t>();
  c.epochs = t["epochs"].get<std::size_t>();
  c.lambda_fine = t["lambda_fine"].get<double>();
  c.lambda_coarse = t["lambda_coarse"].get<double>();
  c.mode = train::task_mode_from_string(t["mode"].get<std::string>());
  c.beta1 = t["beta1"].get<double>();
  c.beta2 = t["beta2"].get<double>();
  c.epsilon = t["epsilon"].get<double>();
  c.threshold = j_["metrics"]["threshold"].get<double>();
  c.top_k = j_["metrics"]["top_k"].get<std::size_t>();
  c.seed = seed();
  return c;
}

std::vector<train::AblationCell> RunConfig::ablation_grid() const {
  std::vector<train::AblationCell> out;
  for (const auto& name : j_.at("ablate").at("grid")) {
    if (!name.is_string()) throw std::runtime_error("ablate.grid: entries must be strings");
    out.push_back(train::parse_cell(name.get<std::string>()));
  }
  return out;
}

std::vector<std::uint64_t> RunConfig::ablation_seeds() const {
  std::vector<std::uint64_t> out;
  for (const auto& s : j_.at("ablate").at("seeds")) {
    // Literal integers built in code arrive signed.
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
      throw std::runtime_error("ablate.seeds: entries must be non-negative integers");
    }
    out.push_back(s.get<std::uint64_t>());
  }
  return out;
}

double RunConfig::split_train() const { return j_["split"]["train"].get<double>(); }
double RunConfig::split_dev() const { return j_["split"]["dev"].get<double>(); }
std::size_t RunConfig::min_doc_freq() const {
  return j_["preprocess"]["min_doc_freq"].get<std::size_t>();
}
std::size_t RunConfig::max_len() const { return j_["preprocess"]["max_len"].get<std::size_t>(); }

std::filesystem::path RunConfig::out_root() const { return path("out"); }

std::filesystem::path RunConfig::data_dir() const {
  const std::string explicit_dir = path("data_dir");
  if (!explicit_dir.empty()) return explicit_dir;
  return out_root() / ("data-" + corpus_hash(*this) + "-s" + std::to_string(seed()));
}

std::string RunConfig::path(const std::string& key) const {
  return j_.at("paths").at(key).get<std::string>();
}

std::string RunConfig::eval_split() const { return j_["eval"]["split"].get<std::string>(); }
std::string RunConfig::eval_task() const { return j_["eval"]["task"].get<std::string>(); }
std::string RunConfig::ablate_split() const { return j_["ablate"]["split"].get<std::string>(); }

}  // namespace mtram::app
