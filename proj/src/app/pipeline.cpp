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

#include "app/pipeline.hpp"

#include <cstdio>
#include <map>
#include <sstream>

#include "corpus/io.hpp"
#include "corpus/skipgram.hpp"
#include "corpus/synthetic.hpp"
#include "metrics/metrics.hpp"
#include "model/checkpoint.hpp"
#include "numcore/hash.hpp"
#include "train/ablation.hpp"

namespace mtram::app {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kSplitStream = 0x73706c6974ULL;

const char* const kSplitNames[] = {"train", "dev", "test"};

fs::path split_file(const RunConfig& cfg, const std::string& split) {
  return cfg.data_dir() / (split + ".jsonl");
}

fs::path code_map_file(const RunConfig& cfg) { return cfg.data_dir() / "code_map.json"; }

// Appends an issue for every required input that is missing.
void require_files(const RunConfig& cfg, const std::vector<std::string>& splits,
                   std::vector<std::string>& issues) {
  const std::string hint = cfg.path("data_dir").empty() ? " (run gen with this corpus config "
                                                          "and seed, or set paths.data_dir)"
                                                        : "";
  std::vector<fs::path> files;
  for (const auto& s : splits) files.push_back(split_file(cfg, s));
  files.push_back(code_map_file(cfg));
  for (const auto& f : files) {
    if (!fs::exists(f)) issues.push_back("paths.data_dir: missing " + f.string() + hint);
  }
}

void require_optional_path(const RunConfig& cfg, const std::string& key,
                           std::vector<std::string>& issues) {
  const std::string p = cfg.path(key);
  if (!p.empty() && !fs::exists(p)) issues.push_back("paths." + key + ": missing " + p);
}

void throw_if_any(std::vector<std::string> issues) {
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

json base_summary(const RunConfig& cfg, const std::string& command) {
  return {{"command", command}, {"config_hash", cfg.hash()}, {"seed", cfg.seed()},
          {"artifacts", json::object()}};
}

json stamp(const RunConfig& cfg) { return {{"config_hash", cfg.hash()}, {"seed", cfg.seed()}}; }

void write_json(const fs::path& path, const json& j) {
  corpus::write_file(path, j.dump(2) + "\n");
}

std::string jsonl(const std::vector<json>& lines) {
  std::string out;
  for (const auto& l : lines) out += l.dump() + "\n";
  return out;
}

fs::path make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

train::Split encode_all(const std::vector<corpus::DocumentRecord>& docs,
                        const corpus::Vocabulary& vocab, const corpus::CodeMap& map,
                        std::size_t max_len) {
  train::Split out;
  out.reserve(docs.size());
  for (const auto& d : docs) {
    const auto toks = corpus::tokenize_and_clean(d.text);
    out.push_back(corpus::encode_document(d.id, toks, vocab, max_len,
                                          corpus::fine_labels_of(d, map), map));
  }
  return out;
}

model::ModelConfig data_model_config(const RunConfig& cfg, const PreparedData& data) {
  model::ModelConfig mc = cfg.model_config();
  mc.vocab_size = data.vocab.size();
  mc.m_fine = data.code_map.m_fine();
  mc.m_coarse = data.code_map.m_coarse();
  return mc;
}

// Rows of the pretrained table matched to the vocabulary by token; tokens
// the file lacks keep their seeded initial values.
std::optional<num::Matrix> load_initial_embeddings(const RunConfig& cfg,
                                                   const model::ModelConfig& mc,
                                                   const corpus::Vocabulary& vocab) {
  const std::string path = cfg.path("embeddings");
  if (path.empty()) return std::nullopt;
  const corpus::EmbeddingFile f = corpus::load_embeddings(path);
  if (f.vectors.cols() != mc.embed_dim) {
    throw ValidationError({"paths.embeddings: dimension " + std::to_string(f.vectors.cols()) +
                           " does not match model.embed_dim " + std::to_string(mc.embed_dim)});
  }
  num::Matrix table = model::init_params(mc, cfg.seed()).embeddings.value;
  for (std::size_t r = 0; r < f.tokens.size(); ++r) {
    if (!vocab.contains(f.tokens[r])) continue;
    const auto id = static_cast<std::size_t>(vocab.id_of(f.tokens[r]));
    for (std::size_t c = 0; c < table.cols(); ++c) table(id, c) = f.vectors(r, c);
  }
  return table;
}

std::string epoch_line(const train::EpochRecord& e, std::size_t epochs) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "epoch %zu/%zu  loss %.4f (fine %.4f, coarse %.4f)  dev fine micro-F1 %.1f",
                e.epoch, epochs, e.loss_joint, e.loss_fine, e.loss_coarse,
                100.0 * e.dev_fine.micro_f1);
  return buf;
}

json task_reports(const train::SplitReport& r, bool fine, bool coarse) {
  json j = json::object();
  if (fine) j["fine"] = metrics::report_to_json(r.fine);
  if (coarse) j["coarse"] = metrics::report_to_json(r.coarse);
  return j;
}

}  // namespace

std::string split_of(const std::string& doc_id, std::uint64_t seed, double train_frac,
                     double dev_frac) {
  const std::uint64_t h =
      num::splitmix64(num::fnv1a64(doc_id) ^ num::derive_seed(seed, kSplitStream));
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  if (u < train_frac) return "train";
  if (u < train_frac + dev_frac) return "dev";
  return "test";
}

fs::path run_dir(const RunConfig& cfg, const std::string& kind) {
  return cfg.out_root() / (kind + "-" + cfg.hash() + "-s" + std::to_string(cfg.seed()));
}

PreparedData prepare_data(const RunConfig& cfg, bool with_test) {
  PreparedData d;
  d.code_map = corpus::load_code_map(code_map_file(cfg));
  const auto train_docs = corpus::load_jsonl(split_file(cfg, "train"));
  std::vector<std::vector<std::string>> toks;
  toks.reserve(train_docs.size());
  for (const auto& doc : train_docs) toks.push_back(corpus::tokenize_and_clean(doc.text));
  d.vocab = corpus::build_vocab(toks, cfg.min_doc_freq());
  d.train = encode_all(train_docs, d.vocab, d.code_map, cfg.max_len());
  d.dev = encode_all(corpus::load_jsonl(split_file(cfg, "dev")), d.vocab, d.code_map,
                     cfg.max_len());
  if (with_test) {
    d.test = encode_all(corpus::load_jsonl(split_file(cfg, "test")), d.vocab, d.code_map,
                        cfg.max_len());
  }
  return d;
}

CommandResult cmd_gen(const RunConfig& cfg, const Logger&) {
  cfg.validate();
  const corpus::SyntheticCorpus c = corpus::gen_synthetic_corpus(cfg.synthetic_spec(), cfg.seed());
  std::map<std::string, std::vector<corpus::DocumentRecord>> parts;
  for (const char* s : kSplitNames) parts[s];
  for (const auto& d : c.docs) {
    parts[split_of(d.id, cfg.seed(), cfg.split_train(), cfg.split_dev())].push_back(d);
  }
  const fs::path dir = make_dir(cfg.data_dir());
  CommandResult r{base_summary(cfg, "gen"), "", {}};
  r.summary["corpus_hash"] = corpus_hash(cfg);
  json counts = json::object();
  for (const char* s : kSplitNames) {
    const fs::path p = dir / (std::string(s) + ".jsonl");
    corpus::write_jsonl(p, parts[s]);
    r.summary["artifacts"][s] = p.string();
    counts[s] = parts[s].size();
  }
  corpus::write_code_map(code_map_file(cfg), c.code_map);
  r.summary["artifacts"]["code_map"] = code_map_file(cfg).string();
  r.summary["counts"] = counts;
  json meta = {{"corpus_hash", corpus_hash(cfg)}, {"config_hash", cfg.hash()},
               {"seed", cfg.seed()},              {"counts", counts},
               {"corpus", cfg.values()["corpus"]},  {"split", cfg.values()["split"]}};
  write_json(dir / "meta.json", meta);
  r.summary["artifacts"]["meta"] = (dir / "meta.json").string();
  r.text = "wrote " + std::to_string(parts["train"].size()) + "/" +
           std::to_string(parts["dev"].size()) + "/" + std::to_string(parts["test"].size()) +
           " train/dev/test documents to " + dir.string() + "\n";
  return r;
}

CommandResult cmd_pretrain(const RunConfig& cfg, const Logger& log) {
  std::vector<std::string> issues = cfg.issues();
  require_files(cfg, {"train", "dev"}, issues);
  throw_if_any(std::move(issues));
  const PreparedData data = prepare_data(cfg, false);
  std::vector<std::vector<int>> ids;
  ids.reserve(data.train.size());
  for (const auto& d : data.train) ids.push_back(d.token_ids);
  if (log) log("skip-gram over " + std::to_string(ids.size()) + " documents");
  const corpus::EmbeddingTable table =
      corpus::pretrain_skipgram(ids, data.vocab.size(), cfg.skipgram_options());
  const fs::path dir = make_dir(run_dir(cfg, "pretrain"));
  corpus::write_embeddings(dir / "embeddings.txt", data.vocab.tokens(), table.vectors);
  write_json(dir / "meta.json", stamp(cfg));
  CommandResult r{base_summary(cfg, "pretrain"), "", {}};
  r.summary["artifacts"]["embeddings"] = (dir / "embeddings.txt").string();
  r.summary["artifacts"]["meta"] = (dir / "meta.json").string();
  r.text = "wrote " + std::to_string(data.vocab.size()) + " x " + std::to_string(table.dim()) +
           " embeddings to " + (dir / "embeddings.txt").string() + "\n";
  return r;
}

CommandResult cmd_train(const RunConfig& cfg, const Logger& log) {
  std::vector<std::string> issues = cfg.issues();
  require_files(cfg, {"train", "dev"}, issues);
  require_optional_path(cfg, "embeddings", issues);
  throw_if_any(std::move(issues));

  const PreparedData data = prepare_data(cfg, false);
  const model::ModelConfig mc = data_model_config(cfg, data);
  const train::TrainConfig tc = cfg.train_config();
  const model::ModelParams init =
      model::init_params(mc, cfg.seed(), load_initial_embeddings(cfg, mc, data.vocab));
  train::TrainResult tr = train::train(data.train, data.dev, init, tc,
                                       [&](const train::EpochRecord& e) {
                                         if (log) log(epoch_line(e, tc.epochs));
                                       });

  const fs::path dir = make_dir(run_dir(cfg, "train"));
  json meta = stamp(cfg);
  meta["mode"] = train::to_string(tc.mode);
  meta["best_epoch"] = tr.best_epoch;
  meta["vocab"] = data.vocab.tokens();
  meta["min_doc_freq"] = data.vocab.min_doc_freq();
  meta["max_len"] = cfg.max_len();
  meta["code_map"] = data.code_map.pairs();
  model::save_checkpoint(dir / "checkpoint.bin", tr.best, meta);

  std::vector<json> epochs, steps;
  for (const auto& e : tr.log) {
    json j = e.to_json();
    j.update(stamp(cfg));
    epochs.push_back(std::move(j));
  }
  for (const auto& s : tr.steps) {
    json j = {{"epoch", s.epoch},         {"batch", s.batch},
              {"loss_fine", s.loss_fine}, {"loss_coarse", s.loss_coarse},
              {"loss_joint", s.loss_joint}};
    j.update(stamp(cfg));
    steps.push_back(std::move(j));
  }
  corpus::write_file(dir / "log.jsonl", jsonl(epochs));
  corpus::write_file(dir / "steps.jsonl", jsonl(steps));

  const train::SplitReport dev = train::evaluate_split(data.dev, tr.best, tc.threshold, tc.top_k);
  json report = stamp(cfg);
  report["split"] = "dev";
  report["best_epoch"] = tr.best_epoch;
  report.update(task_reports(dev, true, true));
  write_json(dir / "dev_report.json", report);

  CommandResult r{base_summary(cfg, "train"), "", {}};
  r.summary["artifacts"] = {{"checkpoint", (dir / "checkpoint.bin").string()},
                            {"log", (dir / "log.jsonl").string()},
                            {"steps", (dir / "steps.jsonl").string()},
                            {"dev_report", (dir / "dev_report.json").string()}};
  r.summary["best_epoch"] = tr.best_epoch;
  r.summary["peak_tape_doubles"] = tr.peak_tape_doubles;
  r.text = "best epoch " + std::to_string(tr.best_epoch) + "\ndev fine    " +
           metrics::format_percent(dev.fine) + "\ndev coarse  " +
           metrics::format_percent(dev.coarse) + "\ncheckpoint  " +
           (dir / "checkpoint.bin").string() + "\n";
  return r;
}

CommandResult cmd_eval(const RunConfig& cfg, const Logger&) {
  std::vector<std::string> issues = cfg.issues();
  const std::string ckpt_path = cfg.path("checkpoint");
  if (ckpt_path.empty()) {
    issues.push_back("paths.checkpoint: required for eval");
  } else {
    require_optional_path(cfg, "checkpoint", issues);
  }
  require_files(cfg, {cfg.eval_split()}, issues);
  throw_if_any(std::move(issues));

  model::Checkpoint ckpt = model::load_checkpoint(ckpt_path);
  const json& meta = ckpt.meta;
  for (const char* key : {"vocab", "min_doc_freq", "max_len", "code_map", "mode"}) {
    if (!meta.contains(key)) {
      throw std::runtime_error("checkpoint: metadata lacks '" + std::string(key) + "'");
    }
  }
  const corpus::CodeMap ckpt_map(meta["code_map"].get<std::map<std::string, std::string>>());
  const corpus::CodeMap data_map = corpus::load_code_map(code_map_file(cfg));
  const model::ModelConfig& mc = ckpt.params.config;
  if (data_map.m_fine() != mc.m_fine || data_map.m_coarse() != mc.m_coarse) {
    throw ValidationError({"eval: checkpoint heads have " + std::to_string(mc.m_fine) + " fine / " +
                           std::to_string(mc.m_coarse) + " coarse labels but the data defines " +
                           std::to_string(data_map.m_fine()) + " / " +
                           std::to_string(data_map.m_coarse())});
  }
  if (!(data_map == ckpt_map)) {
    throw ValidationError({"eval: data code map differs from the checkpoint's label space"});
  }
  const corpus::Vocabulary vocab = corpus::Vocabulary::FromTokens(
      meta["vocab"].get<std::vector<std::string>>(), meta["min_doc_freq"].get<std::size_t>());
  const train::Split docs = encode_all(corpus::load_jsonl(split_file(cfg, cfg.eval_split())),
                                       vocab, ckpt_map, meta["max_len"].get<std::size_t>());
  const train::TrainConfig tc = cfg.train_config();
  const train::SplitReport rep = train::evaluate_split(docs, ckpt.params, tc.threshold, tc.top_k);

  const std::string task = cfg.eval_task();
  const bool fine = task != "coarse", coarse = task != "fine";
  const std::string mode = meta["mode"].get<std::string>();
  CommandResult r{base_summary(cfg, "eval"), "", {}};
  if (fine && mode == "coarse_only") {
    r.warnings.push_back("fine head was not trained (checkpoint mode coarse_only)");
  }
  if (coarse && mode == "fine_only") {
    r.warnings.push_back("coarse head was not trained (checkpoint mode fine_only)");
  }

  json report = stamp(cfg);
  report["checkpoint_config_hash"] = meta.value("config_hash", "");
  report["checkpoint_seed"] = meta.value("seed", std::uint64_t{0});
  report["split"] = cfg.eval_split();
  report["task"] = task;
  report["warnings"] = r.warnings;
  report.update(task_reports(rep, fine, coarse));
  const fs::path dir = make_dir(run_dir(cfg, "eval"));
  const fs::path out = dir / (cfg.eval_split() + "_" + task + "_report.json");
  write_json(out, report);
  r.summary["artifacts"]["report"] = out.string();
  r.summary["report"] = report;
  if (fine) r.text += cfg.eval_split() + " fine    " + metrics::format_percent(rep.fine) + "\n";
  if (coarse) r.text += cfg.eval_split() + " coarse  " + metrics::format_percent(rep.coarse) + "\n";
  return r;
}

CommandResult cmd_ablate(const RunConfig& cfg, const Logger& log) {
  std::vector<std::string> issues = cfg.issues();
  require_files(cfg, {"train", "dev", cfg.ablate_split()}, issues);
  require_optional_path(cfg, "embeddings", issues);
  throw_if_any(std::move(issues));

  const PreparedData data = prepare_data(cfg, cfg.ablate_split() == "test");
  train::AblationInputs in;
  in.train = &data.train;
  in.dev = &data.dev;
  const std::string split = cfg.ablate_split();
  in.eval = split == "train" ? &data.train : split == "dev" ? &data.dev : &data.test;
  in.model = data_model_config(cfg, data);
  in.train_cfg = cfg.train_config();
  in.embeddings = load_initial_embeddings(cfg, in.model, data.vocab);

  std::vector<json> runs;
  const train::AblationResult res = train::run_ablation(
      in, cfg.ablation_grid(), cfg.ablation_seeds(),
      [&](const train::AblationCell& cell, const train::SeedRun& run) {
        json j = stamp(cfg);
        j["cell"] = cell.name();
        j["run_seed"] = run.seed;
        j["best_epoch"] = run.best_epoch;
        j["train_loss_reduction"] = run.train_loss_reduction;
        j["split"] = split;
        j.update(task_reports(run.eval, true, true));
        runs.push_back(std::move(j));
        if (log) {
          log(cell.name() + " seed " + std::to_string(run.seed) + ": " + split + " fine " +
              metrics::format_percent(run.eval.fine));
        }
      });

  const fs::path dir = make_dir(run_dir(cfg, "ablate"));
  std::string seeds;
  for (auto s : cfg.ablation_seeds()) seeds += (seeds.empty() ? "" : ",") + std::to_string(s);
  const std::string header = "# config_hash " + cfg.hash() + " seeds " + seeds + "\n";
  corpus::write_file(dir / "ablation.csv", header + train::ablation_csv(res));
  const std::string summary = train::ablation_summary(res);
  corpus::write_file(dir / "summary.txt", header + summary);
  corpus::write_file(dir / "runs.jsonl", jsonl(runs));

  CommandResult r{base_summary(cfg, "ablate"), summary, {}};
  r.summary["artifacts"] = {{"csv", (dir / "ablation.csv").string()},
                            {"summary", (dir / "summary.txt").string()},
                            {"runs", (dir / "runs.jsonl").string()}};
  r.summary["runs"] = runs.size();
  return r;
}

}  // namespace mtram::app
