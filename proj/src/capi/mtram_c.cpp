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

#include "mtram/mtram.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <map>
#include <memory>
#include <string>

#include "app/config.hpp"
#include "app/pipeline.hpp"
#include "corpus/text.hpp"
#include "model/checkpoint.hpp"

struct mtram_config {
  mtram::app::RunConfig cfg;
};

struct mtram_model {
  mtram::model::ModelParams params;
  mtram::corpus::Vocabulary vocab;
  mtram::corpus::CodeMap code_map;
  std::size_t max_len = 0;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Runs `fn`, translating exceptions into status codes and the thread-local
// error message.
template <typename Fn>
mtram_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MTRAM_OK;
  } catch (const mtram::app::ValidationError& e) {
    g_last_error.clear();
    for (const auto& issue : e.issues()) g_last_error += (g_last_error.empty() ? "" : "\n") + issue;
    return MTRAM_ERR_VALIDATION;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MTRAM_ERR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return MTRAM_ERR_RUNTIME;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw mtram::app::ValidationError({std::string(what) + " must not be null"});
}

using Command = mtram::app::CommandResult (*)(const mtram::app::RunConfig&,
                                              const mtram::app::Logger&);

mtram_status run_command(Command cmd, const mtram_config* cfg, mtram_log_fn log, void* user,
                         char** out_result) {
  return guarded([&] {
    require(cfg != nullptr, "config");
    mtram::app::Logger logger;
    if (log != nullptr) logger = [log, user](const std::string& line) { log(line.c_str(), user); };
    const mtram::app::CommandResult r = cmd(cfg->cfg, logger);
    if (out_result != nullptr) {
      const nlohmann::json j = {{"summary", r.summary}, {"text", r.text}, {"warnings", r.warnings}};
      *out_result = dup_string(j.dump());
    }
  });
}

}  // namespace

extern "C" {

const char* mtram_version(void) { return "1.0.0"; }

const char* mtram_last_error(void) { return g_last_error.c_str(); }

void mtram_string_free(char* s) { std::free(s); }

mtram_status mtram_config_create(mtram_config** out) {
  return guarded([&] {
    require(out != nullptr, "out");
    *out = new mtram_config();
  });
}

void mtram_config_destroy(mtram_config* cfg) { delete cfg; }

mtram_status mtram_config_load(mtram_config* cfg, const char* path) {
  return guarded([&] {
    require(cfg != nullptr && path != nullptr, "config and path");
    cfg->cfg.merge_file(path);
  });
}

mtram_status mtram_config_set(mtram_config* cfg, const char* dotted_key, const char* value) {
  return guarded([&] {
    require(cfg != nullptr && dotted_key != nullptr && value != nullptr, "config, key and value");
    cfg->cfg.set(dotted_key, value);
  });
}

mtram_status mtram_config_set_seed(mtram_config* cfg, unsigned long long seed) {
  return guarded([&] {
    require(cfg != nullptr, "config");
    cfg->cfg.set_seed(seed);
  });
}

mtram_status mtram_config_to_json(const mtram_config* cfg, char** out_json) {
  return guarded([&] {
    require(cfg != nullptr && out_json != nullptr, "config and out_json");
    *out_json = dup_string(cfg->cfg.values().dump(2));
  });
}

mtram_status mtram_config_hash(const mtram_config* cfg, char** out_hash) {
  return guarded([&] {
    require(cfg != nullptr && out_hash != nullptr, "config and out_hash");
    *out_hash = dup_string(cfg->cfg.hash());
  });
}

mtram_status mtram_config_validate(const mtram_config* cfg) {
  return guarded([&] {
    require(cfg != nullptr, "config");
    cfg->cfg.validate();
  });
}

mtram_status mtram_cmd_gen(const mtram_config* cfg, mtram_log_fn log, void* user_data,
                           char** out_result) {
  return run_command(&mtram::app::cmd_gen, cfg, log, user_data, out_result);
}

mtram_status mtram_cmd_pretrain(const mtram_config* cfg, mtram_log_fn log, void* user_data,
                                char** out_result) {
  return run_command(&mtram::app::cmd_pretrain, cfg, log, user_data, out_result);
}

mtram_status mtram_cmd_train(const mtram_config* cfg, mtram_log_fn log, void* user_data,
                             char** out_result) {
  return run_command(&mtram::app::cmd_train, cfg, log, user_data, out_result);
}

mtram_status mtram_cmd_eval(const mtram_config* cfg, mtram_log_fn log, void* user_data,
                            char** out_result) {
  return run_command(&mtram::app::cmd_eval, cfg, log, user_data, out_result);
}

mtram_status mtram_cmd_ablate(const mtram_config* cfg, mtram_log_fn log, void* user_data,
                              char** out_result) {
  return run_command(&mtram::app::cmd_ablate, cfg, log, user_data, out_result);
}

mtram_status mtram_model_load(const char* checkpoint_path, mtram_model** out) {
  return guarded([&] {
    require(checkpoint_path != nullptr && out != nullptr, "checkpoint_path and out");
    mtram::model::Checkpoint ck = mtram::model::load_checkpoint(checkpoint_path);
    for (const char* key : {"vocab", "min_doc_freq", "max_len", "code_map"}) {
      if (!ck.meta.contains(key)) {
        throw std::runtime_error("checkpoint: metadata lacks '" + std::string(key) + "'");
      }
    }
    auto m = std::make_unique<mtram_model>();
    m->vocab = mtram::corpus::Vocabulary::FromTokens(
        ck.meta["vocab"].get<std::vector<std::string>>(),
        ck.meta["min_doc_freq"].get<std::size_t>());
    m->code_map = mtram::corpus::CodeMap(
        ck.meta["code_map"].get<std::map<std::string, std::string>>());
    m->max_len = ck.meta["max_len"].get<std::size_t>();
    m->params = std::move(ck.params);
    *out = m.release();
  });
}

void mtram_model_destroy(mtram_model* model) { delete model; }

mtram_status mtram_model_label_counts(const mtram_model* model, size_t* m_fine,
                                      size_t* m_coarse) {
  return guarded([&] {
    require(model != nullptr, "model");
    if (m_fine != nullptr) *m_fine = model->params.config.m_fine;
    if (m_coarse != nullptr) *m_coarse = model->params.config.m_coarse;
  });
}

mtram_status mtram_model_predict(mtram_model* model, const char* text, double* fine_probs,
                                 double* coarse_probs) {
  return guarded([&] {
    require(model != nullptr && text != nullptr, "model and text");
    const auto toks = mtram::corpus::tokenize_and_clean(text);
    if (toks.empty()) throw mtram::app::ValidationError({"text: no tokens after cleaning"});
    const auto doc = mtram::corpus::encode_document(
        "input", toks, model->vocab, model->max_len,
        mtram::corpus::LabelVector(model->code_map.m_fine(), 0), model->code_map);
    const mtram::model::Prediction p = mtram::model::predict(doc, model->params);
    if (fine_probs != nullptr) std::copy(p.fine.begin(), p.fine.end(), fine_probs);
    if (coarse_probs != nullptr) std::copy(p.coarse.begin(), p.coarse.end(), coarse_probs);
  });
}

mtram_status mtram_model_label_name(const mtram_model* model, int task, size_t index,
                                    char** out_name) {
  return guarded([&] {
    require(model != nullptr && out_name != nullptr, "model and out_name");
    const auto& codes =
        task == 0 ? model->code_map.fine_codes() : model->code_map.coarse_codes();
    if ((task != 0 && task != 1) || index >= codes.size()) {
      throw mtram::app::ValidationError({"label index out of range"});
    }
    *out_name = dup_string(codes[index]);
  });
}

}  // extern "C"
