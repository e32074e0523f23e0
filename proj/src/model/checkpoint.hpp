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

// Binary checkpoint container (all integers little-endian):
//
//   magic     8 bytes  "MTRAMCKP"
//   version   u32      kCheckpointVersion
//   meta_len  u64      followed by meta_len bytes of UTF-8 JSON
//   count     u32      number of arrays
//   per array: name_len u32, name bytes, rows u64, cols u64,
//              rows*cols IEEE-754 binary64 values, row-major
//
// The JSON metadata always carries "model" (the ModelConfig) and whatever
// the caller adds (config hash, vocabulary, code map, trained tasks).

#ifndef MTRAM_MODEL_CHECKPOINT_HPP_
#define MTRAM_MODEL_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "model/mtram.hpp"

namespace mtram::model {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  ModelParams params;
  nlohmann::json meta;
};

nlohmann::json config_to_json(const ModelConfig& c);
ModelConfig config_from_json(const nlohmann::json& j);

std::string serialize_checkpoint(const ModelParams& params, nlohmann::json meta);
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     const nlohmann::json& meta);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mtram::model

#endif  // MTRAM_MODEL_CHECKPOINT_HPP_
