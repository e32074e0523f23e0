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

#include "model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <map>

#include "corpus/io.hpp"

namespace mtram::model {
namespace {

constexpr char kMagic[8] = {'M', 'T', 'R', 'A', 'M', 'C', 'K', 'P'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw ModelError("checkpoint: truncated file");
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

nlohmann::json config_to_json(const ModelConfig& c) {
  return {{"vocab_size", c.vocab_size}, {"embed_dim", c.embed_dim},
          {"hidden_dim", c.hidden_dim}, {"taps", c.taps},
          {"m_fine", c.m_fine},         {"m_coarse", c.m_coarse},
          {"ram", to_string(c.ram)},    {"dropout", c.dropout}};
}

ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  c.embed_dim = j.at("embed_dim").get<std::size_t>();
  c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  c.taps = j.at("taps").get<std::size_t>();
  c.m_fine = j.at("m_fine").get<std::size_t>();
  c.m_coarse = j.at("m_coarse").get<std::size_t>();
  c.ram = ram_mode_from_string(j.at("ram").get<std::string>());
  c.dropout = j.at("dropout").get<double>();
  return c;
}

std::string serialize_checkpoint(const ModelParams& params, nlohmann::json meta) {
  meta["model"] = config_to_json(params.config);
  const std::string meta_str = meta.dump();
  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, meta_str.size());
  out += meta_str;
  const auto arrays = params.parameters();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(arrays.size()));
  for (const Parameter* p : arrays) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p->name.size()));
    out += p->name;
    put<std::uint64_t>(out, p->value.rows());
    put<std::uint64_t>(out, p->value.cols());
    for (double v : p->value.data()) put<double>(out, v);
  }
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  if (r.str(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw ModelError("checkpoint: bad magic");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw ModelError("checkpoint: unsupported version " + std::to_string(version));
  }
  Checkpoint ck;
  const auto meta_len = r.get<std::uint64_t>();
  try {
    ck.meta = nlohmann::json::parse(r.str(meta_len));
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("checkpoint: bad metadata: ") + e.what());
  }
  ModelConfig cfg;
  try {
    cfg = config_from_json(ck.meta.at("model"));
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("checkpoint: bad model config: ") + e.what());
  }
  ck.params = init_params(cfg, 0);
  std::map<std::string, Parameter*> by_name;
  for (Parameter* p : ck.params.parameters()) by_name.emplace(p->name, p);

  const auto count = r.get<std::uint32_t>();
  if (count != by_name.size()) {
    throw ModelError("checkpoint: holds " + std::to_string(count) + " arrays, model needs " +
                     std::to_string(by_name.size()));
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = r.str(r.get<std::uint32_t>());
    const auto rows = r.get<std::uint64_t>();
    const auto cols = r.get<std::uint64_t>();
    auto it = by_name.find(name);
    if (it == by_name.end()) throw ModelError("checkpoint: unexpected array " + name);
    Parameter& p = *it->second;
    if (rows != p.value.rows() || cols != p.value.cols()) {
      throw ModelError("checkpoint: array " + name + " is " + std::to_string(rows) + "x" +
                       std::to_string(cols) + ", model expects " + p.value.shape_str());
    }
    for (double& v : p.value.data()) v = r.get<double>();
    p.zero_grad();
    by_name.erase(it);
  }
  if (!r.done()) throw ModelError("checkpoint: trailing bytes");
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     const nlohmann::json& meta) {
  corpus::write_file(path, serialize_checkpoint(params, meta));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::string bytes;
  try {
    bytes = corpus::read_file(path);
  } catch (const corpus::CorpusError& e) {
    throw ModelError(std::string("checkpoint: ") + e.what());
  }
  return deserialize_checkpoint(bytes);
}

}  // namespace mtram::model
