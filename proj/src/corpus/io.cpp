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

#include "corpus/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mtram::corpus {
namespace {

using nlohmann::json;

std::vector<std::string> string_array(const json& j, const char* field, std::size_t line) {
  if (!j.is_array()) {
    throw CorpusError("line " + std::to_string(line) + ": field \"" + field +
                      "\" must be an array of strings");
  }
  std::vector<std::string> out;
  for (const json& e : j) {
    if (!e.is_string()) {
      throw CorpusError("line " + std::to_string(line) + ": field \"" + field +
                        "\" must contain only strings");
    }
    out.push_back(e.get<std::string>());
  }
  return out;
}

const json& required(const json& obj, const char* field, std::size_t line) {
  auto it = obj.find(field);
  if (it == obj.end()) {
    throw CorpusError("line " + std::to_string(line) + ": missing field \"" + field + "\"");
  }
  return *it;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CorpusError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CorpusError("short write to " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CorpusError("cannot rename onto " + path.string() + ": " + ec.message());
}

std::vector<DocumentRecord> parse_jsonl(const std::string& content) {
  std::vector<DocumentRecord> docs;
  std::istringstream in(content);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw CorpusError("line " + std::to_string(lineno) + ": malformed JSON (" + e.what() +
                        ")");
    }
    if (!j.is_object()) {
      throw CorpusError("line " + std::to_string(lineno) + ": record must be an object");
    }
    DocumentRecord rec;
    const json& id = required(j, "id", lineno);
    const json& text = required(j, "text", lineno);
    if (!id.is_string() || !text.is_string()) {
      throw CorpusError("line " + std::to_string(lineno) +
                        ": \"id\" and \"text\" must be strings");
    }
    rec.id = id.get<std::string>();
    rec.text = text.get<std::string>();
    rec.icd = string_array(required(j, "icd", lineno), "icd", lineno);
    if (auto it = j.find("ccs"); it != j.end()) rec.ccs = string_array(*it, "ccs", lineno);
    docs.push_back(std::move(rec));
  }
  return docs;
}

std::vector<DocumentRecord> load_jsonl(const std::filesystem::path& path) {
  try {
    return parse_jsonl(read_file(path));
  } catch (const CorpusError& e) {
    throw CorpusError(path.string() + ": " + e.what());
  }
}

std::string format_jsonl(const std::vector<DocumentRecord>& docs) {
  std::string out;
  for (const DocumentRecord& d : docs) {
    json j = {{"id", d.id}, {"text", d.text}, {"icd", d.icd}};
    if (d.ccs) j["ccs"] = *d.ccs;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<DocumentRecord>& docs) {
  write_file(path, format_jsonl(docs));
}

CodeMap load_code_map(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw CorpusError(path.string() + ": malformed code map (" + e.what() + ")");
  }
  if (!j.is_object()) throw CorpusError(path.string() + ": code map must be a JSON object");
  std::map<std::string, std::string> pairs;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_string()) {
      throw CorpusError(path.string() + ": code " + it.key() + " must map to a string");
    }
    pairs.emplace(it.key(), it.value().get<std::string>());
  }
  return CodeMap(pairs);
}

void write_code_map(const std::filesystem::path& path, const CodeMap& map) {
  json j = map.pairs();
  write_file(path, j.dump(2) + "\n");
}

LabelVector fine_labels_of(const DocumentRecord& rec, const CodeMap& map) {
  LabelVector fine(map.m_fine(), 0);
  for (const std::string& code : rec.icd) {
    auto idx = map.fine_index(code);
    if (!idx) throw CorpusError("document " + rec.id + ": code " + code + " not in code map");
    fine[*idx] = 1;
  }
  if (rec.ccs) {
    LabelVector given(map.m_coarse(), 0);
    for (const std::string& code : *rec.ccs) {
      auto idx = map.coarse_index(code);
      if (!idx) {
        throw CorpusError("document " + rec.id + ": coarse code " + code + " not in code map");
      }
      given[*idx] = 1;
    }
    if (given != map.map_fine_to_coarse(fine)) {
      throw CorpusError("document " + rec.id +
                        ": coarse codes disagree with the code-map image of its fine codes");
    }
  }
  return fine;
}

void write_embeddings(const std::filesystem::path& path, const std::vector<std::string>& tokens,
                      const num::Matrix& vectors) {
  if (tokens.size() != vectors.rows()) {
    throw CorpusError("write_embeddings: token count does not match matrix rows");
  }
  std::string out = std::to_string(vectors.rows()) + " " + std::to_string(vectors.cols()) + "\n";
  char buf[32];
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out += tokens[i];
    for (double v : vectors.row(i)) {
      std::snprintf(buf, sizeof(buf), " %.17g", v);
      out += buf;
    }
    out += '\n';
  }
  write_file(path, out);
}

EmbeddingFile load_embeddings(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::size_t rows = 0, dim = 0;
  std::string header;
  if (!std::getline(in, header) || !(std::istringstream(header) >> rows >> dim)) {
    throw CorpusError(path.string() + ": missing \"<rows> <dim>\" header");
  }
  EmbeddingFile f;
  f.vectors = num::Matrix(rows, dim);
  std::string line;
  for (std::size_t i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) {
      throw CorpusError(path.string() + ": expected " + std::to_string(rows) + " rows, got " +
                        std::to_string(i));
    }
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    for (std::size_t j = 0; j < dim; ++j) {
      if (!(ls >> f.vectors(i, j))) {
        throw CorpusError(path.string() + ": line " + std::to_string(i + 2) + " has fewer than " +
                          std::to_string(dim) + " values");
      }
    }
    f.tokens.push_back(std::move(tok));
  }
  return f;
}

}  // namespace mtram::corpus
