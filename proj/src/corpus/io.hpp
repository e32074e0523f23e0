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

#ifndef MTRAM_CORPUS_IO_HPP_
#define MTRAM_CORPUS_IO_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "corpus/text.hpp"
#include "numcore/matrix.hpp"

namespace mtram::corpus {

// One line of a corpus file.
struct DocumentRecord {
  std::string id;
  std::string text;
  std::vector<std::string> icd;
  std::optional<std::vector<std::string>> ccs;

  friend bool operator==(const DocumentRecord&, const DocumentRecord&) = default;
};

// Reads a JSON-lines corpus. Blank lines are skipped; a malformed record
// raises CorpusError naming its 1-based line number.
std::vector<DocumentRecord> load_jsonl(const std::filesystem::path& path);
std::vector<DocumentRecord> parse_jsonl(const std::string& content);
void write_jsonl(const std::filesystem::path& path, const std::vector<DocumentRecord>& docs);
std::string format_jsonl(const std::vector<DocumentRecord>& docs);

// {fine_code: coarse_code}
CodeMap load_code_map(const std::filesystem::path& path);
void write_code_map(const std::filesystem::path& path, const CodeMap& map);

// Fine-label vector for a record; unknown codes raise CorpusError. When the
// record carries coarse codes they must agree with the map.
LabelVector fine_labels_of(const DocumentRecord& rec, const CodeMap& map);

// Embedding text format: "<rows> <dim>" header, then one line per token.
struct EmbeddingFile {
  std::vector<std::string> tokens;
  num::Matrix vectors;
};
void write_embeddings(const std::filesystem::path& path, const std::vector<std::string>& tokens,
                      const num::Matrix& vectors);
EmbeddingFile load_embeddings(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
// Writes via a temporary sibling and rename; throws CorpusError on failure.
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace mtram::corpus

#endif  // MTRAM_CORPUS_IO_HPP_
