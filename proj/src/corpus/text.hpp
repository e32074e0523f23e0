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

#ifndef MTRAM_CORPUS_TEXT_HPP_
#define MTRAM_CORPUS_TEXT_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mtram::corpus {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using LabelVector = std::vector<std::uint8_t>;

inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;
inline constexpr std::size_t kDefaultMaxLen = 2500;
inline constexpr std::size_t kDefaultMinDocFreq = 3;

// Lowercases, splits on whitespace and ASCII punctuation, and drops every
// token that still contains a character outside a-z (digits, control or
// non-ASCII bytes).
std::vector<std::string> tokenize_and_clean(std::string_view text);

class Vocabulary {
 public:
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocabulary();
  // Rebuilds from an id-ordered token list whose first two entries are
  // the PAD and UNK tokens.
  static Vocabulary FromTokens(std::vector<std::string> tokens, std::size_t min_doc_freq);

  int id_of(std::string_view token) const;  // UNK when absent
  bool contains(std::string_view token) const;
  const std::string& token(int id) const;
  std::size_t size() const { return tokens_.size(); }
  std::size_t min_doc_freq() const { return min_doc_freq_; }
  const std::vector<std::string>& tokens() const { return tokens_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.min_doc_freq_ == b.min_doc_freq_;
  }

 private:
  friend Vocabulary build_vocab(std::span<const std::vector<std::string>> docs,
                                std::size_t min_doc_freq);
  void add(std::string token);

  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> tokens_;
  std::size_t min_doc_freq_ = 1;
};

// Keeps tokens seen in at least `min_doc_freq` distinct documents, ordered
// by document frequency (descending) then lexicographically.
Vocabulary build_vocab(std::span<const std::vector<std::string>> docs,
                       std::size_t min_doc_freq);

// Many-to-one map from fine codes onto coarse codes. Label indices follow
// the lexicographic order of the code strings.
class CodeMap {
 public:
  CodeMap() = default;
  // Throws CorpusError on an empty map or empty code strings.
  explicit CodeMap(const std::map<std::string, std::string>& fine_to_coarse);

  std::size_t m_fine() const { return fine_codes_.size(); }
  std::size_t m_coarse() const { return coarse_codes_.size(); }
  const std::vector<std::string>& fine_codes() const { return fine_codes_; }
  const std::vector<std::string>& coarse_codes() const { return coarse_codes_; }
  std::size_t coarse_of(std::size_t fine_index) const { return coarse_of_[fine_index]; }
  std::optional<std::size_t> fine_index(std::string_view code) const;
  std::optional<std::size_t> coarse_index(std::string_view code) const;
  bool has_many_to_one() const;

  // Logical OR of the fine labels mapping onto each coarse code.
  LabelVector map_fine_to_coarse(std::span<const std::uint8_t> fine) const;

  std::map<std::string, std::string> pairs() const;

  friend bool operator==(const CodeMap& a, const CodeMap& b) {
    return a.fine_codes_ == b.fine_codes_ && a.coarse_codes_ == b.coarse_codes_ &&
           a.coarse_of_ == b.coarse_of_;
  }

 private:
  std::vector<std::string> fine_codes_;
  std::vector<std::string> coarse_codes_;
  std::vector<std::size_t> coarse_of_;
};

struct EncodedDocument {
  std::string id;
  std::vector<int> token_ids;
  LabelVector fine_labels;
  LabelVector coarse_labels;
};

// Looks ids up with UNK fallback, keeps the first `max_len` tokens and
// derives the coarse labels through `code_map`.
EncodedDocument encode_document(std::string id, std::span<const std::string> tokens,
                                const Vocabulary& vocab, std::size_t max_len,
                                LabelVector fine_labels, const CodeMap& code_map);

std::vector<std::string> decode_tokens(std::span<const int> ids, const Vocabulary& vocab);

}  // namespace mtram::corpus

#endif  // MTRAM_CORPUS_TEXT_HPP_
