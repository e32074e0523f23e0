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

#include "corpus/text.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace mtram::corpus {
namespace {

bool is_separator(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' ||
         (c < 0x80 && std::ispunct(c));
}

}  // namespace

std::vector<std::string> tokenize_and_clean(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  bool alphabetic = true;
  auto flush = [&] {
    if (!cur.empty() && alphabetic) out.push_back(cur);
    cur.clear();
    alphabetic = true;
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_separator(c)) {
      flush();
      continue;
    }
    if (c >= 'A' && c <= 'Z') {
      cur.push_back(static_cast<char>(c - 'A' + 'a'));
    } else {
      if (c < 'a' || c > 'z') alphabetic = false;
      cur.push_back(static_cast<char>(c));
    }
  }
  flush();
  return out;
}

Vocabulary::Vocabulary() {
  add(std::string(kPadToken));
  add(std::string(kUnkToken));
}

void Vocabulary::add(std::string token) {
  const int id = static_cast<int>(tokens_.size());
  ids_.emplace(token, id);
  tokens_.push_back(std::move(token));
}

Vocabulary Vocabulary::FromTokens(std::vector<std::string> tokens, std::size_t min_doc_freq) {
  if (tokens.size() < 2 || tokens[0] != kPadToken || tokens[1] != kUnkToken) {
    throw CorpusError("Vocabulary: token list must start with <pad>, <unk>");
  }
  Vocabulary v;
  v.min_doc_freq_ = min_doc_freq;
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    if (v.ids_.count(tokens[i]) != 0) {
      throw CorpusError("Vocabulary: duplicate token '" + tokens[i] + "'");
    }
    v.add(std::move(tokens[i]));
  }
  return v;
}

int Vocabulary::id_of(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnkId : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return ids_.count(std::string(token)) != 0;
}

const std::string& Vocabulary::token(int id) const {
  return tokens_.at(static_cast<std::size_t>(id));
}

Vocabulary build_vocab(std::span<const std::vector<std::string>> docs,
                       std::size_t min_doc_freq) {
  if (min_doc_freq < 1) throw CorpusError("build_vocab: min_doc_freq must be >= 1");
  if (docs.empty()) throw CorpusError("build_vocab: empty corpus");
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    std::set<std::string_view> seen(doc.begin(), doc.end());
    for (std::string_view t : seen) ++df[std::string(t)];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [tok, count] : df) {
    if (count >= min_doc_freq && tok != Vocabulary::kPadToken &&
        tok != Vocabulary::kUnkToken) {
      kept.emplace_back(tok, count);
    }
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary v;
  v.min_doc_freq_ = min_doc_freq;
  for (auto& [tok, count] : kept) v.add(tok);
  return v;
}

CodeMap::CodeMap(const std::map<std::string, std::string>& fine_to_coarse) {
  if (fine_to_coarse.empty()) throw CorpusError("CodeMap: empty map");
  std::set<std::string> coarse;
  for (const auto& [fine, c] : fine_to_coarse) {
    if (fine.empty() || c.empty()) throw CorpusError("CodeMap: empty code string");
    fine_codes_.push_back(fine);
    coarse.insert(c);
  }
  coarse_codes_.assign(coarse.begin(), coarse.end());
  for (const auto& [fine, c] : fine_to_coarse) {
    coarse_of_.push_back(*coarse_index(c));
  }
}

std::optional<std::size_t> CodeMap::fine_index(std::string_view code) const {
  auto it = std::lower_bound(fine_codes_.begin(), fine_codes_.end(), code);
  if (it == fine_codes_.end() || *it != code) return std::nullopt;
  return static_cast<std::size_t>(it - fine_codes_.begin());
}

std::optional<std::size_t> CodeMap::coarse_index(std::string_view code) const {
  auto it = std::lower_bound(coarse_codes_.begin(), coarse_codes_.end(), code);
  if (it == coarse_codes_.end() || *it != code) return std::nullopt;
  return static_cast<std::size_t>(it - coarse_codes_.begin());
}

bool CodeMap::has_many_to_one() const { return m_coarse() < m_fine(); }

LabelVector CodeMap::map_fine_to_coarse(std::span<const std::uint8_t> fine) const {
  if (fine.size() != m_fine()) {
    throw CorpusError("CodeMap: fine label vector has length " + std::to_string(fine.size()) +
                      ", expected " + std::to_string(m_fine()));
  }
  LabelVector coarse(m_coarse(), 0);
  for (std::size_t i = 0; i < fine.size(); ++i) {
    if (fine[i] != 0) coarse[coarse_of_[i]] = 1;
  }
  return coarse;
}

std::map<std::string, std::string> CodeMap::pairs() const {
  std::map<std::string, std::string> out;
  for (std::size_t i = 0; i < fine_codes_.size(); ++i) {
    out.emplace(fine_codes_[i], coarse_codes_[coarse_of_[i]]);
  }
  return out;
}

EncodedDocument encode_document(std::string id, std::span<const std::string> tokens,
                                const Vocabulary& vocab, std::size_t max_len,
                                LabelVector fine_labels, const CodeMap& code_map) {
  if (fine_labels.size() != code_map.m_fine()) {
    throw CorpusError("encode_document(" + id + "): " + std::to_string(fine_labels.size()) +
                      " fine labels, code map has " + std::to_string(code_map.m_fine()));
  }
  EncodedDocument doc;
  doc.id = std::move(id);
  const std::size_t n = std::min(tokens.size(), max_len);
  doc.token_ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) doc.token_ids.push_back(vocab.id_of(tokens[i]));
  doc.coarse_labels = code_map.map_fine_to_coarse(fine_labels);
  doc.fine_labels = std::move(fine_labels);
  return doc;
}

std::vector<std::string> decode_tokens(std::span<const int> ids, const Vocabulary& vocab) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(vocab.token(id));
  return out;
}

}  // namespace mtram::corpus
