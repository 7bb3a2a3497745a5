// Copyright 2026 The dsnmf Authors. All Rights Reserved.
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


#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dsnmf/doc_term_matrix.hpp"

namespace dsnmf {

struct RawDocument {
  std::string id;
  std::string text;
  std::optional<std::string> label;
};

/// Terms ordered by descending corpus frequency, ties broken lexicographically.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Takes (term, count) pairs in any order; sorts them into canonical order.
  explicit Vocabulary(std::vector<std::pair<std::string, std::uint64_t>> counts);

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::vector<std::string>& terms() const { return terms_; }
  std::uint64_t frequency(std::size_t ordinal) const { return freqs_[ordinal]; }
  std::optional<std::uint64_t> frequency(std::string_view term) const;
  std::optional<std::size_t> index(std::string_view term) const;
  std::uint64_t total() const;

 private:
  std::vector<std::string> terms_;
  std::vector<std::uint64_t> freqs_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct PruneReport {
  std::vector<std::pair<std::string, std::uint64_t>> common_removed;
  std::vector<std::pair<std::string, std::uint64_t>> rare_removed;
  /// Smallest count among removed common tokens; empty when none were removed.
  std::optional<std::uint64_t> common_threshold;
  /// Fraction of token mass kept by rare-token removal (1 when it did not run).
  double rare_mass_kept = 1.0;
};

struct TokenizerOptions {
  std::size_t min_length = 2;
};

/// Lowercased maximal runs of ASCII alphanumerics or '_' with at least
/// `min_length` characters. Everything else separates tokens.
std::vector<std::string> tokenize(std::string_view text, TokenizerOptions options = {});

Vocabulary build_vocabulary(std::span<const RawDocument> docs, TokenizerOptions options = {});

/// Splits the descending count profile at the change point of maximum
/// two-population normal likelihood and drops the high-count side.
std::pair<Vocabulary, PruneReport> remove_common_tokens(const Vocabulary& vocab);

/// Keeps the shortest high-count prefix holding at least `mass` of all tokens.
std::pair<Vocabulary, PruneReport> remove_rare_tokens(const Vocabulary& vocab, double mass = 0.99);

/// Index of the chosen change point (number of tokens removed) for a
/// descending count profile, or 0 when no split is admissible.
std::size_t common_token_split(std::span<const std::uint64_t> descending_counts);

struct CountMatrixResult {
  DocTermMatrix matrix;
  std::vector<std::string> doc_ids;
  std::vector<std::optional<std::string>> labels;
  std::vector<std::string> terms;
  std::vector<std::string> dropped_docs;
};

/// Builds counts for the terms in `vocab`. Documents without any vocabulary
/// term are dropped and listed in `dropped_docs`.
CountMatrixResult count_matrix(std::span<const RawDocument> docs, const Vocabulary& vocab,
                               TokenizerOptions options = {});

enum class CorpusFormat { Jsonl, Csv, Dir };

CorpusFormat parse_corpus_format(std::string_view name);
std::string_view to_string(CorpusFormat format);

std::vector<RawDocument> load_corpus(const std::filesystem::path& path, CorpusFormat format);

/// Full ingestion: vocabulary, common-token removal, rare-token removal, counts.
struct IngestOptions {
  TokenizerOptions tokenizer;
  double rare_mass = 0.99;
  bool prune = true;
};

struct IngestResult {
  CountMatrixResult counts;
  PruneReport prune;
};

IngestResult ingest(std::span<const RawDocument> docs, const IngestOptions& options = {});

}  // namespace dsnmf
