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


#include "dsnmf/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dsnmf/error.hpp"

namespace dsnmf {

namespace {

bool is_token_char(unsigned char c) { return (c < 0x80 && std::isalnum(c)) || c == '_'; }

constexpr double kVarianceFloor = 1e-9;

// Running mean and sum of squared deviations (Welford).
struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }

  // Normal log-likelihood at the MLE mean and the floored MLE variance.
  double log_likelihood() const {
    const double var = std::max(m2 / n, kVarianceFloor);
    return -0.5 * n * std::log(2.0 * std::numbers::pi * var) - m2 / (2.0 * var);
  }
};

std::vector<std::pair<std::string, std::uint64_t>> entries_of(const Vocabulary& v, std::size_t from,
                                                              std::size_t to) {
  std::vector<std::pair<std::string, std::uint64_t>> out;
  out.reserve(to - from);
  for (std::size_t i = from; i < to; ++i) out.emplace_back(v.terms()[i], v.frequency(i));
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_unique(const std::vector<RawDocument>& docs) {
  std::set<std::string_view> seen;
  for (const auto& d : docs) {
    if (!seen.insert(d.id).second) throw DataError("duplicate document id '" + d.id + "'");
  }
}

std::vector<RawDocument> load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<RawDocument> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(where + ": malformed JSON (" + e.what() + ")");
    }
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("text") || !obj["id"].is_string() ||
        !obj["text"].is_string()) {
      throw DataError(where + ": expected an object with string fields 'id' and 'text'");
    }
    RawDocument doc{obj["id"].get<std::string>(), obj["text"].get<std::string>(), std::nullopt};
    if (obj.contains("label") && !obj["label"].is_null()) {
      if (!obj["label"].is_string()) throw DataError(where + ": 'label' must be a string");
      doc.label = obj["label"].get<std::string>();
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

// RFC 4180 records; quoted fields may span lines. Returns the records with the
// line number each one started on.
std::vector<std::pair<std::size_t, std::vector<std::string>>> parse_csv(const std::string& data,
                                                                        const std::string& name) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> records;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto end_record = [&] {
    fields.push_back(std::move(field));
    field.clear();
    const bool blank = fields.size() == 1 && fields[0].empty() && !field_started;
    if (!blank) records.emplace_back(record_line, std::move(fields));
    fields.clear();
    field_started = false;
  };

  for (std::size_t i = 0; i < data.size(); ++i) {
    const char c = data[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) {
          throw DataError(name + ":" + std::to_string(line) + ": quote inside unquoted field");
        }
        quoted = true;
        field_started = true;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (quoted) throw DataError(name + ":" + std::to_string(record_line) + ": unterminated quoted field");
  if (field_started || !field.empty() || !fields.empty()) end_record();
  return records;
}

std::vector<RawDocument> load_csv(const std::filesystem::path& path) {
  const auto records = parse_csv(read_file(path), path.string());
  if (records.empty()) throw DataError(path.string() + ": missing header row");
  const auto& header = records.front().second;
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto id_col = column("id");
  const auto text_col = column("text");
  const auto label_col = column("label");
  if (!id_col || !text_col) throw DataError(path.string() + ":1: header must contain 'id' and 'text'");

  std::vector<RawDocument> docs;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& [line_no, row] = records[r];
    if (row.size() != header.size()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " + std::to_string(row.size()));
    }
    RawDocument doc{row[*id_col], row[*text_col], std::nullopt};
    if (label_col && !row[*label_col].empty()) doc.label = row[*label_col];
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<RawDocument> load_dir(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw DataError(root.string() + " is not a directory");
  std::vector<std::pair<fs::path, std::optional<std::string>>> files;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.emplace_back(entry.path(), std::nullopt);
    } else if (entry.is_directory()) {
      for (const auto& sub : fs::directory_iterator(entry.path())) {
        if (sub.is_regular_file() && sub.path().extension() == ".txt") {
          files.emplace_back(sub.path(), entry.path().filename().string());
        }
      }
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<RawDocument> docs;
  docs.reserve(files.size());
  for (const auto& [file, label] : files) {
    // Id is the path relative to the root without extension, unique per file.
    docs.push_back({fs::relative(file, root).replace_extension().generic_string(), read_file(file), label});
  }
  return docs;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::pair<std::string, std::uint64_t>> counts) {
  std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  terms_.reserve(counts.size());
  freqs_.reserve(counts.size());
  for (auto& [term, count] : counts) {
    if (count == 0) throw DataError("vocabulary term '" + term + "' has zero frequency");
    if (!index_.emplace(term, terms_.size()).second) throw DataError("duplicate vocabulary term '" + term + "'");
    terms_.push_back(std::move(term));
    freqs_.push_back(count);
  }
}

std::optional<std::uint64_t> Vocabulary::frequency(std::string_view term) const {
  const auto ordinal = index(term);
  if (!ordinal) return std::nullopt;
  return freqs_[*ordinal];
}

std::optional<std::size_t> Vocabulary::index(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Vocabulary::total() const {
  std::uint64_t sum = 0;
  for (const auto f : freqs_) sum += f;
  return sum;
}

std::vector<std::string> tokenize(std::string_view text, TokenizerOptions options) {
  std::vector<std::string> tokens;
  const std::size_t min_len = std::max<std::size_t>(options.min_length, 1);
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_token_char(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && is_token_char(static_cast<unsigned char>(text[i]))) ++i;
    if (i - start >= min_len) {
      std::string token(text.substr(start, i - start));
      for (auto& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      tokens.push_back(std::move(token));
    }
  }
  return tokens;
}

Vocabulary build_vocabulary(std::span<const RawDocument> docs, TokenizerOptions options) {
  if (docs.empty()) throw DataError("empty corpus");
  std::map<std::string, std::uint64_t> counts;
  for (const auto& doc : docs) {
    for (auto& token : tokenize(doc.text, options)) ++counts[std::move(token)];
  }
  if (counts.empty()) throw DataError("empty vocabulary");
  return Vocabulary({counts.begin(), counts.end()});
}

std::size_t common_token_split(std::span<const std::uint64_t> counts) {
  const std::size_t m = counts.size();
  if (m < 4) return 0;
  // Suffix moments computed right to left so each split reads both sides in O(1).
  std::vector<Moments> suffix(m + 1);
  for (std::size_t i = m; i-- > 0;) {
    suffix[i] = suffix[i + 1];
    suffix[i].push(static_cast<double>(counts[i]));
  }
  Moments prefix;
  std::size_t best = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 1; s + 2 <= m; ++s) {
    prefix.push(static_cast<double>(counts[s - 1]));
    // Both populations need two points, and tied counts stay on one side.
    if (s < 2 || counts[s - 1] == counts[s]) continue;
    const double ll = prefix.log_likelihood() + suffix[s].log_likelihood();
    if (ll > best_ll) {
      best_ll = ll;
      best = s;
    }
  }
  return best;
}

std::pair<Vocabulary, PruneReport> remove_common_tokens(const Vocabulary& vocab) {
  if (vocab.empty()) throw DataError("empty vocabulary");
  std::vector<std::uint64_t> counts(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) counts[i] = vocab.frequency(i);
  const std::size_t split = common_token_split(counts);

  PruneReport report;
  report.common_removed = entries_of(vocab, 0, split);
  if (split > 0) report.common_threshold = counts[split - 1];
  return {Vocabulary(entries_of(vocab, split, vocab.size())), std::move(report)};
}

std::pair<Vocabulary, PruneReport> remove_rare_tokens(const Vocabulary& vocab, double mass) {
  if (vocab.empty()) throw DataError("empty vocabulary");
  if (!(mass > 0.0 && mass <= 1.0)) throw UsageError("rare-token mass must lie in (0, 1]");
  const double total = static_cast<double>(vocab.total());
  const double target = mass * total;
  std::size_t keep = vocab.size();
  std::uint64_t kept = 0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    kept += vocab.frequency(i);
    // Counts are integers; the slack only absorbs rounding in mass * total.
    if (static_cast<double>(kept) + 1e-9 >= target) {
      keep = i + 1;
      break;
    }
  }
  PruneReport report;
  report.rare_removed = entries_of(vocab, keep, vocab.size());
  report.rare_mass_kept = static_cast<double>(kept) / total;
  return {Vocabulary(entries_of(vocab, 0, keep)), std::move(report)};
}

CountMatrixResult count_matrix(std::span<const RawDocument> docs, const Vocabulary& vocab,
                               TokenizerOptions options) {
  if (vocab.empty()) throw DataError("empty vocabulary");
  std::vector<Triplet> entries;
  std::vector<std::string> ids;
  std::vector<std::optional<std::string>> labels;
  std::vector<std::string> dropped;
  std::map<std::size_t, double> row;
  for (const auto& doc : docs) {
    row.clear();
    for (const auto& token : tokenize(doc.text, options)) {
      if (const auto j = vocab.index(token)) row[*j] += 1.0;
    }
    if (row.empty()) {
      dropped.push_back(doc.id);
      continue;
    }
    const auto i = static_cast<Index>(ids.size());
    for (const auto& [j, c] : row) entries.emplace_back(i, static_cast<Index>(j), c);
    ids.push_back(doc.id);
    labels.push_back(doc.label);
  }
  if (ids.empty()) throw DataError("no documents contain any vocabulary term");

  std::vector<bool> used(vocab.size(), false);
  for (const auto& t : entries) used[static_cast<std::size_t>(t.col())] = true;
  for (std::size_t j = 0; j < used.size(); ++j) {
    if (!used[j]) throw DataError("vocabulary term '" + vocab.terms()[j] + "' occurs in no document");
  }

  return {DocTermMatrix::from_triplets(static_cast<Index>(ids.size()), static_cast<Index>(vocab.size()), entries),
          std::move(ids), std::move(labels), vocab.terms(), std::move(dropped)};
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::Jsonl;
  if (name == "csv") return CorpusFormat::Csv;
  if (name == "dir") return CorpusFormat::Dir;
  throw UsageError("unknown corpus format '" + std::string(name) + "' (expected jsonl, csv or dir)");
}

std::string_view to_string(CorpusFormat format) {
  switch (format) {
    case CorpusFormat::Jsonl: return "jsonl";
    case CorpusFormat::Csv: return "csv";
    case CorpusFormat::Dir: return "dir";
  }
  return "?";
}

std::vector<RawDocument> load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  if (!std::filesystem::exists(path)) throw DataError(path.string() + " does not exist");
  std::vector<RawDocument> docs;
  switch (format) {
    case CorpusFormat::Jsonl: docs = load_jsonl(path); break;
    case CorpusFormat::Csv: docs = load_csv(path); break;
    case CorpusFormat::Dir: docs = load_dir(path); break;
  }
  check_unique(docs);
  return docs;
}

IngestResult ingest(std::span<const RawDocument> docs, const IngestOptions& options) {
  Vocabulary vocab = build_vocabulary(docs, options.tokenizer);
  PruneReport report;
  if (options.prune) {
    auto [without_common, common] = remove_common_tokens(vocab);
    if (without_common.empty()) throw DataError("common-token removal left an empty vocabulary");
    auto [kept, rare] = remove_rare_tokens(without_common, options.rare_mass);
    report = std::move(common);
    report.rare_removed = std::move(rare.rare_removed);
    report.rare_mass_kept = rare.rare_mass_kept;
    vocab = std::move(kept);
  }
  return {count_matrix(docs, vocab, options.tokenizer), std::move(report)};
}

}  // namespace dsnmf
