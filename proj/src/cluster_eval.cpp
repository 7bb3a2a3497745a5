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


#include "dsnmf/cluster_eval.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "dsnmf/error.hpp"

namespace dsnmf {

namespace {

double choose2(std::uint64_t n) { return 0.5 * static_cast<double>(n) * (static_cast<double>(n) - 1.0); }

struct PairSums {
  double cells = 0.0;  // sum C(n_ij, 2)
  double rows = 0.0;   // sum C(a_i, 2)
  double cols = 0.0;   // sum C(b_j, 2)
  double all = 0.0;    // C(m, 2)
};

PairSums pair_sums(const ContingencyTable& t) {
  PairSums s;
  for (const auto& row : t.counts) {
    for (const auto c : row) s.cells += choose2(c);
  }
  for (const auto a : t.row_sums) s.rows += choose2(a);
  for (const auto b : t.col_sums) s.cols += choose2(b);
  s.all = choose2(t.total);
  return s;
}

}  // namespace

Partition::Partition(std::vector<std::string> ids, std::vector<int> labels)
    : ids_(std::move(ids)), labels_(std::move(labels)) {
  if (ids_.size() != labels_.size()) throw DataError("partition: ids and labels differ in length");
  position_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!position_.emplace(ids_[i], i).second) throw DataError("partition: duplicate document id '" + ids_[i] + "'");
  }
}

int Partition::label_of(const std::string& id) const {
  const auto it = position_.find(id);
  if (it == position_.end()) throw DataError("partition: unknown document id '" + id + "'");
  return labels_[it->second];
}

std::size_t Partition::k() const { return std::set<int>(labels_.begin(), labels_.end()).size(); }

Partition partition_from_labels(std::vector<std::string> ids, std::span<const std::string> labels) {
  std::map<std::string, int> code;
  std::vector<int> out;
  out.reserve(labels.size());
  for (const auto& l : labels) {
    const auto [it, inserted] = code.emplace(l, static_cast<int>(code.size()));
    out.push_back(it->second);
  }
  return Partition(std::move(ids), std::move(out));
}

Partition assign_clusters(const Matrix& w, std::span<const std::string> doc_ids, std::vector<std::size_t>* zero_rows) {
  if (static_cast<Index>(doc_ids.size()) != w.rows()) {
    throw DataError("assign_clusters: " + std::to_string(doc_ids.size()) + " ids for " + std::to_string(w.rows()) +
                    " rows");
  }
  std::vector<int> labels(doc_ids.size(), 0);
  for (Index i = 0; i < w.rows(); ++i) {
    Index best = 0;
    for (Index j = 1; j < w.cols(); ++j) {
      if (w(i, j) > w(i, best)) best = j;
    }
    if (!(w(i, best) > 0.0) && zero_rows) zero_rows->push_back(static_cast<std::size_t>(i));
    labels[static_cast<std::size_t>(i)] = w(i, best) > 0.0 ? static_cast<int>(best) : 0;
  }
  return Partition({doc_ids.begin(), doc_ids.end()}, std::move(labels));
}

ContingencyTable contingency(const Partition& p1, const Partition& p2) {
  if (p1.size() != p2.size()) throw DataError("partitions cover different document sets");
  std::map<int, std::size_t> rows;
  std::map<int, std::size_t> cols;
  for (const int l : p1.labels()) rows.emplace(l, 0);
  for (const int l : p2.labels()) cols.emplace(l, 0);
  std::size_t r = 0;
  for (auto& [label, idx] : rows) idx = r++;
  std::size_t c = 0;
  for (auto& [label, idx] : cols) idx = c++;

  ContingencyTable t;
  t.counts.assign(rows.size(), std::vector<std::uint64_t>(cols.size(), 0));
  t.row_sums.assign(rows.size(), 0);
  t.col_sums.assign(cols.size(), 0);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    const std::size_t a = rows.at(p1.labels()[i]);
    const std::size_t b = cols.at(p2.label_of(p1.ids()[i]));
    ++t.counts[a][b];
    ++t.row_sums[a];
    ++t.col_sums[b];
  }
  t.total = p1.size();
  return t;
}

double rand_index(const ContingencyTable& table) {
  const PairSums s = pair_sums(table);
  if (s.all == 0.0) return 1.0;
  // Pairs together in both plus pairs apart in both.
  const double agree = s.all + 2.0 * s.cells - s.rows - s.cols;
  return agree / s.all;
}

double adjusted_rand_index(const ContingencyTable& table) {
  const PairSums s = pair_sums(table);
  if (s.all == 0.0) return 1.0;
  const double expected = s.rows * s.cols / s.all;
  const double max_index = 0.5 * (s.rows + s.cols);
  const double denom = max_index - expected;
  if (denom == 0.0) return (s.cells == s.rows && s.cells == s.cols) ? 1.0 : 0.0;
  return (s.cells - expected) / denom;
}

double rand_index(const Partition& p1, const Partition& p2) { return rand_index(contingency(p1, p2)); }

double adjusted_rand_index(const Partition& p1, const Partition& p2) {
  return adjusted_rand_index(contingency(p1, p2));
}

AriReport evaluate(const Partition& predicted, const Partition& truth) {
  const ContingencyTable t = contingency(predicted, truth);
  return {adjusted_rand_index(t), rand_index(t), predicted.k(), truth.k()};
}

}  // namespace dsnmf
