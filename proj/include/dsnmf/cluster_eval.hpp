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
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dsnmf/doc_term_matrix.hpp"

namespace dsnmf {

/// Document id -> integer cluster label. Labels need not be contiguous.
class Partition {
 public:
  Partition() = default;
  Partition(std::vector<std::string> ids, std::vector<int> labels);

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<int>& labels() const { return labels_; }
  /// Label of `id`; throws DataError for unknown ids.
  int label_of(const std::string& id) const;
  /// Number of distinct labels.
  std::size_t k() const;

 private:
  std::vector<std::string> ids_;
  std::vector<int> labels_;
  std::unordered_map<std::string, std::size_t> position_;
};

/// Maps string labels to integers in order of first appearance.
Partition partition_from_labels(std::vector<std::string> ids, std::span<const std::string> labels);

/// Row-wise argmax of W, ties to the smallest topic index. Rows without a
/// positive entry get topic 0 and are listed in `zero_rows` when given.
Partition assign_clusters(const Matrix& w, std::span<const std::string> doc_ids,
                          std::vector<std::size_t>* zero_rows = nullptr);

struct ContingencyTable {
  std::vector<std::vector<std::uint64_t>> counts;  // k1 x k2
  std::vector<std::uint64_t> row_sums;
  std::vector<std::uint64_t> col_sums;
  std::uint64_t total = 0;
};

/// Rows follow the sorted distinct labels of p1, columns those of p2.
/// Throws DataError when the two partitions cover different documents.
ContingencyTable contingency(const Partition& p1, const Partition& p2);

double rand_index(const ContingencyTable& table);
double adjusted_rand_index(const ContingencyTable& table);
double rand_index(const Partition& p1, const Partition& p2);
double adjusted_rand_index(const Partition& p1, const Partition& p2);

struct AriReport {
  double ari = 0.0;
  double rand = 0.0;
  std::size_t k_pred = 0;
  std::size_t k_true = 0;
};

AriReport evaluate(const Partition& predicted, const Partition& truth);

}  // namespace dsnmf
