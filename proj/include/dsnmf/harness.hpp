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
#include <string>
#include <vector>

#include "dsnmf/cluster_eval.hpp"
#include "dsnmf/corpus.hpp"
#include "dsnmf/nmf.hpp"
#include "dsnmf/rank.hpp"
#include "dsnmf/scaling.hpp"
#include "dsnmf/serialize.hpp"
#include "dsnmf/synthetic.hpp"

namespace dsnmf {

/// Where the documents come from: a file or directory in one of the corpus
/// formats, a directory written by `save_prepared` ("cache"), or a synthetic
/// spec. Exactly one of `path` and `synthetic` is set.
struct CorpusSource {
  std::optional<std::filesystem::path> path;
  std::string format = "jsonl";
  std::optional<SyntheticSpec> synthetic;
};

struct ExperimentConfig {
  CorpusSource source;
  std::vector<ScalingKind> scalings{kAllScalings.begin(), kAllScalings.end()};
  BetaLoss loss = BetaLoss::frobenius();
  std::uint64_t seed = 0;
  Index radius = 10;
  /// Explicit ranks; when empty the sweep is centred on the second elbow.
  std::vector<Index> ranks;
  std::filesystem::path output_dir = "out";
  IngestOptions ingest;
  bool pwmi_times_n = false;
  /// Scaling whose spectrum drives rank selection; raw counts when unset.
  std::optional<ScalingKind> spectrum_on;
  Index spectrum_count = 64;
  int max_iter = 200;
  double tol = 1e-4;
  InitMethod init = InitMethod::SeededRandom;
};

void validate(const ExperimentConfig& config);

Json to_json(const ExperimentConfig& config);
/// Overlays the fields present in `j` onto `config`.
void apply_json(const Json& j, ExperimentConfig& config);

Json to_json(const SyntheticSpec& spec);
void apply_json(const Json& j, SyntheticSpec& spec);

/// 64-bit FNV-1a of the canonical config JSON.
std::string config_hash(const ExperimentConfig& config);

/// Seed for one (scaling, rank) cell, independent of sweep order.
std::uint64_t cell_seed(std::uint64_t master, ScalingKind kind, Index rank);

/// Count matrix plus everything needed to score and report on it.
struct PreparedCorpus {
  DocTermMatrix matrix;
  std::vector<std::string> doc_ids;
  /// Present only when every surviving document carries a label.
  std::optional<std::vector<std::string>> labels;
  std::vector<std::string> terms;
  std::vector<std::string> dropped_docs;
  std::optional<PruneReport> prune;
};

PreparedCorpus prepare_corpus(const ExperimentConfig& config, std::vector<std::string>* warnings = nullptr);

// Cache layout: matrix.tri, terms.txt, docs.tsv (id TAB label), and
// prune_report.json when pruning ran.
void save_prepared(const PreparedCorpus& corpus, const std::filesystem::path& dir);
PreparedCorpus load_prepared(const std::filesystem::path& dir);

struct SpectrumResult {
  SingularSpectrum spectrum;
  ElbowEstimate elbow;
  std::string source;  // "counts" or a scaling name
};

SpectrumResult compute_spectrum(const DocTermMatrix& m, const ExperimentConfig& config);

struct CellResult {
  ScalingKind scaling = ScalingKind::Counts;
  Index rank = 0;
  std::uint64_t seed = 0;
  std::optional<AriReport> ari;
  bool converged = false;
  int iterations = 0;
  double objective = 0.0;
  double residual_norm = 0.0;
};

/// Factorization of one scaled matrix with post-scaled factors and the
/// resulting document partition.
struct CellRun {
  CellResult result;
  NmfModel model;    // factors of the scaled matrix
  Factors factors;   // post-scaled
  Partition partition;
  /// Documents whose post-scaled topic weights are all zero.
  std::vector<std::size_t> zero_rows;
};

CellRun run_cell(const PreparedCorpus& corpus, ScalingKind kind, Index rank, const ExperimentConfig& config);

struct ExperimentReport {
  Json config;
  std::string config_hash;
  std::uint64_t seed = 0;
  Index n_docs = 0;
  Index n_terms = 0;
  Index nnz = 0;
  double total_count = 0.0;
  std::vector<std::string> dropped_docs;
  std::optional<PruneReport> prune;
  SpectrumResult spectrum;
  std::vector<Index> ranks;
  /// Ordered by scaling (config order) then rank.
  std::vector<CellResult> cells;
  std::vector<std::string> warnings;
};

ExperimentReport run_experiment(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config, const PreparedCorpus& corpus,
                                std::vector<std::string> warnings = {});

/// Largest ARI over the sweep for one scaling, if any cell was scored.
std::optional<double> best_ari(const ExperimentReport& report, ScalingKind kind);

}  // namespace dsnmf
