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


#include "dsnmf/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dsnmf/error.hpp"

namespace dsnmf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Re-raises library errors with the pipeline stage prepended.
template <typename Fn>
auto staged(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const UsageError& e) {
    throw UsageError(stage + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(stage + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(stage + ": " + e.what());
  }
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

template <typename T>
void read_field(const Json& j, const char* key, T& target) {
  if (j.contains(key) && !j[key].is_null()) target = j[key].get<T>();
}

}  // namespace

void validate(const ExperimentConfig& c) {
  if (c.source.path.has_value() == c.source.synthetic.has_value()) {
    throw UsageError("exactly one of an input path and a synthetic spec is required");
  }
  if (c.source.path && c.source.format != "cache") (void)parse_corpus_format(c.source.format);
  if (c.source.synthetic) validate(*c.source.synthetic);
  if (c.scalings.empty()) throw UsageError("at least one scaling is required");
  if (c.radius < 0) throw UsageError("radius must be non-negative");
  for (const Index r : c.ranks) {
    if (r < 1) throw UsageError("ranks must be positive");
  }
  if (c.spectrum_count < 2) throw UsageError("spectrum count must be at least 2");
  if (c.max_iter < 1) throw UsageError("max_iter must be positive");
  if (!(c.tol >= 0.0)) throw UsageError("tol must be non-negative");
  if (!(c.ingest.rare_mass > 0.0 && c.ingest.rare_mass <= 1.0)) throw UsageError("rare mass must lie in (0, 1]");
  if (c.ingest.tokenizer.min_length < 1) throw UsageError("minimum token length must be positive");
}

Json to_json(const SyntheticSpec& s) {
  return Json{{"k_topics", s.k_topics},
              {"n_docs", s.n_docs},
              {"vocab_size", s.vocab_size},
              {"doc_length_mean", s.doc_length_mean},
              {"doc_length_dispersion", s.doc_length_dispersion},
              {"topic_concentration", s.topic_concentration},
              {"zipf_exponent", s.zipf_exponent},
              {"length_skew", s.length_skew},
              {"seed", s.seed}};
}

void apply_json(const Json& j, SyntheticSpec& s) {
  try {
    read_field(j, "k_topics", s.k_topics);
    read_field(j, "n_docs", s.n_docs);
    read_field(j, "vocab_size", s.vocab_size);
    read_field(j, "doc_length_mean", s.doc_length_mean);
    read_field(j, "doc_length_dispersion", s.doc_length_dispersion);
    read_field(j, "topic_concentration", s.topic_concentration);
    read_field(j, "zipf_exponent", s.zipf_exponent);
    read_field(j, "length_skew", s.length_skew);
    read_field(j, "seed", s.seed);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("synthetic spec: ") + e.what());
  }
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  if (c.source.path) {
    j["input"] = c.source.path->string();
    j["format"] = c.source.format;
  } else {
    j["synthetic"] = to_json(*c.source.synthetic);
  }
  Json scalings = Json::array();
  for (const auto k : c.scalings) scalings.push_back(std::string(to_string(k)));
  j["scalings"] = scalings;
  j["loss"] = to_string(c.loss);
  j["seed"] = c.seed;
  j["radius"] = c.radius;
  j["ranks"] = c.ranks;
  j["min_token_len"] = c.ingest.tokenizer.min_length;
  j["rare_mass"] = c.ingest.rare_mass;
  j["prune"] = c.ingest.prune;
  j["pwmi_times_n"] = c.pwmi_times_n;
  j["spectrum_on_scaled"] = c.spectrum_on ? Json(std::string(to_string(*c.spectrum_on))) : Json(nullptr);
  j["spectrum_count"] = c.spectrum_count;
  j["max_iter"] = c.max_iter;
  j["tol"] = c.tol;
  j["init"] = std::string(to_string(c.init));
  return j;
}

void apply_json(const Json& j, ExperimentConfig& c) {
  try {
    if (j.contains("input")) {
      c.source.path = j["input"].get<std::string>();
      c.source.synthetic.reset();
    }
    read_field(j, "format", c.source.format);
    if (j.contains("synthetic")) {
      SyntheticSpec spec = c.source.synthetic.value_or(SyntheticSpec{});
      apply_json(j["synthetic"], spec);
      c.source.synthetic = spec;
      c.source.path.reset();
    }
    if (j.contains("scalings")) {
      c.scalings.clear();
      for (const auto& s : j["scalings"]) c.scalings.push_back(parse_scaling(s.get<std::string>()));
    }
    if (j.contains("loss")) {
      c.loss = j["loss"].is_number() ? BetaLoss{j["loss"].get<double>()} : parse_loss(j["loss"].get<std::string>());
    }
    read_field(j, "seed", c.seed);
    read_field(j, "radius", c.radius);
    read_field(j, "ranks", c.ranks);
    if (j.contains("out")) c.output_dir = j["out"].get<std::string>();
    read_field(j, "min_token_len", c.ingest.tokenizer.min_length);
    read_field(j, "rare_mass", c.ingest.rare_mass);
    read_field(j, "prune", c.ingest.prune);
    read_field(j, "pwmi_times_n", c.pwmi_times_n);
    if (j.contains("spectrum_on_scaled")) {
      if (j["spectrum_on_scaled"].is_null()) {
        c.spectrum_on.reset();
      } else {
        c.spectrum_on = parse_scaling(j["spectrum_on_scaled"].get<std::string>());
      }
    }
    read_field(j, "spectrum_count", c.spectrum_count);
    read_field(j, "max_iter", c.max_iter);
    read_field(j, "tol", c.tol);
    if (j.contains("init")) c.init = parse_init(j["init"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t cell_seed(std::uint64_t master, ScalingKind kind, Index rank) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ (static_cast<std::uint64_t>(kind) + 1));
  return splitmix64(h ^ static_cast<std::uint64_t>(rank));
}

PreparedCorpus prepare_corpus(const ExperimentConfig& config, std::vector<std::string>* warnings) {
  validate(config);
  if (config.source.path && config.source.format == "cache") {
    return staged("load cache", [&] { return load_prepared(*config.source.path); });
  }

  IngestResult ingested = [&] {
    if (config.source.synthetic) {
      const auto docs = staged("synthesize", [&] { return generate_synthetic_corpus(*config.source.synthetic); });
      IngestOptions options = config.ingest;
      options.prune = false;
      return staged("ingest", [&] { return ingest(docs, options); });
    }
    const auto docs = staged("load corpus", [&] {
      return load_corpus(*config.source.path, parse_corpus_format(config.source.format));
    });
    return staged("ingest", [&] { return ingest(docs, config.ingest); });
  }();

  CountMatrixResult& counts = ingested.counts;
  PreparedCorpus out{std::move(counts.matrix), std::move(counts.doc_ids), std::nullopt, std::move(counts.terms),
                     std::move(counts.dropped_docs), std::nullopt};
  if (config.source.path && config.ingest.prune) out.prune = std::move(ingested.prune);

  const bool labeled = std::all_of(counts.labels.begin(), counts.labels.end(), [](const auto& l) { return l.has_value(); });
  if (labeled) {
    std::vector<std::string> labels;
    labels.reserve(counts.labels.size());
    for (auto& l : counts.labels) labels.push_back(std::move(*l));
    out.labels = std::move(labels);
  } else if (warnings) {
    warnings->push_back("corpus has unlabeled documents; ARI is not computed");
  }
  if (warnings && !out.dropped_docs.empty()) {
    warnings->push_back(std::to_string(out.dropped_docs.size()) + " documents dropped after pruning");
  }
  return out;
}

void save_prepared(const PreparedCorpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());

  auto matrix = open_for_write(dir / "matrix.tri");
  write_triplets(matrix, corpus.matrix.counts());

  auto terms = open_for_write(dir / "terms.txt");
  for (const auto& t : corpus.terms) terms << t << '\n';

  auto docs = open_for_write(dir / "docs.tsv");
  docs << "id\tlabel\n";
  for (std::size_t i = 0; i < corpus.doc_ids.size(); ++i) {
    const std::string& id = corpus.doc_ids[i];
    if (id.find_first_of("\t\n") != std::string::npos) throw DataError("document id '" + id + "' contains a tab or newline");
    docs << id;
    if (corpus.labels) docs << '\t' << (*corpus.labels)[i];
    docs << '\n';
  }

  auto dropped = open_for_write(dir / "dropped.txt");
  for (const auto& d : corpus.dropped_docs) dropped << d << '\n';

  if (corpus.prune) {
    auto prune = open_for_write(dir / "prune_report.json");
    prune << to_json(*corpus.prune).dump(2) << '\n';
  }
  if (!matrix || !terms || !docs || !dropped) throw DataError("failed writing cache in " + dir.string());
}

PreparedCorpus load_prepared(const std::filesystem::path& dir) {
  std::ifstream matrix_in(dir / "matrix.tri");
  if (!matrix_in) throw DataError("cannot open " + (dir / "matrix.tri").string());
  DocTermMatrix matrix(read_triplets(matrix_in));

  std::vector<std::string> terms = read_lines(dir / "terms.txt");
  if (static_cast<Index>(terms.size()) != matrix.n_terms()) throw DataError("terms.txt does not match matrix columns");

  const auto doc_lines = read_lines(dir / "docs.tsv");
  if (doc_lines.empty() || doc_lines.front() != "id\tlabel") throw DataError("docs.tsv: missing header");
  std::vector<std::string> ids;
  std::vector<std::string> labels;
  bool labeled = true;
  for (std::size_t i = 1; i < doc_lines.size(); ++i) {
    const auto& line = doc_lines[i];
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      ids.push_back(line);
      labeled = false;
    } else {
      ids.push_back(line.substr(0, tab));
      labels.push_back(line.substr(tab + 1));
    }
  }
  if (static_cast<Index>(ids.size()) != matrix.n_docs()) throw DataError("docs.tsv does not match matrix rows");

  std::vector<std::string> dropped;
  if (std::filesystem::exists(dir / "dropped.txt")) dropped = read_lines(dir / "dropped.txt");

  std::optional<PruneReport> prune;
  if (std::filesystem::exists(dir / "prune_report.json")) {
    std::ifstream in(dir / "prune_report.json");
    try {
      prune = prune_report_from_json(Json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(std::string("prune_report.json: ") + e.what());
    }
  }
  PreparedCorpus out{std::move(matrix), std::move(ids), std::nullopt, std::move(terms), std::move(dropped),
                     std::move(prune)};
  if (labeled) out.labels = std::move(labels);
  return out;
}

SpectrumResult compute_spectrum(const DocTermMatrix& m, const ExperimentConfig& config) {
  const Index count = std::min(config.spectrum_count, std::min(m.n_docs(), m.n_terms()));
  if (count < 2) throw DataError("matrix too small for rank selection");
  SpectrumResult out;
  if (config.spectrum_on) {
    const ScaledMatrix scaled = apply_scaling(m, *config.spectrum_on, {config.pwmi_times_n});
    out.spectrum = singular_values(scaled.matrix, count);
    out.source = std::string(to_string(*config.spectrum_on));
  } else {
    out.spectrum = singular_values(m.counts(), count);
    out.source = "counts";
  }
  out.elbow = second_elbow(out.spectrum.values);
  return out;
}

CellRun run_cell(const PreparedCorpus& corpus, ScalingKind kind, Index rank, const ExperimentConfig& config) {
  const std::string stage = std::string(to_string(kind)) + " rank " + std::to_string(rank);
  return staged(stage, [&] {
    const ScaledMatrix scaled = apply_scaling(corpus.matrix, kind, {config.pwmi_times_n});
    NmfConfig nmf;
    nmf.rank = rank;
    nmf.loss = config.loss;
    nmf.max_iter = config.max_iter;
    nmf.tol = config.tol;
    nmf.init = config.init;
    nmf.seed = cell_seed(config.seed, kind, rank);

    CellRun run;
    run.model = factorize(scaled.matrix, nmf);
    run.factors = post_scale(run.model.W, run.model.H, scaled);
    run.partition = assign_clusters(run.factors.W, corpus.doc_ids, &run.zero_rows);
    run.result.scaling = kind;
    run.result.rank = rank;
    run.result.seed = nmf.seed;
    run.result.converged = run.model.converged;
    run.result.iterations = run.model.iterations;
    run.result.objective = run.model.objective_history.back();
    run.result.residual_norm = run.model.residual_norm;
    if (corpus.labels) {
      run.result.ari = evaluate(run.partition, partition_from_labels(corpus.doc_ids, *corpus.labels));
    }
    return run;
  });
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  std::vector<std::string> warnings;
  const PreparedCorpus corpus = prepare_corpus(config, &warnings);
  return run_experiment(config, corpus, std::move(warnings));
}

ExperimentReport run_experiment(const ExperimentConfig& config, const PreparedCorpus& corpus,
                                std::vector<std::string> warnings) {
  validate(config);
  ExperimentReport report;
  report.config = to_json(config);
  report.config_hash = config_hash(config);
  report.seed = config.seed;
  report.n_docs = corpus.matrix.n_docs();
  report.n_terms = corpus.matrix.n_terms();
  report.nnz = corpus.matrix.nnz();
  report.total_count = corpus.matrix.total_count();
  report.dropped_docs = corpus.dropped_docs;
  report.prune = corpus.prune;
  report.spectrum = staged("spectrum", [&] { return compute_spectrum(corpus.matrix, config); });

  const Index max_rank = std::min(corpus.matrix.n_docs(), corpus.matrix.n_terms());
  if (config.ranks.empty()) {
    report.ranks = staged("rank sweep", [&] { return sweep_range(report.spectrum.elbow, config.radius, 2, max_rank - 1); });
  } else {
    report.ranks = config.ranks;
    std::sort(report.ranks.begin(), report.ranks.end());
    report.ranks.erase(std::unique(report.ranks.begin(), report.ranks.end()), report.ranks.end());
    if (report.ranks.back() > max_rank) {
      throw UsageError("rank " + std::to_string(report.ranks.back()) + " exceeds min(n_docs, n_terms) = " +
                       std::to_string(max_rank));
    }
  }

  for (const ScalingKind kind : config.scalings) {
    for (const Index rank : report.ranks) {
      const CellRun run = run_cell(corpus, kind, rank, config);
      if (!run.zero_rows.empty()) {
        warnings.push_back(std::string(to_string(kind)) + " rank " + std::to_string(rank) + ": " +
                           std::to_string(run.zero_rows.size()) + " documents have no positive topic weight");
      }
      report.cells.push_back(run.result);
    }
  }
  report.warnings = std::move(warnings);
  return report;
}

std::optional<double> best_ari(const ExperimentReport& report, ScalingKind kind) {
  std::optional<double> best;
  for (const auto& c : report.cells) {
    if (c.scaling == kind && c.ari && (!best || c.ari->ari > *best)) best = c.ari->ari;
  }
  return best;
}

}  // namespace dsnmf
