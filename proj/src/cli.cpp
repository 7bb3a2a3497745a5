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


#include "dsnmf/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "dsnmf/error.hpp"
#include "dsnmf/harness.hpp"
#include "dsnmf/report.hpp"
#include "dsnmf/serialize.hpp"

namespace dsnmf {

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Flags shared by the experiment-style subcommands. Each one only overrides
// the config when it was given on the command line.
struct ExperimentFlags {
  std::string config_file;
  std::string input;
  std::string format;
  std::string scalings;
  std::string loss;
  std::string ranks;
  Index radius = 10;
  std::uint64_t seed = 0;
  bool pwmi_times_n = false;
  std::string spectrum_on_scaled;
  std::size_t min_token_len = 2;
  double rare_mass = 0.99;
  bool no_prune = false;
  std::string out;
  int max_iter = 200;
  double tol = 1e-4;
  std::string init;
  Index spectrum_count = 64;
  bool synthetic = false;
  SyntheticSpec spec;

  std::vector<CLI::Option*> options;
  CLI::Option* opt(CLI::Option* o) {
    options.push_back(o);
    return o;
  }
  bool given(const std::string& name) const {
    const std::string bare = name.substr(name.find_first_not_of('-'));
    for (const auto* o : options) {
      if (o->check_lname(bare)) return o->count() > 0;
    }
    return false;
  }

  void add_synthetic(CLI::App* app) {
    opt(app->add_option("--k-topics", spec.k_topics, "Number of topics"));
    opt(app->add_option("--n-docs", spec.n_docs, "Number of documents"));
    opt(app->add_option("--vocab-size", spec.vocab_size, "Vocabulary size"));
    opt(app->add_option("--doc-length-mean", spec.doc_length_mean, "Mean document length"));
    opt(app->add_option("--doc-length-dispersion", spec.doc_length_dispersion, "Gamma shape of the length mixture"));
    opt(app->add_option("--topic-concentration", spec.topic_concentration, "Dirichlet concentration per term"));
    opt(app->add_option("--zipf-exponent", spec.zipf_exponent, "Zipf exponent of the base measure"));
    opt(app->add_option("--length-skew", spec.length_skew, "Ratio of longest to shortest expected length"));
    opt(app->add_option("--synth-seed", spec.seed, "Seed of the synthetic corpus"));
  }

  void add(CLI::App* app, bool experiment) {
    opt(app->add_option("--config", config_file, "JSON config file; flags override its values"));
    opt(app->add_option("--input", input, "Corpus path (file, directory or ingest cache)"));
    opt(app->add_option("--format", format, "jsonl, csv, dir or cache"));
    opt(app->add_option("--min-token-len", min_token_len, "Minimum token length"));
    opt(app->add_option("--rare-mass", rare_mass, "Token mass kept by rare-token removal"));
    opt(app->add_flag("--no-prune", no_prune, "Skip common and rare token removal"));
    opt(app->add_option("--out", out, "Output location"));
    if (!experiment) return;
    opt(app->add_option("--scalings", scalings, "Comma-separated subset of none,rs,cs,nl,pwmi"));
    opt(app->add_option("--loss", loss, "frobenius, kl, is or a numeric beta"));
    opt(app->add_option("--rank", ranks, "Comma-separated explicit ranks"));
    opt(app->add_option("--radius", radius, "Sweep radius around the second elbow"));
    opt(app->add_option("--seed", seed, "Master seed"));
    opt(app->add_flag("--pwmi-times-n", pwmi_times_n, "Multiply PWMI by the total count"));
    opt(app->add_option("--spectrum-on-scaled", spectrum_on_scaled,
                        "Select ranks from the spectrum of this scaling instead of raw counts")
            ->expected(0, 1)
            ->default_str("nl"));
    opt(app->add_option("--spectrum-count", spectrum_count, "Number of singular values for rank selection"));
    opt(app->add_option("--max-iter", max_iter, "NMF iteration cap"));
    opt(app->add_option("--tol", tol, "NMF relative objective tolerance"));
    opt(app->add_option("--init", init, "random or nndsvda"));
    opt(app->add_flag("--synthetic", synthetic, "Generate the corpus instead of reading one"));
    add_synthetic(app);
  }

  ExperimentConfig build() const {
    ExperimentConfig c;
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw UsageError("cannot open config file " + config_file);
      try {
        apply_json(Json::parse(in), c);
      } catch (const nlohmann::json::parse_error& e) {
        throw UsageError("config file " + config_file + ": " + e.what());
      }
    }
    if (given("--input")) {
      c.source.path = input;
      c.source.synthetic.reset();
    }
    if (given("--format")) c.source.format = format;
    if (synthetic) {
      c.source.path.reset();
      if (!c.source.synthetic) c.source.synthetic = SyntheticSpec{};
    }
    if (c.source.synthetic) {
      SyntheticSpec& s = *c.source.synthetic;
      if (given("--k-topics")) s.k_topics = spec.k_topics;
      if (given("--n-docs")) s.n_docs = spec.n_docs;
      if (given("--vocab-size")) s.vocab_size = spec.vocab_size;
      if (given("--doc-length-mean")) s.doc_length_mean = spec.doc_length_mean;
      if (given("--doc-length-dispersion")) s.doc_length_dispersion = spec.doc_length_dispersion;
      if (given("--topic-concentration")) s.topic_concentration = spec.topic_concentration;
      if (given("--zipf-exponent")) s.zipf_exponent = spec.zipf_exponent;
      if (given("--length-skew")) s.length_skew = spec.length_skew;
      if (given("--synth-seed")) s.seed = spec.seed;
    }
    if (given("--scalings")) {
      c.scalings.clear();
      for (const auto& s : split_list(scalings)) c.scalings.push_back(parse_scaling(s));
    }
    if (given("--loss")) c.loss = parse_loss(loss);
    if (given("--rank")) {
      c.ranks.clear();
      for (const auto& r : split_list(ranks)) {
        try {
          c.ranks.push_back(std::stol(r));
        } catch (const std::exception&) {
          throw UsageError("bad rank '" + r + "'");
        }
      }
    }
    if (given("--radius")) c.radius = radius;
    if (given("--seed")) c.seed = seed;
    if (given("--pwmi-times-n")) c.pwmi_times_n = pwmi_times_n;
    if (given("--spectrum-on-scaled")) c.spectrum_on = parse_scaling(spectrum_on_scaled.empty() ? "nl" : spectrum_on_scaled);
    if (given("--spectrum-count")) c.spectrum_count = spectrum_count;
    if (given("--min-token-len")) c.ingest.tokenizer.min_length = min_token_len;
    if (given("--rare-mass")) c.ingest.rare_mass = rare_mass;
    if (given("--no-prune")) c.ingest.prune = !no_prune;
    if (given("--out")) c.output_dir = out;
    if (given("--max-iter")) c.max_iter = max_iter;
    if (given("--tol")) c.tol = tol;
    if (given("--init")) c.init = parse_init(init);
    validate(c);
    return c;
  }
};

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void cmd_ingest(const ExperimentFlags& flags, std::ostream& out) {
  ExperimentConfig config = flags.build();
  if (!config.source.path) throw UsageError("ingest needs --input");
  std::vector<std::string> warnings;
  const PreparedCorpus corpus = prepare_corpus(config, &warnings);
  save_prepared(corpus, config.output_dir);
  Json summary{{"n_docs", corpus.matrix.n_docs()},
               {"n_terms", corpus.matrix.n_terms()},
               {"nnz", corpus.matrix.nnz()},
               {"total_count", corpus.matrix.total_count()},
               {"dropped_docs", corpus.dropped_docs.size()},
               {"labeled", corpus.labels.has_value()},
               {"out", config.output_dir.string()},
               {"warnings", warnings}};
  out << summary.dump(2) << '\n';
}

void cmd_spectrum(const ExperimentFlags& flags, std::ostream& out) {
  const ExperimentConfig config = flags.build();
  const PreparedCorpus corpus = prepare_corpus(config);
  const SpectrumResult spectrum = compute_spectrum(corpus.matrix, config);
  const Index max_rank = std::min(corpus.matrix.n_docs(), corpus.matrix.n_terms());
  Json j{{"source", spectrum.source}, {"spectrum", to_json(spectrum.spectrum)}, {"elbows", to_json(spectrum.elbow)}};
  if (max_rank - 1 >= 2) j["sweep"] = sweep_range(spectrum.elbow, config.radius, 2, max_rank - 1);
  if (flags.given("--out")) {
    auto file = open_output(config.output_dir);
    file << j.dump(2) << '\n';
  } else {
    out << j.dump(2) << '\n';
  }
}

void cmd_factorize(const ExperimentFlags& flags, std::ostream& out) {
  const ExperimentConfig config = flags.build();
  if (config.scalings.size() != 1) throw UsageError("factorize needs exactly one scaling (--scalings)");
  if (config.ranks.size() != 1) throw UsageError("factorize needs exactly one rank (--rank)");
  const PreparedCorpus corpus = prepare_corpus(config);
  const Index max_rank = std::min(corpus.matrix.n_docs(), corpus.matrix.n_terms());
  if (config.ranks.front() > max_rank) throw UsageError("rank exceeds min(n_docs, n_terms)");
  const CellRun run = run_cell(corpus, config.scalings.front(), config.ranks.front(), config);

  const auto& dir = config.output_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  NmfConfig nmf;
  nmf.rank = run.result.rank;
  nmf.loss = config.loss;
  nmf.max_iter = config.max_iter;
  nmf.tol = config.tol;
  nmf.seed = run.result.seed;
  nmf.init = config.init;
  {
    auto file = open_output(dir / "model.txt");
    write_model(file, run.model, nmf);
  }
  {
    auto file = open_output(dir / "post_scaled.txt");
    write_dense_triplets(file, run.factors.W);
    write_dense_triplets(file, run.factors.H);
  }
  {
    auto file = open_output(dir / "partition.csv");
    file << "id,topic\n";
    for (std::size_t i = 0; i < run.partition.size(); ++i) {
      file << run.partition.ids()[i] << ',' << run.partition.labels()[i] << '\n';
    }
  }
  Json summary{{"scaling", std::string(to_string(run.result.scaling))},
               {"rank", run.result.rank},
               {"seed", run.result.seed},
               {"converged", run.result.converged},
               {"iterations", run.result.iterations},
               {"objective", run.result.objective},
               {"residual_norm", run.result.residual_norm},
               {"ari", run.result.ari ? to_json(*run.result.ari) : Json(nullptr)}};
  {
    auto file = open_output(dir / "summary.json");
    file << summary.dump(2) << '\n';
  }
  out << summary.dump(2) << '\n';
}

void cmd_sweep(const ExperimentFlags& flags, std::ostream& out) {
  const ExperimentConfig config = flags.build();
  const ExperimentReport report = run_experiment(config);
  emit_report(report, config.output_dir);
  Json summary = report_json(report)["summary"];
  out << Json{{"out", config.output_dir.string()}, {"summary", summary}, {"warnings", report.warnings}}.dump(2)
      << '\n';
}

void cmd_synth(const ExperimentFlags& flags, const std::string& out_path, std::ostream& out) {
  SyntheticSpec spec;
  if (!flags.config_file.empty()) {
    std::ifstream in(flags.config_file);
    if (!in) throw UsageError("cannot open config file " + flags.config_file);
    Json j;
    try {
      j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw UsageError("config file " + flags.config_file + ": " + e.what());
    }
    apply_json(j.contains("synthetic") ? j["synthetic"] : j, spec);
  }
  const SyntheticSpec& f = flags.spec;
  if (flags.given("--k-topics")) spec.k_topics = f.k_topics;
  if (flags.given("--n-docs")) spec.n_docs = f.n_docs;
  if (flags.given("--vocab-size")) spec.vocab_size = f.vocab_size;
  if (flags.given("--doc-length-mean")) spec.doc_length_mean = f.doc_length_mean;
  if (flags.given("--doc-length-dispersion")) spec.doc_length_dispersion = f.doc_length_dispersion;
  if (flags.given("--topic-concentration")) spec.topic_concentration = f.topic_concentration;
  if (flags.given("--zipf-exponent")) spec.zipf_exponent = f.zipf_exponent;
  if (flags.given("--length-skew")) spec.length_skew = f.length_skew;
  if (flags.given("--synth-seed")) spec.seed = f.seed;

  const auto docs = generate_synthetic_corpus(spec);
  std::ostringstream body;
  for (const auto& d : docs) {
    body << nlohmann::json{{"id", d.id}, {"text", d.text}, {"label", *d.label}}.dump() << '\n';
  }
  if (out_path.empty() || out_path == "-") {
    out << body.str();
  } else {
    auto file = open_output(out_path);
    file << body.str();
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diagonally scaled NMF topic clustering"};
  app.require_subcommand(1);

  ExperimentFlags ingest_flags;
  auto* ingest_cmd = app.add_subcommand("ingest", "Corpus -> cached count matrix and prune report");
  ingest_flags.add(ingest_cmd, false);

  ExperimentFlags spectrum_flags;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Matrix -> singular values and elbows (JSON)");
  spectrum_flags.add(spectrum_cmd, true);

  ExperimentFlags factorize_flags;
  auto* factorize_cmd = app.add_subcommand("factorize", "One scaling and rank -> model and partition");
  factorize_flags.add(factorize_cmd, true);

  ExperimentFlags sweep_flags;
  auto* sweep_cmd = app.add_subcommand("sweep", "Full experiment -> results.csv, report.json, ari_vs_rank.svg");
  sweep_flags.add(sweep_cmd, true);

  ExperimentFlags synth_flags;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Synthetic spec -> JSONL corpus");
  synth_flags.opt(synth_cmd->add_option("--config", synth_flags.config_file, "JSON file with synthetic spec fields"));
  synth_cmd->add_option("--out", synth_out, "Output JSONL path (stdout when omitted)");
  synth_flags.add_synthetic(synth_cmd);

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("dsnmf");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*ingest_cmd) cmd_ingest(ingest_flags, out);
    if (*spectrum_cmd) cmd_spectrum(spectrum_flags, out);
    if (*factorize_cmd) cmd_factorize(factorize_flags, out);
    if (*sweep_cmd) cmd_sweep(sweep_flags, out);
    if (*synth_cmd) cmd_synth(synth_flags, synth_out, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace dsnmf
