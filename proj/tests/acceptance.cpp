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


// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Time budgets are reported alongside each result and enforced.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "dsnmf/cli.hpp"
#include "dsnmf/cluster_eval.hpp"
#include "dsnmf/corpus.hpp"
#include "dsnmf/harness.hpp"
#include "dsnmf/nmf.hpp"
#include "dsnmf/rank.hpp"
#include "dsnmf/scaling.hpp"
#include "oracles.hpp"

using namespace dsnmf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

std::string fmt(const char* f, double v) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// 1. Scaling identities.
Outcome scaling_identities() {
  Outcome o;
  std::mt19937_64 rng(101);
  double worst_pwmi = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Index n = std::uniform_int_distribution<Index>(1, 50)(rng);
    const Index m = std::uniform_int_distribution<Index>(1, 80)(rng);
    const auto dt = DocTermMatrix::from_dense(oracle::random_positive_sparse(rng, n, m, 0.2));
    const Matrix rs(apply_scaling(dt, ScalingKind::RowScaling).matrix);
    const Matrix cs(apply_scaling(dt, ScalingKind::ColumnScaling).matrix);
    const Matrix nl(apply_scaling(dt, ScalingKind::NormalizedLaplacian).matrix);
    const Matrix pw(apply_scaling(dt, ScalingKind::Pwmi).matrix);
    const Vector r = dt.dense().rowwise().sum();
    const Vector c = dt.dense().colwise().sum().transpose();
    o.require((rs.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12, "RS row sums");
    o.require((cs.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12, "CS column sums");
    o.require(nl.minCoeff() >= 0.0 && nl.maxCoeff() <= 1.0, "NL entries outside [0,1]");
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < m; ++j) {
        if (nl(i, j) == 0.0 && pw(i, j) == 0.0) continue;
        worst_pwmi = std::max(worst_pwmi, rel_diff(pw(i, j), nl(i, j) / std::sqrt(r(i) * c(j))));
      }
  }
  o.require(worst_pwmi <= 1e-12, "PWMI vs NL/sqrt(r c)");
  if (o.pass) o.detail = "100 matrices, worst PWMI identity error " + fmt("%.2e", worst_pwmi);
  return o;
}

// 2. NL spectral bound.
Outcome nl_spectral_bound() {
  Outcome o;
  std::mt19937_64 rng(202);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Index n = std::uniform_int_distribution<Index>(2, 120)(rng);
    const Index m = std::uniform_int_distribution<Index>(2, 160)(rng);
    const auto dt = DocTermMatrix::from_dense(oracle::random_counts(rng, n, m, 0.15, 30));
    const auto s = apply_scaling(dt, ScalingKind::NormalizedLaplacian);
    const auto report = nl_singular_bound_check(s);
    // Independent check of the leading value.
    const double oracle_max = oracle::singular_values(Matrix(s.matrix), 1)[0];
    worst = std::max({worst, report.sigma_max, oracle_max});
    o.require(report.within_unit && oracle_max <= 1 + 1e-8, "sigma_max above 1 + 1e-8");
  }
  if (o.pass) o.detail = "50 matrices, largest sigma_max " + fmt("%.15f", worst);
  return o;
}

// 3. Loss homogeneity.
Outcome loss_homogeneity() {
  Outcome o;
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double x = std::exp(u(rng));
    const double y = std::exp(u(rng));
    const double a = std::exp(u(rng));
    const double fro = rel_diff(component_loss(a * x, a * y, BetaLoss::frobenius()),
                                a * a * component_loss(x, y, BetaLoss::frobenius()));
    const double kl = rel_diff(component_loss(a * x, a * y, BetaLoss::kullback_leibler()),
                               a * component_loss(x, y, BetaLoss::kullback_leibler()));
    const double is = rel_diff(component_loss(a * x, a * y, BetaLoss::itakura_saito()),
                               component_loss(x, y, BetaLoss::itakura_saito()));
    // The bare x log(x/y) summand scales by alpha as well.
    const double kls = rel_diff(kl_summand(a * x, a * y), a * kl_summand(x, y));
    worst = std::max({worst, fro, kl, is, kls});
  }
  o.require(worst <= 1e-12, "homogeneity error " + fmt("%.2e", worst));
  if (o.pass) o.detail = "100 triples, worst relative error " + fmt("%.2e", worst);
  return o;
}

// 4. NMF correctness.
Outcome nmf_correctness() {
  Outcome o;
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const double beta : {1.0, 2.0}) {
    for (int t = 0; t < 20; ++t) {
      const Matrix m = oracle::random_counts(rng, 20, 15, 0.5, 10);
      NmfConfig c;
      c.rank = 5;
      c.loss = BetaLoss{beta};
      c.seed = static_cast<std::uint64_t>(t);
      bool non_negative = true;
      const auto model = factorize(SparseMatrix(m.sparseView()), c, [&](int, const Matrix& w, const Matrix& h) {
        non_negative = non_negative && w.minCoeff() >= 0.0 && h.minCoeff() >= 0.0;
      });
      const auto& hist = model.objective_history;
      for (std::size_t i = 1; i < hist.size(); ++i) {
        o.require(hist[i] <= hist[i - 1] + 1e-10 * std::max(1.0, std::abs(hist[i - 1])),
                  "objective increased (beta " + fmt("%.0f", beta) + ")");
      }
      o.require(non_negative, "negative factor entry");
    }
  }
  Matrix w(40, 3), h(3, 60);
  for (Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
  for (Index i = 0; i < h.size(); ++i) h.data()[i] = u(rng);
  const Matrix m = w * h;
  NmfConfig c;
  c.rank = 3;
  c.max_iter = 500;
  c.tol = 0.0;
  bool non_negative = true;
  const auto model = factorize(m, c, [&](int, const Matrix& a, const Matrix& b) {
    non_negative = non_negative && a.minCoeff() >= 0.0 && b.minCoeff() >= 0.0;
  });
  const double residual = (m - model.W * model.H).norm() / m.norm();
  o.require(model.iterations <= 500 && residual < 1e-3, "planted recovery residual " + fmt("%.2e", residual));
  o.require(non_negative, "negative factor entry in planted run");
  if (o.pass) o.detail = "40 monotone runs; planted residual " + fmt("%.2e", residual) + " after " +
                         std::to_string(model.iterations) + " iterations";
  return o;
}

// 5. Oracle equivalence.
Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(505);
  for (int t = 0; t < 100; ++t) {
    const std::size_t p = std::uniform_int_distribution<std::size_t>(2, 200)(rng);
    std::vector<double> v(p);
    std::exponential_distribution<double> e(1.0);
    for (auto& x : v) x = e(rng) * 50.0;
    std::sort(v.rbegin(), v.rend());
    o.require(zg_elbow(v) == oracle::zg_elbow(v), "zg_elbow mismatch");
  }
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = std::uniform_int_distribution<std::size_t>(1, 50)(rng);
    const int k1 = std::uniform_int_distribution<int>(1, 8)(rng);
    const int k2 = std::uniform_int_distribution<int>(1, 8)(rng);
    std::vector<int> a(m), b(m);
    std::vector<std::string> ids(m);
    for (std::size_t i = 0; i < m; ++i) {
      a[i] = std::uniform_int_distribution<int>(0, k1 - 1)(rng);
      b[i] = std::uniform_int_distribution<int>(0, k2 - 1)(rng);
      ids[i] = std::to_string(i);
    }
    const Partition pa(ids, a), pb(ids, b);
    o.require(std::abs(adjusted_rand_index(pa, pb) - oracle::adjusted_rand_index(a, b)) <= 1e-12, "ARI mismatch");
    o.require(std::abs(rand_index(pa, pb) - oracle::rand_index(a, b)) <= 1e-12, "Rand mismatch");
  }
  SvdOptions lanczos;
  lanczos.dense_threshold = 0;
  for (int t = 0; t < 20; ++t) {
    const Index n = std::uniform_int_distribution<Index>(2, 64)(rng);
    const Index m = std::uniform_int_distribution<Index>(2, 64)(rng);
    const Matrix a = oracle::random_counts(rng, n, m, 0.3, 10);
    const Index count = std::min(n, m);
    const auto expect = oracle::singular_values(a, count);
    for (const auto& opts : {SvdOptions{}, lanczos}) {
      const auto got = singular_values(SparseMatrix(a.sparseView()), count, opts).values;
      for (Index i = 0; i < count; ++i) {
        o.require(std::abs(got[i] - expect[i]) <= 1e-8 * expect[0], "singular value mismatch");
      }
    }
  }
  for (int t = 0; t < 50; ++t) {
    const std::size_t m = std::uniform_int_distribution<std::size_t>(4, 1000)(rng);
    std::vector<std::uint64_t> counts(m);
    std::lognormal_distribution<double> ln(1.5, 1.8);
    for (auto& c : counts) c = 1 + static_cast<std::uint64_t>(ln(rng));
    std::sort(counts.rbegin(), counts.rend());
    o.require(common_token_split(counts) == oracle::common_split(counts), "change point mismatch");
  }
  if (o.pass) o.detail = "100 spectra, 100 partition pairs, 40 SVDs, 50 count profiles";
  return o;
}

// 6. Argmax invariance.
Outcome argmax_invariance() {
  Outcome o;
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const Index n = std::uniform_int_distribution<Index>(1, 60)(rng);
    const Index k = std::uniform_int_distribution<Index>(1, 12)(rng);
    Matrix w(n, k);
    for (Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
    Vector d(n);
    for (Index i = 0; i < n; ++i) d(i) = std::exp(10.0 * (u(rng) - 0.5));
    std::vector<std::string> ids(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = std::to_string(i);
    const Matrix dw = d.asDiagonal() * w;
    o.require(assign_clusters(dw, ids).labels() == assign_clusters(w, ids).labels(), "partition changed");
  }
  if (o.pass) o.detail = "50 random (W, D) pairs";
  return o;
}

ExperimentConfig replica_config() {
  ExperimentConfig c;
  SyntheticSpec spec;
  spec.k_topics = 5;
  spec.n_docs = 200;
  spec.vocab_size = 500;
  spec.topic_concentration = 0.05;
  spec.length_skew = 10.0;
  spec.zipf_exponent = 1.1;
  spec.seed = 1;
  c.source.synthetic = spec;
  c.seed = 0;
  return c;
}

// 7. Qualitative replica on the planted corpus.
Outcome two_truths_replica() {
  Outcome o;
  const auto report = run_experiment(replica_config());
  const double nl = best_ari(report, ScalingKind::NormalizedLaplacian).value_or(-2.0);
  const double counts = best_ari(report, ScalingKind::Counts).value_or(-2.0);
  const auto second = static_cast<int>(report.spectrum.elbow.second);
  o.require(nl >= 0.8, "NL best ARI " + fmt("%.4f", nl) + " < 0.8");
  o.require(nl >= counts, "NL best ARI " + fmt("%.4f", nl) + " < Counts " + fmt("%.4f", counts));
  o.require(std::abs(second - 5) <= 3, "second elbow " + std::to_string(second));
  o.detail = "NL best ARI " + fmt("%.4f", nl) + ", Counts best ARI " + fmt("%.4f", counts) + ", second elbow " +
             std::to_string(second) + (o.pass ? "" : " (" + o.detail + ")");
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 8. Pipeline determinism through the CLI.
Outcome pipeline_determinism() {
  Outcome o;
  const auto root = fs::temp_directory_path() / "dsnmf_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  std::ostringstream sink;
  const std::vector<std::string> corpus_args{"synth", "--out", (root / "corpus.jsonl").string()};
  o.require(run_cli(corpus_args, sink, sink) == kExitOk, "synth failed");
  for (const char* run : {"a", "b"}) {
    const std::vector<std::string> args{"sweep",  "--input", (root / "corpus.jsonl").string(),
                                        "--seed", "7",       "--out",
                                        (root / run).string()};
    o.require(run_cli(args, sink, sink) == kExitOk, "sweep failed");
  }
  o.require(slurp(root / "a" / "results.csv") == slurp(root / "b" / "results.csv"), "results.csv differs");
  o.require(slurp(root / "a" / "report.json") == slurp(root / "b" / "report.json"), "report.json differs");
  o.require(!slurp(root / "a" / "results.csv").empty(), "results.csv empty");
  if (o.pass) o.detail = "two sweeps byte-identical";
  fs::remove_all(root);
  return o;
}

// 9. Rare-token guarantee.
Outcome rare_token_guarantee() {
  Outcome o;
  std::mt19937_64 rng(909);
  double worst = 1.0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t size = std::uniform_int_distribution<std::size_t>(1, 5000)(rng);
    std::vector<std::pair<std::string, std::uint64_t>> entries;
    std::lognormal_distribution<double> ln(1.0, 2.0);
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < size; ++i) {
      entries.emplace_back("w" + std::to_string(i), 1 + static_cast<std::uint64_t>(ln(rng)));
      total += entries.back().second;
    }
    const auto [kept, report] = remove_rare_tokens(Vocabulary(entries));
    const double mass = static_cast<double>(kept.total()) / static_cast<double>(total);
    worst = std::min(worst, mass);
    o.require(mass >= 0.99, "kept mass " + fmt("%.6f", mass));
  }
  if (o.pass) o.detail = "20 vocabularies, smallest kept mass " + fmt("%.6f", worst);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "scaling identities", 5, scaling_identities},
      {2, "NL spectral bound", 10, nl_spectral_bound},
      {3, "loss homogeneity", 1, loss_homogeneity},
      {4, "NMF correctness", 30, nmf_correctness},
      {5, "oracle equivalence", 20, oracle_equivalence},
      {6, "argmax invariance", 1, argmax_invariance},
      {7, "qualitative replica", 120, two_truths_replica},
      {8, "pipeline determinism", 60, pipeline_determinism},
      {9, "rare-token guarantee", 1, rare_token_guarantee},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = outcome.pass && in_time;
    if (!pass) ++failures;
    std::printf("[%s] criterion %d (%s): %s [%.2fs / %.0fs budget%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                outcome.detail.c_str(), secs, c.budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
