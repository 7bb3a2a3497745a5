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


#include "dsnmf/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "dsnmf/error.hpp"

namespace dsnmf {

void validate(const SyntheticSpec& s) {
  if (s.k_topics < 1) throw UsageError("synthetic: k_topics must be positive");
  if (s.n_docs < s.k_topics) throw UsageError("synthetic: n_docs must be at least k_topics");
  if (s.vocab_size < 2 * s.k_topics) throw UsageError("synthetic: vocab_size must be at least 2 * k_topics");
  if (!(s.doc_length_mean >= 1.0)) throw UsageError("synthetic: doc_length_mean must be at least 1");
  if (!(s.doc_length_dispersion > 0.0)) throw UsageError("synthetic: doc_length_dispersion must be positive");
  if (!(s.topic_concentration > 0.0)) throw UsageError("synthetic: topic_concentration must be positive");
  if (!(s.zipf_exponent >= 0.0)) throw UsageError("synthetic: zipf_exponent must be non-negative");
  if (!(s.length_skew >= 1.0)) throw UsageError("synthetic: length_skew must be at least 1");
}

std::vector<RawDocument> generate_synthetic_corpus(const SyntheticSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  const auto v = static_cast<std::size_t>(spec.vocab_size);

  std::vector<double> base(v);
  double base_sum = 0.0;
  for (std::size_t r = 0; r < v; ++r) {
    base[r] = std::pow(static_cast<double>(r + 1), -spec.zipf_exponent);
    base_sum += base[r];
  }
  const double mass = spec.topic_concentration * static_cast<double>(v);

  std::vector<std::discrete_distribution<std::size_t>> topics;
  topics.reserve(static_cast<std::size_t>(spec.k_topics));
  std::vector<double> weights(v);
  for (int t = 0; t < spec.k_topics; ++t) {
    double total = 0.0;
    for (std::size_t r = 0; r < v; ++r) {
      std::gamma_distribution<double> gamma(std::max(mass * base[r] / base_sum, 1e-12), 1.0);
      weights[r] = gamma(rng);
      total += weights[r];
    }
    if (!(total > 0.0)) weights.assign(v, 1.0);
    topics.emplace_back(weights.begin(), weights.end());
  }

  // Log-uniform length factor on [1/sqrt(skew), sqrt(skew)], normalized to mean 1.
  const double half_log = 0.5 * std::log(spec.length_skew);
  const double factor_mean =
      half_log > 0.0 ? (std::sqrt(spec.length_skew) - 1.0 / std::sqrt(spec.length_skew)) / (2.0 * half_log) : 1.0;

  std::uniform_int_distribution<int> pick_topic(0, spec.k_topics - 1);
  std::uniform_real_distribution<double> unit(-half_log, half_log);

  const std::size_t width = std::to_string(spec.n_docs - 1).size();
  std::vector<RawDocument> docs;
  docs.reserve(static_cast<std::size_t>(spec.n_docs));
  for (int d = 0; d < spec.n_docs; ++d) {
    const int topic = pick_topic(rng);
    const double expected = spec.doc_length_mean * std::exp(unit(rng)) / factor_mean;
    std::gamma_distribution<double> rate(spec.doc_length_dispersion, expected / spec.doc_length_dispersion);
    std::poisson_distribution<long> length_dist(std::max(rate(rng), 1e-9));
    const long length = std::max<long>(1, length_dist(rng));

    std::string text;
    text.reserve(static_cast<std::size_t>(length) * 5);
    auto& words = topics[static_cast<std::size_t>(topic)];
    for (long i = 0; i < length; ++i) {
      if (i > 0) text.push_back(' ');
      text += 't';
      text += std::to_string(words(rng));
    }
    std::string id = std::to_string(d);
    id.insert(0, width - std::min(width, id.size()), '0');
    docs.push_back({"doc" + id, std::move(text), std::to_string(topic)});
  }
  return docs;
}

}  // namespace dsnmf
