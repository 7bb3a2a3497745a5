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
#include <vector>

#include "dsnmf/corpus.hpp"

namespace dsnmf {

// Generative knobs for a labeled bag-of-words corpus.
//
// Each topic is a Dirichlet draw whose base measure is Zipfian over the
// vocabulary (weight of term rank r proportional to (r + 1)^-zipf_exponent)
// with total mass topic_concentration * vocab_size. Documents pick a topic
// uniformly, an expected length from a log-uniform model whose extremes
// differ by length_skew, a realized length from a gamma-Poisson mixture with
// the given dispersion, and then i.i.d. tokens "t<index>" from their topic.
struct SyntheticSpec {
  int k_topics = 5;
  int n_docs = 200;
  int vocab_size = 500;
  double doc_length_mean = 100.0;
  /// Gamma shape of the length mixture; larger means closer to Poisson.
  double doc_length_dispersion = 10.0;
  double topic_concentration = 0.05;
  double zipf_exponent = 1.1;
  double length_skew = 10.0;
  std::uint64_t seed = 1;
};

/// Throws UsageError when the spec cannot be sampled.
void validate(const SyntheticSpec& spec);

/// Labels are topic indices rendered as strings; ids are "doc<i>".
std::vector<RawDocument> generate_synthetic_corpus(const SyntheticSpec& spec);

}  // namespace dsnmf
