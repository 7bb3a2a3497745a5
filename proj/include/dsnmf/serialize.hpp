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

#include <iosfwd>

#include <json.hpp>

#include "dsnmf/cluster_eval.hpp"
#include "dsnmf/corpus.hpp"
#include "dsnmf/nmf.hpp"
#include "dsnmf/rank.hpp"

namespace dsnmf {

using Json = nlohmann::ordered_json;

Json to_json(const PruneReport& report);
PruneReport prune_report_from_json(const Json& j);

Json to_json(const AriReport& report);
Json to_json(const SingularSpectrum& spectrum);
Json to_json(const ElbowEstimate& elbow);
Json to_json(const NmfConfig& config);
NmfConfig nmf_config_from_json(const Json& j);

// Model file: one line of JSON header (config, objective_history, converged,
// iterations, residual_norm) followed by W and H as dense triplet blocks.
void write_model(std::ostream& out, const NmfModel& model, const NmfConfig& config);

struct StoredModel {
  NmfModel model;
  NmfConfig config;
};

StoredModel read_model(std::istream& in);

}  // namespace dsnmf
