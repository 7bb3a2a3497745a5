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

#include <filesystem>
#include <string>

#include "dsnmf/harness.hpp"

namespace dsnmf {

/// results.csv: scaling,rank,ari,rand,converged,iterations,objective
/// (ari and rand are empty when the corpus is unlabeled).
std::string results_csv(const ExperimentReport& report);

/// Everything in the report plus per-scaling best ARI.
Json report_json(const ExperimentReport& report);

/// ARI against rank, one polyline per scaling with a legend.
std::string ari_svg(const ExperimentReport& report);

/// Writes results.csv, report.json and ari_vs_rank.svg into `dir`,
/// creating it if needed. Throws DataError when the directory is unwritable.
void emit_report(const ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace dsnmf
