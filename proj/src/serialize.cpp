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


#include "dsnmf/serialize.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "dsnmf/error.hpp"

namespace dsnmf {

namespace {

Json term_counts(const std::vector<std::pair<std::string, std::uint64_t>>& entries) {
  Json out = Json::array();
  for (const auto& [term, count] : entries) out.push_back(Json::array({term, count}));
  return out;
}

std::vector<std::pair<std::string, std::uint64_t>> term_counts_from(const Json& j) {
  std::vector<std::pair<std::string, std::uint64_t>> out;
  for (const auto& e : j) out.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::uint64_t>());
  return out;
}

}  // namespace

Json to_json(const PruneReport& r) {
  Json j;
  j["common_removed"] = term_counts(r.common_removed);
  j["rare_removed"] = term_counts(r.rare_removed);
  j["common_threshold"] = r.common_threshold ? Json(*r.common_threshold) : Json(nullptr);
  j["rare_mass_kept"] = r.rare_mass_kept;
  return j;
}

PruneReport prune_report_from_json(const Json& j) {
  try {
    PruneReport r;
    r.common_removed = term_counts_from(j.at("common_removed"));
    r.rare_removed = term_counts_from(j.at("rare_removed"));
    if (!j.at("common_threshold").is_null()) r.common_threshold = j.at("common_threshold").get<std::uint64_t>();
    r.rare_mass_kept = j.at("rare_mass_kept").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed prune report: ") + e.what());
  }
}

Json to_json(const AriReport& r) {
  return Json{{"ari", r.ari}, {"rand", r.rand}, {"k_pred", r.k_pred}, {"k_true", r.k_true}};
}

Json to_json(const SingularSpectrum& s) {
  return Json{{"rows", s.rows}, {"cols", s.cols}, {"values", s.values}};
}

Json to_json(const ElbowEstimate& e) {
  return Json{{"first", e.first}, {"second", e.second}, {"degenerate", e.degenerate}};
}

Json to_json(const NmfConfig& c) {
  return Json{{"rank", c.rank},       {"loss", to_string(c.loss)}, {"beta", c.loss.beta},
              {"max_iter", c.max_iter}, {"tol", c.tol},            {"seed", c.seed},
              {"init", to_string(c.init)}, {"epsilon", c.epsilon}};
}

NmfConfig nmf_config_from_json(const Json& j) {
  try {
    NmfConfig c;
    c.rank = j.at("rank").get<Index>();
    c.loss = BetaLoss{j.at("beta").get<double>()};
    c.max_iter = j.at("max_iter").get<int>();
    c.tol = j.at("tol").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.init = parse_init(j.at("init").get<std::string>());
    c.epsilon = j.at("epsilon").get<double>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed NMF config: ") + e.what());
  }
}

void write_model(std::ostream& out, const NmfModel& model, const NmfConfig& config) {
  Json header{{"config", to_json(config)},
              {"objective_history", model.objective_history},
              {"converged", model.converged},
              {"iterations", model.iterations},
              {"residual_norm", model.residual_norm}};
  out << header.dump() << '\n';
  write_dense_triplets(out, model.W);
  write_dense_triplets(out, model.H);
}

StoredModel read_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("model file: missing header");
  StoredModel stored;
  try {
    const Json header = Json::parse(line);
    stored.config = nmf_config_from_json(header.at("config"));
    stored.model.objective_history = header.at("objective_history").get<std::vector<double>>();
    stored.model.converged = header.at("converged").get<bool>();
    stored.model.iterations = header.at("iterations").get<int>();
    stored.model.residual_norm = header.at("residual_norm").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model file: malformed header: ") + e.what());
  }
  stored.model.W = read_dense_triplets(in);
  stored.model.H = read_dense_triplets(in);
  if (stored.model.W.cols() != stored.model.H.rows()) throw DataError("model file: W and H ranks disagree");
  return stored;
}

}  // namespace dsnmf
