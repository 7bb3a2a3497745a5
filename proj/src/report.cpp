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


#include "dsnmf/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dsnmf/error.hpp"

namespace dsnmf {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string_view colour(ScalingKind kind) {
  switch (kind) {
    case ScalingKind::Counts: return "#7f7f7f";
    case ScalingKind::RowScaling: return "#1f77b4";
    case ScalingKind::ColumnScaling: return "#2ca02c";
    case ScalingKind::NormalizedLaplacian: return "#d62728";
    case ScalingKind::Pwmi: return "#9467bd";
  }
  return "#000000";
}

std::vector<ScalingKind> scalings_in(const ExperimentReport& report) {
  std::vector<ScalingKind> kinds;
  for (const auto& c : report.cells) {
    if (std::find(kinds.begin(), kinds.end(), c.scaling) == kinds.end()) kinds.push_back(c.scaling);
  }
  return kinds;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace

std::string results_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "scaling,rank,ari,rand,converged,iterations,objective\n";
  for (const auto& c : report.cells) {
    out << to_string(c.scaling) << ',' << c.rank << ',';
    if (c.ari) out << fixed(c.ari->ari, 6);
    out << ',';
    if (c.ari) out << fixed(c.ari->rand, 6);
    out << ',' << (c.converged ? "true" : "false") << ',' << c.iterations << ',' << general(c.objective) << '\n';
  }
  return out.str();
}

Json report_json(const ExperimentReport& report) {
  Json j;
  j["provenance"] = Json{{"config_hash", report.config_hash}, {"seed", report.seed}};
  j["config"] = report.config;
  j["corpus"] = Json{{"n_docs", report.n_docs},
                     {"n_terms", report.n_terms},
                     {"nnz", report.nnz},
                     {"total_count", report.total_count},
                     {"dropped_docs", report.dropped_docs}};
  j["prune_report"] = report.prune ? to_json(*report.prune) : Json(nullptr);
  j["spectrum"] = to_json(report.spectrum.spectrum);
  j["spectrum"]["source"] = report.spectrum.source;
  j["elbows"] = to_json(report.spectrum.elbow);
  j["ranks"] = report.ranks;

  Json cells = Json::array();
  for (const auto& c : report.cells) {
    Json cell{{"scaling", std::string(to_string(c.scaling))},
              {"rank", c.rank},
              {"seed", c.seed},
              {"ari", c.ari ? to_json(*c.ari) : Json(nullptr)},
              {"converged", c.converged},
              {"iterations", c.iterations},
              {"objective", c.objective},
              {"residual_norm", c.residual_norm}};
    cells.push_back(std::move(cell));
  }
  j["results"] = std::move(cells);

  Json summary = Json::object();
  for (const auto kind : scalings_in(report)) {
    const auto best = best_ari(report, kind);
    Index best_rank = 0;
    for (const auto& c : report.cells) {
      if (best && c.scaling == kind && c.ari && c.ari->ari == *best) {
        best_rank = c.rank;
        break;
      }
    }
    summary[std::string(to_string(kind))] =
        best ? Json{{"best_ari", *best}, {"best_rank", best_rank}} : Json{{"best_ari", nullptr}, {"best_rank", nullptr}};
  }
  j["summary"] = std::move(summary);
  j["warnings"] = report.warnings;
  return j;
}

std::string ari_svg(const ExperimentReport& report) {
  constexpr double width = 720.0;
  constexpr double height = 440.0;
  constexpr double left = 60.0;
  constexpr double right = 140.0;
  constexpr double top = 30.0;
  constexpr double bottom = 50.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  Index r_min = report.ranks.empty() ? 0 : report.ranks.front();
  Index r_max = report.ranks.empty() ? 1 : report.ranks.back();
  if (r_max == r_min) ++r_max;
  double y_min = 0.0;
  for (const auto& c : report.cells) {
    if (c.ari) y_min = std::min(y_min, c.ari->ari);
  }
  const double y_max = 1.0;
  auto x_of = [&](Index r) { return left + plot_w * static_cast<double>(r - r_min) / static_cast<double>(r_max - r_min); };
  auto y_of = [&](double a) { return top + plot_h * (y_max - a) / (y_max - y_min); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << left << "\" y=\"18\">Adjusted Rand index by rank</text>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
      << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double a = y_min + (y_max - y_min) * t / 4.0;
    svg << "<text x=\"" << left - 8 << "\" y=\"" << fixed(y_of(a) + 4, 1) << "\" text-anchor=\"end\">" << fixed(a, 2)
        << "</text>\n";
  }
  for (const Index r : report.ranks) {
    svg << "<text x=\"" << fixed(x_of(r), 1) << "\" y=\"" << top + plot_h + 16 << "\" text-anchor=\"middle\">" << r
        << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">rank</text>\n";
  svg << "<text x=\"16\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 16 " << top + plot_h / 2
      << ")\" text-anchor=\"middle\">ARI</text>\n";

  const auto kinds = scalings_in(report);
  for (std::size_t s = 0; s < kinds.size(); ++s) {
    const ScalingKind kind = kinds[s];
    svg << "<polyline fill=\"none\" stroke=\"" << colour(kind) << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (const auto& c : report.cells) {
      if (c.scaling != kind || !c.ari) continue;
      if (!first) svg << ' ';
      svg << fixed(x_of(c.rank), 1) << ',' << fixed(y_of(c.ari->ari), 1);
      first = false;
    }
    svg << "\"/>\n";
    const double ly = top + 10 + 20.0 * static_cast<double>(s);
    const double lx = left + plot_w + 20;
    svg << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 24 << "\" y2=\"" << ly << "\" stroke=\""
        << colour(kind) << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << lx + 30 << "\" y=\"" << ly + 4 << "\">" << display_name(kind) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw DataError("cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
  }
  write_file(dir / "results.csv", results_csv(report));
  write_file(dir / "report.json", report_json(report).dump(2) + "\n");
  write_file(dir / "ari_vs_rank.svg", ari_svg(report));
}

}  // namespace dsnmf
