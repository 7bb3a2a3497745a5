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


#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dsnmf/cli.hpp"
#include "dsnmf/serialize.hpp"

using namespace dsnmf;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("dsnmf_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::vector<std::string> kSmall{"--n-docs", "40", "--vocab-size", "80", "--k-topics", "2"};

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"sweep", "--bogus"}).code == kExitUsage);
  CHECK(cli({"sweep", "--synthetic", "--loss", "nope"}).code == kExitUsage);
  CHECK(cli({"sweep"}).code == kExitUsage);  // no corpus source
  CHECK(cli({"sweep", "--synthetic", "--config", "/nonexistent.json"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("data errors exit with 2") {
  const auto dir = temp_dir("data");
  const auto r = cli({"ingest", "--input", "/nonexistent/c.jsonl", "--out", (dir / "c").string()});
  CHECK(r.code == kExitData);
  CHECK(r.err.find("data error") != std::string::npos);
  std::ofstream(dir / "bad.jsonl") << "{\"id\":1}\n";
  CHECK(cli({"sweep", "--input", (dir / "bad.jsonl").string()}).code == kExitData);
  fs::remove_all(dir);
}

TEST_CASE("synth, ingest, spectrum, factorize and sweep chain together") {
  const auto dir = temp_dir("chain");
  auto synth = std::vector<std::string>{"synth", "--out", (dir / "c.jsonl").string()};
  synth.insert(synth.end(), kSmall.begin(), kSmall.end());
  REQUIRE(cli(synth).code == kExitOk);
  CHECK(fs::file_size(dir / "c.jsonl") > 0);

  const auto ingest = cli({"ingest", "--input", (dir / "c.jsonl").string(), "--out", (dir / "cache").string()});
  REQUIRE(ingest.code == kExitOk);
  CHECK(fs::exists(dir / "cache" / "matrix.tri"));
  CHECK(fs::exists(dir / "cache" / "prune_report.json"));

  const auto spectrum = cli({"spectrum", "--input", (dir / "cache").string(), "--format", "cache"});
  REQUIRE(spectrum.code == kExitOk);
  const auto sj = Json::parse(spectrum.out);
  CHECK(sj["spectrum"]["values"].size() > 2);
  CHECK(sj["elbows"]["second"].get<int>() > sj["elbows"]["first"].get<int>());

  const auto fact = cli({"factorize", "--input", (dir / "cache").string(), "--format", "cache", "--scalings", "nl",
                         "--rank", "2", "--out", (dir / "model").string()});
  REQUIRE(fact.code == kExitOk);
  for (const auto* f : {"model.txt", "post_scaled.txt", "partition.csv", "summary.json"}) {
    CHECK(fs::exists(dir / "model" / f));
  }
  CHECK(Json::parse(fact.out)["ari"]["ari"].get<double>() >= -1.0);
  CHECK(cli({"factorize", "--input", (dir / "cache").string(), "--format", "cache", "--rank", "2"}).code ==
        kExitUsage);  // needs one scaling

  const auto sweep = cli({"sweep", "--input", (dir / "cache").string(), "--format", "cache", "--rank", "2,3",
                          "--scalings", "none,nl", "--out", (dir / "sweep").string()});
  REQUIRE(sweep.code == kExitOk);
  const auto csv = slurp(dir / "sweep" / "results.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  fs::remove_all(dir);
}

TEST_CASE("flags override the config file") {
  const auto dir = temp_dir("config");
  std::ofstream(dir / "cfg.json") << R"({"synthetic": {"n_docs": 40, "vocab_size": 80, "k_topics": 2},
    "scalings": ["none", "rs"], "ranks": [2], "seed": 3})";
  const auto r = cli({"sweep", "--config", (dir / "cfg.json").string(), "--scalings", "nl", "--out",
                      (dir / "out").string()});
  REQUIRE(r.code == kExitOk);
  const auto report = Json::parse(slurp(dir / "out" / "report.json"));
  CHECK(report["config"]["scalings"] == Json::array({"nl"}));
  CHECK(report["config"]["seed"] == 3);
  CHECK(report["config"]["synthetic"]["n_docs"] == 40);
  CHECK(report["results"].size() == 1);

  // A synthetic knob on the command line overrides the file too.
  const auto r2 = cli({"sweep", "--config", (dir / "cfg.json").string(), "--n-docs", "30", "--out",
                       (dir / "out2").string()});
  REQUIRE(r2.code == kExitOk);
  CHECK(Json::parse(slurp(dir / "out2" / "report.json"))["corpus"]["n_docs"] == 30);
  fs::remove_all(dir);
}

TEST_CASE("spectrum on a scaled matrix and PWMI times n") {
  auto args = std::vector<std::string>{"spectrum", "--synthetic", "--spectrum-on-scaled", "nl"};
  args.insert(args.end(), kSmall.begin(), kSmall.end());
  const auto r = cli(args);
  REQUIRE(r.code == kExitOk);
  const auto j = Json::parse(r.out);
  CHECK(j["source"] == "nl");
  CHECK(j["spectrum"]["values"][0].get<double>() <= 1 + 1e-8);

  auto sweep = std::vector<std::string>{"sweep", "--synthetic", "--pwmi-times-n", "--scalings", "pwmi", "--rank", "2",
                                        "--out", (temp_dir("pwmi") / "o").string()};
  sweep.insert(sweep.end(), kSmall.begin(), kSmall.end());
  CHECK(cli(sweep).code == kExitOk);
}
