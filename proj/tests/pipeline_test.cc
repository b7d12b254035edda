// Copyright 2026 The sznet Authors.
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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "doctest.h"
#include "sznet/connectivity.h"
#include "sznet/csv.h"
#include "sznet/dump.h"
#include "sznet/error.h"
#include "sznet/pipeline.h"
#include "sznet/report.h"
#include "sznet/synth.h"
#include "test_util.h"

namespace sznet {
namespace {

namespace fs = std::filesystem;
using testing::ReadFile;
using testing::TempDir;

// Every regular file under root, keyed by relative path.
std::map<std::string, std::string> Tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = ReadFile(e.path());
  }
  return out;
}

// The root manifest echoes output_dir; blank it so trees from different
// directories compare.
void BlankOutputDir(std::map<std::string, std::string>& tree, const fs::path& out) {
  std::string& m = tree.at("manifest.json");
  const std::string needle = out.string();
  for (std::size_t p = m.find(needle); p != std::string::npos; p = m.find(needle)) {
    m.replace(p, needle.size(), "<out>");
  }
}

int Cli(const std::string& args) {
  const int status = std::system(fmt::format("\"{}\" {} >/dev/null 2>&1", SZNET_CLI_PATH, args).c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Synthetic dataset shared by the end-to-end cases.
const fs::path& Dataset() {
  static TempDir dir("pipeline_data");
  static const bool written = [] {
    WriteSyntheticPatient(dir.path(), DefaultThreeStateFixture());
    return true;
  }();
  (void)written;
  return dir.path();
}

RunConfig FixtureConfig(const fs::path& out) {
  RunConfig c;
  c.dataset_root = Dataset();
  c.patients = {"syn01"};
  c.output_dir = out;
  return c;
}

TEST_CASE("config parsing resolves paths and rejects unknown fields") {
  const RunConfig c = ParseRunConfig(
      R"({"dataset_root": "data", "patients": ["chb05"], "output_dir": "/abs/out",
          "k_max": 9, "bands": [{"name": "hg", "low_hz": 60, "high_hz": 80}],
          "filters": {"notch_low_hz": 48, "notch_high_hz": 52}})",
      "/cfg");
  CHECK(c.dataset_root == fs::path("/cfg/data"));
  CHECK(c.output_dir == fs::path("/abs/out"));
  CHECK(c.k_max == 9);
  REQUIRE(c.bands.size() == 1);
  CHECK(c.bands[0].name == "hg");
  CHECK(c.filters.notch_low_hz == 48.0);
  CHECK(c.window_s == 2.0);
  CHECK(c.hop_s == 1.0);

  const RunConfig back = ParseRunConfig(RunConfigJson(c));
  CHECK(RunConfigJson(back) == RunConfigJson(c));

  for (const char* bad : {R"({"patient": ["a"]})", R"({"filters": {"notch_hz": 50}})",
                          R"({"k_max": "ten"})", R"([1, 2])", "{not json"}) {
    CAPTURE(bad);
    try {
      ParseRunConfig(bad);
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kValidation);
    }
  }
}

TEST_CASE("empty patient list is a validation error before any output") {
  TempDir tmp("empty_patients");
  RunConfig c = FixtureConfig(tmp / "out");
  c.patients.clear();
  try {
    RunPipeline(c);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kValidation);
    CHECK(ExitCodeForError(e) == kExitValidation);
  }
  CHECK_FALSE(fs::exists(tmp / "out"));
}

TEST_CASE("validation checks parameters and referenced paths") {
  TempDir tmp("validate");
  const auto expect_invalid = [](const RunConfig& c, bool require) {
    CHECK_THROWS_AS(ValidateRunConfig(c, require), Error);
  };
  RunConfig c = FixtureConfig(tmp / "out");
  CHECK_NOTHROW(ValidateRunConfig(c, true));
  RunConfig bad = c;
  bad.patients = {"syn01", "syn01"};
  expect_invalid(bad, false);
  bad = c;
  bad.patients = {"nobody"};
  expect_invalid(bad, true);
  CHECK_NOTHROW(ValidateRunConfig(bad, false));
  bad = c;
  bad.dataset_root = tmp / "missing";
  expect_invalid(bad, true);
  bad = c;
  bad.split_ratio = 1.0;
  expect_invalid(bad, false);
  bad = c;
  bad.k_max = 2;
  expect_invalid(bad, false);
  bad = c;
  bad.bands.push_back(bad.bands.front());
  expect_invalid(bad, false);
  bad = c;
  bad.bands = {{"a/b", 8, 13}};
  expect_invalid(bad, false);
  bad = c;
  bad.workers = 0;
  expect_invalid(bad, false);
}

TEST_CASE("stage names round-trip") {
  for (Stage s : kAllStages) CHECK(ParseStage(StageName(s)) == s);
  CHECK_FALSE(ParseStage("synth").has_value());
}

TEST_CASE("exit codes") {
  CHECK(ExitCodeForError(Error(ErrorKind::kValidation, "x")) == kExitValidation);
  CHECK(ExitCodeForError(Error(ErrorKind::kDependency, "x")) == kExitData);
  CHECK(ExitCodeForError(Error(ErrorKind::kParse, "x")) == kExitData);
  std::vector<StageReport> reports(2);
  reports[0].units = {{"a", true, "", {}}};
  CHECK(ExitCodeForReports(reports) == kExitOk);
  reports[1].units = {{"b", false, "broken", {}}};
  CHECK(ExitCodeForReports(reports) == kExitPartial);
}

TEST_CASE("parallel for visits every index once and rethrows") {
  for (std::size_t workers : {1u, 3u, 8u}) {
    std::vector<int> hits(100, 0);
    ParallelFor(hits.size(), workers, [&](std::size_t i) { ++hits[i]; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
  CHECK_THROWS_AS(ParallelFor(10, 4,
                              [](std::size_t i) {
                                if (i == 7) throw Error(ErrorKind::kInput, "seven");
                              }),
                  Error);
  ParallelFor(0, 4, [](std::size_t) { FAIL("called"); });
}

TEST_CASE("stages without upstream outputs raise a dependency error naming the file") {
  TempDir tmp("dependency");
  const RunConfig c = FixtureConfig(tmp / "out");
  try {
    RunStage(Stage::kReport, c);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDependency);
    CHECK(std::string(e.what()).find("stats") != std::string::npos);
  }
  try {
    RunStage(Stage::kConnect, c);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDependency);
    CHECK(std::string(e.what()).find((tmp / "out" / "preprocess" / "manifest.json").string()) !=
          std::string::npos);
  }
}

TEST_CASE("recording dumps round-trip") {
  TempDir tmp("dumps");
  SynthSpec spec;
  spec.n_channels = 3;
  spec.duration_s = 2.0;
  spec.noise_sigma = 1.0;
  spec.seed = 4;
  const Recording raw = CoupledOscillators(spec);
  const Recording rec(raw.channels(), raw.rate(), raw.samples(), 12.5, 3, 4);

  WriteRecordingBinary(tmp / "r.bin", rec);
  const Recording bin = ReadRecordingBinary(tmp / "r.bin");
  CHECK(bin.channels() == rec.channels());
  CHECK(bin.rate() == rec.rate());
  CHECK(bin.start_time() == rec.start_time());
  CHECK(bin.transient_head() == 3);
  CHECK(bin.transient_tail() == 4);
  CHECK(bin.samples() == rec.samples());

  const Recording csv = ParseRecordingCsv(RecordingCsv(rec), rec.rate(), 12.5);
  CHECK(csv.channels() == rec.channels());
  CHECK(csv.samples() == rec.samples());  // shortest round-trip formatting is exact

  const std::string text = ReadFile(tmp / "r.bin");
  WriteTextFile(tmp / "short.bin", text.substr(0, text.size() - 8));
  CHECK_THROWS_AS(ReadRecordingBinary(tmp / "short.bin"), Error);
  CHECK_THROWS_AS(ReadRecordingBinary(tmp / "absent.bin"), Error);
  CHECK_THROWS_AS(ParseRecordingCsv("a,b\n1,2\n3\n", 256), Error);
}

TEST_CASE("connectivity dumps round-trip") {
  TempDir tmp("conn");
  std::vector<ConnectivityMatrix> series;
  for (std::size_t w = 0; w < 3; ++w) {
    ConnectivityMatrix m{"alpha", w, SquareMatrix(4)};
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = i + 1; j < 4; ++j) {
        m.values(i, j) = m.values(j, i) = 1.0 / static_cast<double>(1 + i + j + w);
      }
    }
    series.push_back(m);
  }
  const auto csv = ParseConnectivityCsv(ConnectivityCsv(series), "alpha", 4);
  WriteConnectivityBinary(tmp / "c.bin", series);
  const auto bin = ReadConnectivityBinary(tmp / "c.bin", "alpha");
  REQUIRE(csv.size() == 3);
  REQUIRE(bin.size() == 3);
  for (std::size_t w = 0; w < 3; ++w) {
    CHECK(csv[w].window_index == w);
    CHECK(csv[w].values.data() == series[w].values.data());
    CHECK(bin[w].values.data() == series[w].values.data());
    CHECK(bin[w].band == "alpha");
  }
  CHECK(ConnectivityCsv(series).rfind("window_index,i,j,pli\n", 0) == 0);
}

TEST_CASE("csv helpers") {
  const CsvTable t = ParseCsv("a,b\n1,x\n2,y\n");
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  CHECK(t.rows.size() == 2);
  CHECK(t.Column("b") == 1);
  CHECK_THROWS_AS(t.Column("c"), Error);
  CHECK(ParseDouble(FormatDouble(0.1)) == 0.1);
  CHECK(FormatDouble(3.0) == "3");
  CHECK_THROWS_AS(ParseDouble("1.5x"), Error);
  CHECK_THROWS_AS(ParseInteger("2.5"), Error);
}

bool WellFormedSvg(const std::string& svg) {
  return svg.rfind("<svg", 0) == 0 && svg.find("</svg>") != std::string::npos &&
         svg.find("nan") == std::string::npos && svg.find("inf") == std::string::npos;
}

TEST_CASE("figures render from csv tables alone") {
  CHECK(WellFormedSvg(LossCurveSvg(ParseCsv("k,loss,selected\n1,10,0\n2,4,1\n3,3,0\n"), "loss")));
  CHECK(WellFormedSvg(StateTimelineSvg(
      ParseCsv("time_s,period,state\n1,pre,0\n2,ictal,1\n3,post,2\n"), "timeline")));
  const std::string diagram = TransitionDiagramSvg(
      ParseCsv("from,to,probability\n0,0,0.9\n0,1,0.1\n1,0,0.5\n1,1,0.5\n"), "tm");
  CHECK(WellFormedSvg(diagram));
  CHECK(diagram.find("0.9") != std::string::npos);
  CHECK(WellFormedSvg(RateDistributionSvg(
      ParseCsv("band,period,rate\nalpha,pre,0.1\nalpha,ictal,NA\nalpha,post,0.3\n"), "rates")));
  CHECK(WellFormedSvg(MetricComparisonSvg(
      ParseCsv("band,metric,period,value\nalpha,L,pre,2\nalpha,L,ictal,3\nalpha,C,post,0.5\n"),
      ParseCsv("band,pair,significant\nalpha,pre-ictal,1\nalpha,ictal-post,0\n"), "L", "L")));
}

TEST_CASE("full run writes the artifact tree") {
  TempDir tmp("full");
  const RunConfig c = FixtureConfig(tmp / "out");
  const auto reports = RunPipeline(c);
  CHECK(ExitCodeForReports(reports) == kExitOk);
  REQUIRE(reports.size() == std::size(kAllStages));
  const fs::path out = c.output_dir;
  for (Stage s : kAllStages) CHECK(fs::exists(out / StageName(s) / "manifest.json"));
  CHECK(fs::exists(out / "manifest.json"));
  for (const auto& band : c.bands) {
    const fs::path conn = out / "connect" / "syn01" / "syn01_01_sz1" / (band.name + ".csv");
    REQUIRE(fs::exists(conn));
    const CsvTable pli = ReadCsv(conn);
    CHECK(pli.header == std::vector<std::string>{"window_index", "i", "j", "pli"});
    CHECK(pli.rows.size() % 66 == 0);  // 12 channels give 66 pairs per window
    const fs::path states = out / "states" / "syn01" / band.name;
    for (const char* f : {"transition_matrix.csv", "stability.csv", "rates.csv", "diagram.dot",
                          "diagram.svg"}) {
      CHECK(fs::exists(states / f));
    }
    CHECK(fs::exists(out / "cluster" / "syn01" / band.name / "model.json"));
    CHECK(fs::exists(out / "report" / fmt::format("loss_syn01_{}.svg", band.name)));
  }
  for (const char* f : {"transition_rate_tests.csv", "transition_rate_tests.txt", "metric_L_tests.csv",
                        "metric_C_tests.csv", "metric_samples.csv", "transition_rates.csv"}) {
    CHECK(fs::exists(out / "stats" / f));
  }
  for (const char* f : {"transition_rates.svg", "metric_L.svg", "metric_C.svg"}) {
    CHECK(WellFormedSvg(ReadFile(out / "report" / f)));
  }
  const CsvTable tests = ReadCsv(out / "stats" / "transition_rate_tests.csv");
  CHECK(tests.rows.size() == 2 * c.bands.size());
  const std::string manifest = ReadFile(out / "manifest.json");
  CHECK(manifest.find("\"k_star\": 3,") != std::string::npos);
}

TEST_CASE("stage-by-stage run equals the monolithic run byte for byte") {
  TempDir tmp("compose");
  const RunConfig whole = FixtureConfig(tmp / "whole");
  RunPipeline(whole);
  RunConfig staged = FixtureConfig(tmp / "staged");
  staged.workers = 3;
  for (Stage s : kAllStages) RunStage(s, staged);
  auto a = Tree(whole.output_dir);
  auto b = Tree(staged.output_dir);
  BlankOutputDir(a, whole.output_dir);
  BlankOutputDir(b, staged.output_dir);
  // The worker count is echoed in the root manifest and nowhere else.
  a.erase("manifest.json");
  b.erase("manifest.json");
  REQUIRE(a.size() == b.size());
  for (const auto& [path, content] : a) {
    CAPTURE(path);
    REQUIRE(b.count(path) == 1);
    CHECK(b.at(path) == content);
  }
}

TEST_CASE("rerunning a stage overwrites with identical bytes") {
  TempDir tmp("rerun");
  const RunConfig c = FixtureConfig(tmp / "out");
  RunPipeline(c);
  const auto before = Tree(c.output_dir);
  RunStage(Stage::kCluster, c);
  RunStage(Stage::kStates, c);
  CHECK(Tree(c.output_dir) == before);
}

TEST_CASE("a broken recording fails its units while the others proceed") {
  TempDir tmp("partial");
  fs::copy(Dataset(), tmp / "data", fs::copy_options::recursive);
  WriteTextFile(tmp / "data" / "syn01" / "syn01_02.edf", "0       garbage");
  RunConfig c = FixtureConfig(tmp / "out");
  c.dataset_root = tmp / "data";
  const auto reports = RunPipeline(c);
  CHECK(ExitCodeForReports(reports) == kExitPartial);
  const StageReport& ingest = reports.front();
  REQUIRE(ingest.units.size() == 3);
  CHECK(ingest.units[0].ok);
  CHECK_FALSE(ingest.units[1].ok);
  CHECK(ingest.units[1].unit == "syn01/syn01_02_sz1");
  CHECK(ingest.units[2].ok);
  CHECK(reports[2].units.size() == 2 * c.bands.size());
  CHECK(reports[4].NumFailed() == 0);
  const std::string manifest = ReadFile(c.output_dir / "ingest" / "manifest.json");
  CHECK(manifest.find("\"status\": \"failed\"") != std::string::npos);
}

TEST_CASE("command line exit codes") {
  TempDir tmp("cli");
  const std::string out = (tmp / "out").string();
  CHECK(Cli(fmt::format("run --out {}", out)) == kExitValidation);
  CHECK(Cli(fmt::format("run --config {}", (tmp / "absent.json").string())) == kExitValidation);
  CHECK(Cli("frobnicate") == kExitValidation);
  CHECK(Cli(fmt::format("report --patients syn01 --out {}", out)) == kExitData);
  WriteTextFile(tmp / "bad.json", R"({"patients": ["syn01"], "colour": "red"})");
  CHECK(Cli(fmt::format("run --config {}", (tmp / "bad.json").string())) == kExitValidation);

  CHECK(Cli(fmt::format("synth --spec fixture --out {}", (tmp / "data").string())) == kExitOk);
  CHECK(fs::exists(tmp / "data" / "syn01" / "syn01-summary.txt"));
  CHECK(fs::exists(tmp / "data" / "syn01" / "syn01_01_truth.csv"));
  CHECK(ReadFile(tmp / "data" / "syn01" / "syn01_03.edf") ==
        ReadFile(Dataset() / "syn01" / "syn01_03.edf"));

  WriteTextFile(tmp / "run.json",
                R"({"dataset_root": "data", "patients": ["syn01"], "output_dir": "cfg_out",
                    "bands": [{"name": "alpha", "low_hz": 8, "high_hz": 13}]})");
  CHECK(Cli(fmt::format("ingest -q --config {}", (tmp / "run.json").string())) == kExitOk);
  CHECK(Cli(fmt::format("preprocess -q --config {}", (tmp / "run.json").string())) == kExitOk);
  CHECK(Cli(fmt::format("connect -q --config {}", (tmp / "run.json").string())) == kExitOk);
  CHECK(fs::exists(tmp / "cfg_out" / "connect" / "syn01" / "syn01_02_sz1" / "alpha.csv"));
  CHECK_FALSE(fs::exists(tmp / "cfg_out" / "connect" / "syn01" / "syn01_02_sz1" / "beta.csv"));
}

}  // namespace
}  // namespace sznet
