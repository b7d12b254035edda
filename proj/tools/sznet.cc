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

// Command-line driver for the seizure network-state pipeline.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "sznet/error.h"
#include "sznet/pipeline.h"
#include "sznet/synth.h"

namespace {

namespace fs = std::filesystem;

// Flag values that override the run config when given.
struct Overrides {
  std::string config;
  std::string data;
  std::vector<std::string> patients;
  std::string out;
  std::optional<std::size_t> k_max;
  std::optional<double> window_s;
  std::optional<double> hop_s;
  std::optional<double> split_ratio;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
};

void AddRunFlags(CLI::App* app, Overrides& o) {
  app->add_option("-c,--config", o.config, "JSON run config");
  app->add_option("--data", o.data, "dataset root (overrides dataset_root)");
  app->add_option("--patients", o.patients, "patient ids (overrides patients)");
  app->add_option("-o,--out", o.out, "output directory (overrides output_dir)");
  app->add_option("--k-max", o.k_max, "largest cluster count scanned");
  app->add_option("--window", o.window_s, "window length in seconds");
  app->add_option("--hop", o.hop_s, "hop between windows in seconds");
  app->add_option("--split-ratio", o.split_ratio, "fraction of seizures used for training");
  app->add_option("--seed", o.seed, "seed recorded in the manifest");
  app->add_option("-j,--workers", o.workers, "worker threads");
}

sznet::RunConfig BuildConfig(const Overrides& o) {
  sznet::RunConfig c = o.config.empty() ? sznet::RunConfig{} : sznet::LoadRunConfig(o.config);
  if (!o.data.empty()) c.dataset_root = o.data;
  if (!o.patients.empty()) c.patients = o.patients;
  if (!o.out.empty()) c.output_dir = o.out;
  if (o.k_max) c.k_max = *o.k_max;
  if (o.window_s) c.window_s = *o.window_s;
  if (o.hop_s) c.hop_s = *o.hop_s;
  if (o.split_ratio) c.split_ratio = *o.split_ratio;
  if (o.seed) c.seed = *o.seed;
  if (o.workers) c.workers = *o.workers;
  return c;
}

void PrintReport(const sznet::StageReport& r) {
  std::printf("%-10s %zu units, %zu failed\n", sznet::StageName(r.stage), r.units.size(),
              r.NumFailed());
  for (const auto& u : r.units) {
    if (!u.ok) std::printf("  FAILED %s: %s\n", u.unit.c_str(), u.message.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seizure EEG network-state analysis"};
  app.require_subcommand(1);
  app.fallthrough();
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");
  app.add_flag("-q,--quiet", quiet, "warnings and errors only");

  Overrides overrides;
  std::vector<std::pair<CLI::App*, std::optional<sznet::Stage>>> commands;
  for (sznet::Stage s : sznet::kAllStages) {
    CLI::App* sub = app.add_subcommand(sznet::StageName(s),
                                       fmt::format("run the {} stage only", sznet::StageName(s)));
    AddRunFlags(sub, overrides);
    commands.emplace_back(sub, s);
  }
  CLI::App* run = app.add_subcommand("run", "run every stage in order");
  AddRunFlags(run, overrides);
  commands.emplace_back(run, std::nullopt);

  CLI::App* synth = app.add_subcommand("synth", "write a synthetic patient with ground truth");
  std::string synth_spec = "fixture";
  std::string synth_out;
  std::optional<std::uint64_t> synth_seed;
  synth->add_option("--spec", synth_spec, "synthetic dataset name")
      ->check(CLI::IsMember({"fixture"}));
  synth->add_option("-o,--out", synth_out, "dataset root to write")->required();
  synth->add_option("--seed", synth_seed, "noise seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? sznet::kExitOk : sznet::kExitValidation;
  }
  spdlog::set_level(verbose ? spdlog::level::debug
                            : quiet ? spdlog::level::warn : spdlog::level::info);

  try {
    if (synth->parsed()) {
      sznet::SyntheticPatientSpec spec = sznet::DefaultThreeStateFixture();
      if (synth_seed) spec.seed = *synth_seed;
      sznet::WriteSyntheticPatient(synth_out, spec);
      std::printf("wrote %s\n", (fs::path(synth_out) / spec.patient).string().c_str());
      return sznet::kExitOk;
    }
    for (const auto& [sub, stage] : commands) {
      if (!sub->parsed()) continue;
      const sznet::RunConfig config = BuildConfig(overrides);
      std::vector<sznet::StageReport> reports;
      if (stage) {
        reports.push_back(sznet::RunStage(*stage, config));
      } else {
        reports = sznet::RunPipeline(config);
      }
      for (const auto& r : reports) PrintReport(r);
      return sznet::ExitCodeForReports(reports);
    }
  } catch (const sznet::Error& e) {
    spdlog::error("{}", e.what());
    return sznet::ExitCodeForError(e);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return sznet::kExitData;
  }
  return sznet::kExitValidation;
}
