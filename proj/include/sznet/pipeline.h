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

#ifndef SZNET_PIPELINE_H_
#define SZNET_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sznet/error.h"
#include "sznet/fir.h"

namespace sznet {

struct FilterSettings {
  double highpass_hz = 0.5;
  double highpass_transition_hz = 1.0;
  double notch_low_hz = 58.0;
  double notch_high_hz = 62.0;
  double band_transition_hz = 2.0;
};

struct RunConfig {
  std::filesystem::path dataset_root;  // holds <patient>/<patient>-summary.txt
  std::vector<std::string> patients;
  std::vector<BandDefinition> bands = CanonicalBands();
  double window_s = 2.0;
  double hop_s = 1.0;
  FilterSettings filters;
  std::size_t k_max = 15;
  double split_ratio = 2.0 / 3.0;
  std::filesystem::path output_dir;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
};

// JSON run config. Every field is optional except where validation needs
// it; unknown keys are rejected. Relative paths are resolved against base.
// Throws Error(kValidation).
RunConfig ParseRunConfig(std::string_view json_text, const std::filesystem::path& base = {});
RunConfig LoadRunConfig(const std::filesystem::path& path);
// Canonical JSON echo, as stored in manifests.
std::string RunConfigJson(const RunConfig& config);
// Throws Error(kValidation) on the first problem found. With
// require_dataset, the dataset root and every patient summary file must
// exist.
void ValidateRunConfig(const RunConfig& config, bool require_dataset);

enum class Stage { kIngest, kPreprocess, kConnect, kFeatures, kCluster, kStates, kStats, kReport };
inline constexpr Stage kAllStages[] = {Stage::kIngest,   Stage::kPreprocess, Stage::kConnect,
                                       Stage::kFeatures, Stage::kCluster,    Stage::kStates,
                                       Stage::kStats,    Stage::kReport};
const char* StageName(Stage stage);
std::optional<Stage> ParseStage(std::string_view name);

struct UnitOutcome {
  std::string unit;
  bool ok = true;
  std::string message;
  std::vector<std::pair<std::string, double>> values;
};

struct StageReport {
  Stage stage = Stage::kIngest;
  std::vector<UnitOutcome> units;
  std::size_t NumFailed() const;
};

// Runs one stage on the outputs of the previous one, writing under
// <output_dir>/<stage>/ together with a manifest fragment, then refreshes
// <output_dir>/manifest.json. A failing unit is logged and recorded; the
// others proceed. Throws Error(kDependency) when the upstream manifest or a
// required upstream file is absent.
StageReport RunStage(Stage stage, const RunConfig& config);
// Validates the config and runs every stage in order.
std::vector<StageReport> RunPipeline(const RunConfig& config);

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitPartial = 4;

int ExitCodeForError(const Error& error);
int ExitCodeForReports(std::span<const StageReport> reports);

// Calls job(0..n-1) on at most workers threads. The first exception thrown
// by a job is rethrown after all threads finish.
void ParallelFor(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& job);

}  // namespace sznet

#endif  // SZNET_PIPELINE_H_
