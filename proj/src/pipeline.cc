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

#include "sznet/pipeline.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "sznet/annotations.h"
#include "sznet/clustering.h"
#include "sznet/connectivity.h"
#include "sznet/csv.h"
#include "sznet/dump.h"
#include "sznet/dynamics.h"
#include "sznet/edf.h"
#include "sznet/graph_metrics.h"
#include "sznet/recording.h"
#include "sznet/report.h"
#include "sznet/stats.h"

namespace sznet {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------- config

[[noreturn]] void Invalid(const std::string& msg) { throw Error(ErrorKind::kValidation, msg); }

template <typename T>
T Field(const Json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    Invalid(fmt::format("run config: '{}{}' has the wrong type", where, key));
  }
}

void RejectUnknown(const Json& obj, std::initializer_list<const char*> keys,
                   const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
      Invalid(fmt::format("run config: unknown field '{}{}'", where, key));
    }
  }
}

fs::path Resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

// ------------------------------------------------------------ file layout

fs::path StageDir(const RunConfig& c, Stage s) { return c.output_dir / StageName(s); }

Json ReadJson(const fs::path& path) {
  const std::string text = ReadTextFile(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, fmt::format("{}: {}", path.string(), e.what()));
  }
}

void WriteJson(const fs::path& path, const Json& j) { WriteTextFile(path, j.dump(2) + "\n"); }

std::vector<std::string> SplitId(const std::string& id) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t slash = id.find('/', start);
    parts.push_back(id.substr(start, slash - start));
    if (slash == std::string::npos) return parts;
    start = slash + 1;
  }
}

// Ids of the successful units of an upstream stage, in manifest order.
std::vector<std::string> OkUnits(const RunConfig& c, Stage upstream) {
  const Json m = ReadJson(StageDir(c, upstream) / "manifest.json");
  std::vector<std::string> ids;
  for (const auto& u : m.at("units")) {
    if (u.at("status") == "ok") ids.push_back(u.at("unit").get<std::string>());
  }
  return ids;
}

// Per-seizure facts carried from stage to stage.
struct SeizureMeta {
  std::string patient;
  std::string seizure;
  std::string source_file;
  std::size_t order = 0;
  PeriodBounds bounds;
  int rate = 0;
  std::vector<std::string> channels;
  double crop_start_s = 0.0;
  // Set from preprocess on.
  double span_start_s = 0.0;

  Json ToJson() const {
    Json j;
    j["patient"] = patient;
    j["seizure"] = seizure;
    j["source_file"] = source_file;
    j["order"] = order;
    j["rate"] = rate;
    j["channels"] = channels;
    j["pre_start_s"] = bounds.pre_start_s;
    j["onset_s"] = bounds.onset_s;
    j["offset_s"] = bounds.offset_s;
    j["post_end_s"] = bounds.post_end_s;
    j["crop_start_s"] = crop_start_s;
    j["span_start_s"] = span_start_s;
    return j;
  }

  static SeizureMeta FromJson(const Json& j) {
    SeizureMeta m;
    m.patient = j.at("patient").get<std::string>();
    m.seizure = j.at("seizure").get<std::string>();
    m.source_file = j.at("source_file").get<std::string>();
    m.order = j.at("order").get<std::size_t>();
    m.rate = j.at("rate").get<int>();
    m.channels = j.at("channels").get<std::vector<std::string>>();
    m.bounds = {j.at("pre_start_s").get<double>(), j.at("onset_s").get<double>(),
                j.at("offset_s").get<double>(), j.at("post_end_s").get<double>()};
    m.crop_start_s = j.at("crop_start_s").get<double>();
    m.span_start_s = j.at("span_start_s").get<double>();
    return m;
  }
};

SeizureMeta ReadMeta(const fs::path& path) {
  try {
    return SeizureMeta::FromJson(ReadJson(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, fmt::format("{}: {}", path.string(), e.what()));
  }
}

// -------------------------------------------------------------- filters

struct FilterBank {
  FirFilter highpass;
  FirFilter notch;
  std::vector<FirFilter> bands;

  // Samples at each end of a cropped segment that the filter cascade
  // contaminates.
  std::size_t Margin() const {
    std::size_t widest = 0;
    for (const auto& f : bands) widest = std::max(widest, f.half_length());
    return highpass.half_length() + notch.half_length() + widest;
  }
};

FilterBank MakeFilterBank(const RunConfig& c, int rate) {
  FilterBank bank{
      DesignFir(FilterKind::kHighpass, {c.filters.highpass_hz}, rate,
                c.filters.highpass_transition_hz),
      DesignFir(FilterKind::kBandstop, {c.filters.notch_low_hz, c.filters.notch_high_hz}, rate,
                c.filters.band_transition_hz),
      {}};
  for (const auto& b : c.bands) {
    ValidateBand(b, rate);
    bank.bands.push_back(
        DesignFir(FilterKind::kBandpass, {b.low_hz, b.high_hz}, rate, c.filters.band_transition_hz));
  }
  return bank;
}

Json FilterJson(const FirFilter& f) {
  Json j;
  j["kind"] = FilterKindName(f.design.kind);
  j["edges_hz"] = f.design.edges_hz;
  j["transition_hz"] = f.design.transition_hz;
  j["rate"] = f.design.rate;
  j["window"] = f.design.window;
  j["taps"] = f.taps.size();
  return j;
}

// -------------------------------------------------------------- manifest

Json UnitsJson(const StageReport& report) {
  Json units = Json::array();
  for (const auto& u : report.units) {
    Json j;
    j["unit"] = u.unit;
    j["status"] = u.ok ? "ok" : "failed";
    if (!u.message.empty()) j["message"] = u.message;
    for (const auto& [k, v] : u.values) {
      // Counts print as integers.
      if (v == std::floor(v) && std::abs(v) < 1e15) {
        j[k] = static_cast<long long>(v);
      } else {
        j[k] = v;
      }
    }
    units.push_back(std::move(j));
  }
  return units;
}

Json InterpretationJson(const RunConfig& c) {
  Json j;
  j["window_hop"] = fmt::format(
      "{} s windows every {} s; the '1-s window' of the method is read as the hop", c.window_s,
      c.hop_s);
  j["phase_difference"] = "sign of the phase difference taken on the circle";
  j["features"] = "characteristic path length followed by the per-node clustering coefficients";
  j["normalization"] = "per-feature z-score on training windows, population standard deviation";
  j["models"] = "one Ward model per patient and band";
  j["split"] = "chronological, first round(ratio * n) seizures train";
  j["transition_matrix"] = "pooled over the test seizures of a patient and band";
  j["transition_rates"] = "every seizure, train and test";
  j["metric_comparison"] = "per-seizure period means of L and of the mean clustering coefficient";
  j["tests"] = "two-sided Wilcoxon rank-sum, alpha 0.05, no multiple-comparison correction";
  j["ica"] = "skipped; the artifact-rejection stage passes data through unchanged";
  j["line_noise"] = "FIR band-stop instead of adaptive line-noise regression";
  return j;
}

void WriteRootManifest(const RunConfig& c) {
  Json root;
  root["tool"] = "sznet";
  root["manifest_version"] = 1;
  root["config"] = Json::parse(RunConfigJson(c));
  root["interpretation"] = InterpretationJson(c);
  Json stages = Json::object();
  for (Stage s : kAllStages) {
    const fs::path p = StageDir(c, s) / "manifest.json";
    if (fs::exists(p)) stages[StageName(s)] = ReadJson(p);
  }
  root["stages"] = std::move(stages);
  WriteJson(c.output_dir / "manifest.json", root);
}

void WriteStageManifest(const RunConfig& c, const StageReport& report, Json parameters) {
  Json j;
  j["stage"] = StageName(report.stage);
  j["parameters"] = std::move(parameters);
  j["units"] = UnitsJson(report);
  WriteJson(StageDir(c, report.stage) / "manifest.json", j);
  WriteRootManifest(c);
}

// Runs body for every unit index on the worker pool, turning exceptions
// into failed outcomes.
void RunUnits(const RunConfig& c, StageReport& report,
              const std::function<void(std::size_t, UnitOutcome&)>& body) {
  ParallelFor(report.units.size(), c.workers, [&](std::size_t i) {
    UnitOutcome& u = report.units[i];
    try {
      body(i, u);
    } catch (const std::exception& e) {
      u.ok = false;
      u.message = e.what();
      u.values.clear();
    }
  });
  for (const auto& u : report.units) {
    if (!u.ok) spdlog::warn("{} {}: {}", StageName(report.stage), u.unit, u.message);
  }
  spdlog::info("{}: {} units, {} failed", StageName(report.stage), report.units.size(),
               report.NumFailed());
}

// ----------------------------------------------------------------- ingest

Recording ReorderChannels(const Recording& rec, const std::vector<std::string>& order) {
  std::vector<std::vector<double>> samples;
  for (const auto& label : order) {
    const auto it = std::find(rec.channels().begin(), rec.channels().end(), label);
    const auto c = static_cast<std::size_t>(it - rec.channels().begin());
    samples.emplace_back(rec.channel(c).begin(), rec.channel(c).end());
  }
  return Recording(order, rec.rate(), std::move(samples), rec.start_time(), rec.transient_head(),
                   rec.transient_tail());
}

StageReport RunIngest(const RunConfig& c) {
  ValidateRunConfig(c, true);
  StageReport report{Stage::kIngest, {}};
  const fs::path out = StageDir(c, Stage::kIngest);

  struct FileJob {
    std::string patient;
    SummaryEntry entry;
    std::size_t first_unit;
    std::size_t first_order;
  };
  std::vector<FileJob> jobs;
  std::map<std::string, std::vector<std::string>> canonical;
  std::map<std::string, std::string> patient_errors;
  for (const auto& patient : c.patients) {
    std::vector<SummaryEntry> entries;
    try {
      entries = ParseSummaryFile(c.dataset_root / patient / (patient + "-summary.txt"));
    } catch (const Error& e) {
      report.units.push_back({patient, false, e.what(), {}});
      continue;
    }
    std::size_t order = 0;
    for (auto& entry : entries) {
      if (entry.seizures.empty()) continue;
      jobs.push_back({patient, entry, report.units.size(), order});
      const std::string stem = fs::path(entry.file_name).stem().string();
      for (std::size_t s = 0; s < entry.seizures.size(); ++s) {
        report.units.push_back({fmt::format("{}/{}_sz{}", patient, stem, s + 1), true, "", {}});
        ++order;
      }
    }
  }

  std::map<int, std::size_t> margins;
  std::mutex mu;
  const auto margin_for = [&](int rate) {
    std::lock_guard lock(mu);
    auto it = margins.find(rate);
    if (it == margins.end()) it = margins.emplace(rate, MakeFilterBank(c, rate).Margin()).first;
    return it->second;
  };

  const auto process = [&](const FileJob& job) {
    const std::size_t count = job.entry.seizures.size();
    const auto fail_all = [&](const std::string& msg) {
      for (std::size_t s = 0; s < count; ++s) {
        report.units[job.first_unit + s].ok = false;
        report.units[job.first_unit + s].message = msg;
      }
    };
    Recording rec({"-"}, 1, {{0.0}});
    try {
      rec = ReadEdf(c.dataset_root / job.patient / job.entry.file_name);
      std::vector<std::string> montage;
      {
        std::lock_guard lock(mu);
        montage = canonical.try_emplace(job.patient, rec.channels()).first->second;
      }
      CheckMontage(rec, montage);
      rec = ReorderChannels(rec, montage);
    } catch (const std::exception& e) {
      fail_all(e.what());
      return;
    }
    const std::size_t margin = margin_for(rec.rate());
    const std::string stem = fs::path(job.entry.file_name).stem().string();
    for (std::size_t s = 0; s < count; ++s) {
      UnitOutcome& u = report.units[job.first_unit + s];
      try {
        const SeizureInterval& sz = job.entry.seizures[s];
        const SegmentIndices idx = LocateSegments(rec, sz);
        const std::size_t begin = idx.pre_begin > margin ? idx.pre_begin - margin : 0;
        const std::size_t end = std::min(rec.num_samples(), idx.post_end + margin);
        const Recording crop = RereferenceCommonAverage(rec.Slice(begin, end));
        SeizureMeta meta;
        meta.patient = job.patient;
        meta.seizure = fmt::format("{}_sz{}", stem, s + 1);
        meta.source_file = job.entry.file_name;
        meta.order = job.first_order + s;
        const double d = static_cast<double>(idx.offset - idx.onset) / rec.rate();
        meta.bounds = {sz.onset_s - d, sz.onset_s, sz.offset_s, sz.offset_s + d};
        meta.rate = rec.rate();
        meta.channels = rec.channels();
        meta.crop_start_s = crop.start_time();
        meta.span_start_s = meta.bounds.pre_start_s;
        const fs::path dir = out / job.patient;
        WriteTextFile(dir / (meta.seizure + ".csv"), RecordingCsv(crop));
        WriteJson(dir / (meta.seizure + ".json"), meta.ToJson());
        u.values = {{"samples", static_cast<double>(crop.num_samples())},
                    {"margin_before", static_cast<double>(idx.pre_begin - begin)},
                    {"margin_after", static_cast<double>(end - idx.post_end)}};
      } catch (const std::exception& e) {
        u.ok = false;
        u.message = e.what();
      }
    }
  };

  // The first seizure file of each patient fixes the montage, so it runs
  // before the others.
  std::set<std::string> started;
  std::vector<const FileJob*> rest;
  for (const auto& job : jobs) {
    if (started.insert(job.patient).second) {
      process(job);
    } else {
      rest.push_back(&job);
    }
  }
  ParallelFor(rest.size(), c.workers, [&](std::size_t i) { process(*rest[i]); });
  for (const auto& u : report.units) {
    if (!u.ok) spdlog::warn("ingest {}: {}", u.unit, u.message);
  }

  Json params;
  params["dataset_root"] = c.dataset_root.string();
  params["reference"] = "common average";
  Json m = Json::object();
  for (const auto& [rate, margin] : margins) m[std::to_string(rate)] = margin;
  params["crop_margin_samples"] = m;
  WriteStageManifest(c, report, params);
  return report;
}

// ------------------------------------------------------------- preprocess

StageReport RunPreprocess(const RunConfig& c) {
  StageReport report{Stage::kPreprocess, {}};
  for (const auto& id : OkUnits(c, Stage::kIngest)) report.units.push_back({id, true, "", {}});
  const fs::path in = StageDir(c, Stage::kIngest);
  const fs::path out = StageDir(c, Stage::kPreprocess);

  std::mutex mu;
  std::map<int, FilterBank> banks;
  const auto bank_for = [&](int rate) -> const FilterBank& {
    std::lock_guard lock(mu);
    auto it = banks.find(rate);
    if (it == banks.end()) it = banks.emplace(rate, MakeFilterBank(c, rate)).first;
    return it->second;
  };

  RunUnits(c, report, [&](std::size_t i, UnitOutcome& u) {
    const auto parts = SplitId(u.unit);
    const fs::path base = in / parts[0] / parts[1];
    const SeizureMeta meta = ReadMeta(fs::path(base.string() + ".json"));
    const Recording raw = ParseRecordingCsv(ReadTextFile(fs::path(base.string() + ".csv")),
                                            meta.rate, meta.crop_start_s);
    (void)i;
    const FilterBank& bank = bank_for(meta.rate);
    Recording clean = ApplyZeroPhase(bank.notch, ApplyZeroPhase(bank.highpass, raw));
    clean = SkipIcaStage(clean);
    const SegmentIndices idx =
        LocateSegments(clean, {meta.bounds.onset_s, meta.bounds.offset_s, meta.source_file});
    const fs::path dir = out / parts[0] / parts[1];
    std::size_t transient = 0;
    for (std::size_t b = 0; b < c.bands.size(); ++b) {
      const Recording band = ApplyZeroPhase(bank.bands[b], clean).Slice(idx.pre_begin, idx.post_end);
      transient = std::max(transient, band.transient_head() + band.transient_tail());
      WriteRecordingBinary(dir / (c.bands[b].name + ".bin"), band);
    }
    WriteJson(dir / "meta.json", meta.ToJson());
    u.values = {{"span_samples", static_cast<double>(idx.post_end - idx.pre_begin)},
                {"transient_samples", static_cast<double>(transient)}};
  });

  Json params;
  Json designs = Json::object();
  for (const auto& [rate, bank] : banks) {
    Json d;
    d["highpass"] = FilterJson(bank.highpass);
    d["notch"] = FilterJson(bank.notch);
    Json bands = Json::object();
    for (std::size_t b = 0; b < c.bands.size(); ++b) bands[c.bands[b].name] = FilterJson(bank.bands[b]);
    d["bands"] = std::move(bands);
    designs[std::to_string(rate)] = std::move(d);
  }
  params["filters"] = std::move(designs);
  params["order"] = "high-pass, line-noise band-stop, artifact stage (skipped), band-pass";
  params["application"] = "zero-phase FIR, group delay removed, transients flagged";
  WriteStageManifest(c, report, params);
  return report;
}

// ---------------------------------------------------------------- connect

StageReport RunConnect(const RunConfig& c) {
  StageReport report{Stage::kConnect, {}};
  const fs::path in = StageDir(c, Stage::kPreprocess);
  const fs::path out = StageDir(c, Stage::kConnect);
  const auto seizures = OkUnits(c, Stage::kPreprocess);
  for (const auto& id : seizures) {
    const auto parts = SplitId(id);
    SeizureMeta meta = ReadMeta(in / parts[0] / parts[1] / "meta.json");
    WriteJson(out / parts[0] / parts[1] / "meta.json", meta.ToJson());
    for (const auto& band : c.bands) report.units.push_back({id + "/" + band.name, true, "", {}});
  }
  RunUnits(c, report, [&](std::size_t, UnitOutcome& u) {
    const auto parts = SplitId(u.unit);
    const fs::path src = in / parts[0] / parts[1] / (parts[2] + ".bin");
    const Recording rec = ReadRecordingBinary(src);
    const WindowPlan plan = MakeWindowPlan(rec, c.window_s, c.hop_s);
    const auto series = ConnectivitySeries(rec, plan, parts[2]);
    const fs::path dir = out / parts[0] / parts[1];
    WriteTextFile(dir / (parts[2] + ".csv"), ConnectivityCsv(series));
    WriteConnectivityBinary(dir / (parts[2] + ".bin"), series);
    u.values = {{"windows", static_cast<double>(plan.windows.size())},
                {"excluded_windows", static_cast<double>(plan.windows.size() - plan.NumValid())}};
    if (plan.NumValid() < plan.windows.size()) {
      spdlog::info("connect {}: {} of {} windows overlap filter transients", u.unit,
                   plan.windows.size() - plan.NumValid(), plan.windows.size());
    }
  });
  Json params;
  params["window_s"] = c.window_s;
  params["hop_s"] = c.hop_s;
  params["measure"] = "phase lag index";
  params["phase"] = "analytic signal over the whole band-filtered span, then windowed";
  WriteStageManifest(c, report, params);
  return report;
}

// --------------------------------------------------------------- features

std::string FeatureHeader(const std::vector<std::string>& channels) {
  std::string h = "band,window_index,time_s,period_label,valid,excluded_fraction,L";
  for (const auto& ch : channels) h += ",C_" + ch;
  return h + "\n";
}

StageReport RunFeatures(const RunConfig& c) {
  StageReport report{Stage::kFeatures, {}};
  const fs::path in = StageDir(c, Stage::kConnect);
  const fs::path out = StageDir(c, Stage::kFeatures);
  std::set<std::string> copied;
  for (const auto& id : OkUnits(c, Stage::kConnect)) {
    const auto parts = SplitId(id);
    const std::string seizure = parts[0] + "/" + parts[1];
    if (copied.insert(seizure).second) {
      WriteJson(out / seizure / "meta.json", ReadMeta(in / seizure / "meta.json").ToJson());
    }
    report.units.push_back({id, true, "", {}});
  }
  RunUnits(c, report, [&](std::size_t, UnitOutcome& u) {
    const auto parts = SplitId(u.unit);
    const fs::path dir = in / parts[0] / parts[1];
    const SeizureMeta meta = ReadMeta(dir / "meta.json");
    const auto series = ParseConnectivityCsv(ReadTextFile(dir / (parts[2] + ".csv")), parts[2],
                                             meta.channels.size());
    std::string text = FeatureHeader(meta.channels);
    std::size_t invalid = 0;
    for (const auto& m : series) {
      const double mid = meta.span_start_s + static_cast<double>(m.window_index) * c.hop_s +
                         0.5 * c.window_s;
      const FeatureVector fv = MakeFeatureVector(m, mid, meta.bounds);
      invalid += !fv.valid;
      text += fmt::format("{},{},{},{},{},{}", parts[2], fv.window_index, mid, PeriodName(fv.period),
                          fv.valid ? 1 : 0, fv.excluded_fraction);
      for (double v : fv.values) text += fmt::format(",{}", v);
      text += "\n";
    }
    WriteTextFile(out / parts[0] / parts[1] / (parts[2] + ".csv"), text);
    if (invalid) spdlog::info("features {}: {} disconnected windows marked invalid", u.unit, invalid);
    u.values = {{"windows", static_cast<double>(series.size())},
                {"invalid_windows", static_cast<double>(invalid)}};
  });
  Json params;
  params["edge_length"] = "1 / weight";
  params["disconnected_pairs"] = "excluded from the mean path length";
  WriteStageManifest(c, report, params);
  return report;
}

struct FeatureRow {
  std::size_t window_index;
  double time_s;
  Period period;
  std::vector<double> values;
};

// Valid rows of a feature CSV.
std::vector<FeatureRow> ReadFeatureRows(const fs::path& path) {
  const CsvTable t = ReadCsv(path);
  const std::size_t cw = t.Column("window_index");
  const std::size_t ct = t.Column("time_s");
  const std::size_t cp = t.Column("period_label");
  const std::size_t cv = t.Column("valid");
  const std::size_t cl = t.Column("L");
  std::vector<FeatureRow> rows;
  for (const auto& r : t.rows) {
    if (r[cv] != "1") continue;
    FeatureRow row{static_cast<std::size_t>(ParseInteger(r[cw])), ParseDouble(r[ct]),
                   ParsePeriod(r[cp]).value_or(Period::kPre), {}};
    for (std::size_t k = cl; k < r.size(); ++k) row.values.push_back(ParseDouble(r[k]));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Seizures of (patient, band) with features, in recording order.
std::vector<SeizureMeta> PatientSeizures(const RunConfig& c, const std::string& patient,
                                         const std::string& band) {
  std::vector<SeizureMeta> out;
  for (const auto& id : OkUnits(c, Stage::kFeatures)) {
    const auto parts = SplitId(id);
    if (parts[0] != patient || parts[2] != band) continue;
    out.push_back(ReadMeta(StageDir(c, Stage::kFeatures) / parts[0] / parts[1] / "meta.json"));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SeizureMeta& a, const SeizureMeta& b) { return a.order < b.order; });
  return out;
}

// ---------------------------------------------------------------- cluster

StageReport RunCluster(const RunConfig& c) {
  StageReport report{Stage::kCluster, {}};
  std::vector<std::string> units;
  for (const auto& id : OkUnits(c, Stage::kFeatures)) {
    const auto parts = SplitId(id);
    const std::string unit = parts[0] + "/" + parts[2];
    if (std::find(units.begin(), units.end(), unit) == units.end()) units.push_back(unit);
  }
  for (const auto& u : units) report.units.push_back({u, true, "", {}});
  const fs::path in = StageDir(c, Stage::kFeatures);
  const fs::path out = StageDir(c, Stage::kCluster);
  RunUnits(c, report, [&](std::size_t, UnitOutcome& u) {
    const auto parts = SplitId(u.unit);
    const auto seizures = PatientSeizures(c, parts[0], parts[1]);
    std::vector<std::string> ids;
    for (const auto& s : seizures) ids.push_back(s.seizure);
    const TrainTestSplit split = SplitTrainTest(ids, c.split_ratio);
    PointSet train;
    for (const auto& s : split.train) {
      for (auto& row : ReadFeatureRows(in / parts[0] / s / (parts[1] + ".csv"))) {
        train.push_back(std::move(row.values));
      }
    }
    const ClusterModel model = FitClusterModel(train, c.k_max);
    const fs::path dir = out / parts[0] / parts[1];
    WriteTextFile(dir / "model.json", SerializeClusterModel(model));
    std::string loss = "k,loss,second_difference,selected\n";
    for (std::size_t k = 1; k <= model.loss_curve.size(); ++k) {
      std::string second = "NA";
      if (k >= 2 && k < model.loss_curve.size()) {
        second = FormatDouble(model.loss_curve[k - 2] - 2 * model.loss_curve[k - 1] +
                              model.loss_curve[k]);
      }
      loss += fmt::format("{},{},{},{}\n", k, model.loss_curve[k - 1], second,
                          k == model.k ? 1 : 0);
    }
    WriteTextFile(dir / "loss_curve.csv", loss);
    std::string split_csv = "seizure,order,split\n";
    for (const auto& s : seizures) {
      const bool is_train = std::find(split.train.begin(), split.train.end(), s.seizure) != split.train.end();
      split_csv += fmt::format("{},{},{}\n", s.seizure, s.order, is_train ? "train" : "test");
    }
    WriteTextFile(dir / "split.csv", split_csv);
    u.values = {{"k_star", static_cast<double>(model.k)},
                {"train_windows", static_cast<double>(train.size())},
                {"train_seizures", static_cast<double>(split.train.size())},
                {"test_seizures", static_cast<double>(split.test.size())}};
  });
  Json params;
  params["k_max"] = c.k_max;
  params["split_ratio"] = c.split_ratio;
  params["linkage"] = "Ward";
  params["tie_break"] = kTieBreakPolicy;
  params["selection"] = "largest second difference of the loss curve, ties to the smaller k";
  WriteStageManifest(c, report, params);
  return report;
}

// ----------------------------------------------------------------- states

StageReport RunStates(const RunConfig& c) {
  StageReport report{Stage::kStates, {}};
  for (const auto& id : OkUnits(c, Stage::kCluster)) report.units.push_back({id, true, "", {}});
  const fs::path features = StageDir(c, Stage::kFeatures);
  const fs::path cluster = StageDir(c, Stage::kCluster);
  const fs::path out = StageDir(c, Stage::kStates);
  RunUnits(c, report, [&](std::size_t, UnitOutcome& u) {
    const auto parts = SplitId(u.unit);
    const fs::path mdir = cluster / parts[0] / parts[1];
    const ClusterModel model = ParseClusterModel(ReadTextFile(mdir / "model.json"));
    const CsvTable split = ReadCsv(mdir / "split.csv");
    const fs::path dir = out / parts[0] / parts[1];
    std::vector<StateSequence> test_sequences;
    std::string rates = "seizure,split,period,rate\n";
    for (const auto& row : split.rows) {
      const std::string& seizure = row[split.Column("seizure")];
      const std::string& role = row[split.Column("split")];
      StateSequence seq;
      std::string csv = "window_index,time_s,period,state\n";
      for (const auto& fr : ReadFeatureRows(features / parts[0] / seizure / (parts[1] + ".csv"))) {
        const std::size_t state = AssignNearestCentroid(model.normalization.Apply(fr.values), model);
        seq.labels.push_back(state);
        seq.window_times.push_back(fr.time_s);
        seq.periods.push_back(fr.period);
        csv += fmt::format("{},{},{},{}\n", fr.window_index, fr.time_s, PeriodName(fr.period), state);
      }
      seq.Validate();
      WriteTextFile(dir / (seizure + "_states.csv"), csv);
      for (Period p : {Period::kPre, Period::kIctal, Period::kPost}) {
        const auto r = TransitionRate(seq, p);
        rates += fmt::format("{},{},{},{}\n", seizure, role, PeriodName(p),
                             r ? FormatDouble(*r) : std::string("NA"));
      }
      if (role == "test") test_sequences.push_back(std::move(seq));
    }
    WriteTextFile(dir / "rates.csv", rates);

    const TransitionMatrix tm = EstimateTransitionMatrix(test_sequences, model.k);
    std::string tcsv = "from,to,count,probability\n";
    for (std::size_t i = 0; i < tm.num_states(); ++i) {
      for (std::size_t j = 0; j < tm.num_states(); ++j) {
        tcsv += fmt::format("{},{},{},{}\n", i, j, tm.counts(i, j), tm.probabilities(i, j));
      }
    }
    WriteTextFile(dir / "transition_matrix.csv", tcsv);
    const auto ranking = StabilityRanking(tm);
    std::string scsv = "rank,state,self_probability,observed\n";
    for (std::size_t r = 0; r < ranking.size(); ++r) {
      scsv += fmt::format("{},{},{},{}\n", r + 1, ranking[r], tm.probabilities(ranking[r], ranking[r]),
                          tm.observed[ranking[r]] ? 1 : 0);
    }
    WriteTextFile(dir / "stability.csv", scsv);
    const std::string title = fmt::format("{} {} state transitions", parts[0], parts[1]);
    WriteTextFile(dir / "diagram.dot", TransitionDiagramDot(tm, title));
    WriteTextFile(dir / "diagram.svg",
                  TransitionDiagramSvg(ReadCsv(dir / "transition_matrix.csv"), title));
    u.values = {{"states", static_cast<double>(model.k)},
                {"most_stable_state", static_cast<double>(ranking.front())},
                {"test_sequences", static_cast<double>(test_sequences.size())}};
  });
  Json params;
  params["assignment"] = "nearest centroid, Euclidean, normalized with training statistics";
  params["transition_matrix"] = "test seizures pooled, pairs never span two seizures";
  params["rates"] = "within-period consecutive windows, every seizure";
  WriteStageManifest(c, report, params);
  return report;
}

// ------------------------------------------------------------------ stats

void AddComparison(StageReport& report, const std::string& unit, const BandPeriodSamples& s,
                   std::vector<PeriodComparison>& rows) {
  UnitOutcome u{unit, true, "", {}};
  try {
    const auto cmp = ComparePeriods(std::span(&s, 1));
    for (const auto& r : cmp) {
      u.values.push_back({fmt::format("p_{}_{}", PeriodName(r.first), PeriodName(r.second)),
                          r.result.p_two_sided});
    }
    rows.insert(rows.end(), cmp.begin(), cmp.end());
  } catch (const std::exception& e) {
    u.ok = false;
    u.message = e.what();
    spdlog::warn("stats {}: {}", unit, u.message);
  }
  report.units.push_back(std::move(u));
}

StageReport RunStats(const RunConfig& c) {
  StageReport report{Stage::kStats, {}};
  const fs::path states = StageDir(c, Stage::kStates);
  const fs::path features = StageDir(c, Stage::kFeatures);
  const fs::path out = StageDir(c, Stage::kStats);
  const auto state_units = OkUnits(c, Stage::kStates);
  const auto feature_units = OkUnits(c, Stage::kFeatures);

  // Transition rates of every seizure.
  std::map<std::string, BandPeriodSamples> rate_samples;
  std::string rates_csv = "patient,band,seizure,split,period,rate\n";
  for (const auto& band : c.bands) {
    rate_samples[band.name].band = band.name;
    for (const auto& id : state_units) {
      const auto parts = SplitId(id);
      if (parts[1] != band.name) continue;
      const CsvTable t = ReadCsv(states / parts[0] / parts[1] / "rates.csv");
      for (const auto& row : t.rows) {
        const std::string& rate = row[t.Column("rate")];
        const std::string& period = row[t.Column("period")];
        rates_csv += fmt::format("{},{},{},{},{},{}\n", parts[0], band.name, row[t.Column("seizure")],
                                 row[t.Column("split")], period, rate);
        if (rate == "NA") continue;
        auto& s = rate_samples[band.name];
        const Period p = ParsePeriod(period).value_or(Period::kPre);
        (p == Period::kPre ? s.pre : p == Period::kIctal ? s.ictal : s.post).push_back(ParseDouble(rate));
      }
    }
  }
  WriteTextFile(out / "transition_rates.csv", rates_csv);

  // Per-seizure period means of L and of the mean clustering coefficient.
  std::map<std::string, BandPeriodSamples> l_samples, c_samples;
  std::string metric_csv = "patient,band,seizure,metric,period,value\n";
  for (const auto& band : c.bands) {
    l_samples[band.name].band = band.name;
    c_samples[band.name].band = band.name;
    for (const auto& id : feature_units) {
      const auto parts = SplitId(id);
      if (parts[2] != band.name) continue;
      std::array<double, 3> sum_l{}, sum_c{};
      std::array<std::size_t, 3> n{};
      for (const auto& fr : ReadFeatureRows(features / parts[0] / parts[1] / (band.name + ".csv"))) {
        const auto p = static_cast<std::size_t>(fr.period);
        sum_l[p] += fr.values[0];
        sum_c[p] += std::accumulate(fr.values.begin() + 1, fr.values.end(), 0.0) /
                    static_cast<double>(fr.values.size() - 1);
        ++n[p];
      }
      for (std::size_t p = 0; p < 3; ++p) {
        if (n[p] == 0) continue;
        const double ml = sum_l[p] / static_cast<double>(n[p]);
        const double mc = sum_c[p] / static_cast<double>(n[p]);
        const Period period = static_cast<Period>(p);
        metric_csv += fmt::format("{},{},{},L,{},{}\n", parts[0], band.name, parts[1], PeriodName(period), ml);
        metric_csv += fmt::format("{},{},{},C,{},{}\n", parts[0], band.name, parts[1], PeriodName(period), mc);
        auto& sl = l_samples[band.name];
        auto& sc = c_samples[band.name];
        (p == 0 ? sl.pre : p == 1 ? sl.ictal : sl.post).push_back(ml);
        (p == 0 ? sc.pre : p == 1 ? sc.ictal : sc.post).push_back(mc);
      }
    }
  }
  WriteTextFile(out / "metric_samples.csv", metric_csv);

  std::vector<PeriodComparison> rate_rows, l_rows, c_rows;
  for (const auto& band : c.bands) {
    AddComparison(report, "transition_rate/" + band.name, rate_samples[band.name], rate_rows);
  }
  for (const auto& band : c.bands) AddComparison(report, "metric_L/" + band.name, l_samples[band.name], l_rows);
  for (const auto& band : c.bands) AddComparison(report, "metric_C/" + band.name, c_samples[band.name], c_rows);
  WriteTextFile(out / "transition_rate_tests.csv", ComparisonCsv(rate_rows));
  WriteTextFile(out / "transition_rate_tests.txt",
                RenderComparisonTable(rate_rows, "Wilcoxon rank-sum tests of network state transition rate"));
  WriteTextFile(out / "metric_L_tests.csv", ComparisonCsv(l_rows));
  WriteTextFile(out / "metric_L_tests.txt",
                RenderComparisonTable(l_rows, "Wilcoxon rank-sum tests of characteristic path length"));
  WriteTextFile(out / "metric_C_tests.csv", ComparisonCsv(c_rows));
  WriteTextFile(out / "metric_C_tests.txt",
                RenderComparisonTable(c_rows, "Wilcoxon rank-sum tests of mean clustering coefficient"));
  spdlog::info("stats: {} comparisons, {} failed", report.units.size(), report.NumFailed());
  Json params;
  params["test"] = "Wilcoxon rank-sum, two-sided";
  params["alpha"] = kSignificanceLevel;
  params["exact_limit"] = kExactRankSumLimit;
  params["pairs"] = {"pre-ictal", "ictal-post"};
  WriteStageManifest(c, report, params);
  return report;
}

// ----------------------------------------------------------------- report

StageReport RunReport(const RunConfig& c) {
  const fs::path stats = StageDir(c, Stage::kStats);
  // Fail early, naming the first absent stats output.
  for (const char* name : {"manifest.json", "transition_rate_tests.csv", "transition_rates.csv",
                           "metric_samples.csv", "metric_L_tests.csv", "metric_C_tests.csv"}) {
    if (!fs::exists(stats / name)) {
      throw Error(ErrorKind::kDependency,
                  fmt::format("report needs {}; run the stats stage first", (stats / name).string()));
    }
  }
  StageReport report{Stage::kReport, {}};
  const fs::path out = StageDir(c, Stage::kReport);
  const fs::path cluster = StageDir(c, Stage::kCluster);
  const fs::path states = StageDir(c, Stage::kStates);

  for (const auto& id : OkUnits(c, Stage::kCluster)) {
    report.units.push_back({"loss/" + id, true, "", {}});
  }
  for (const auto& id : OkUnits(c, Stage::kStates)) {
    report.units.push_back({"states/" + id, true, "", {}});
  }
  report.units.push_back({"transition_rates", true, "", {}});
  report.units.push_back({"metrics", true, "", {}});

  RunUnits(c, report, [&](std::size_t, UnitOutcome& u) {
    const auto parts = SplitId(u.unit);
    if (parts[0] == "loss") {
      const std::string name = fmt::format("loss_{}_{}.svg", parts[1], parts[2]);
      WriteTextFile(out / name, LossCurveSvg(ReadCsv(cluster / parts[1] / parts[2] / "loss_curve.csv"),
                                             fmt::format("{} {} Ward loss curve", parts[1], parts[2])));
    } else if (parts[0] == "states") {
      const fs::path dir = states / parts[1] / parts[2];
      WriteTextFile(out / fmt::format("transitions_{}_{}.svg", parts[1], parts[2]),
                    TransitionDiagramSvg(ReadCsv(dir / "transition_matrix.csv"),
                                         fmt::format("{} {} state transitions", parts[1], parts[2])));
      const CsvTable split = ReadCsv(cluster / parts[1] / parts[2] / "split.csv");
      for (const auto& row : split.rows) {
        const std::string& seizure = row[split.Column("seizure")];
        WriteTextFile(out / fmt::format("timeline_{}_{}_{}.svg", parts[1], parts[2], seizure),
                      StateTimelineSvg(ReadCsv(dir / (seizure + "_states.csv")),
                                       fmt::format("{} {} {} ({})", parts[1], parts[2], seizure,
                                                   row[split.Column("split")])));
      }
    } else if (parts[0] == "transition_rates") {
      WriteTextFile(out / "transition_rates.svg",
                    RateDistributionSvg(ReadCsv(stats / "transition_rates.csv"),
                                        "Network state transition rate by period"));
    } else {
      const CsvTable samples = ReadCsv(stats / "metric_samples.csv");
      WriteTextFile(out / "metric_L.svg",
                    MetricComparisonSvg(samples, ReadCsv(stats / "metric_L_tests.csv"), "L",
                                        "Characteristic path length by period"));
      WriteTextFile(out / "metric_C.svg",
                    MetricComparisonSvg(samples, ReadCsv(stats / "metric_C_tests.csv"), "C",
                                        "Mean clustering coefficient by period"));
    }
  });
  Json params;
  params["source"] = "figures drawn from the CSV artifacts of earlier stages";
  WriteStageManifest(c, report, params);
  return report;
}

}  // namespace

// ------------------------------------------------------------- public API

RunConfig ParseRunConfig(std::string_view json_text, const fs::path& base) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    Invalid(fmt::format("run config is not valid JSON: {}", e.what()));
  }
  if (!j.is_object()) Invalid("run config must be a JSON object");
  RejectUnknown(j,
                {"dataset_root", "patients", "bands", "window_s", "hop_s", "filters", "k_max",
                 "split_ratio", "output_dir", "seed", "workers"},
                "");
  RunConfig c;
  if (j.contains("dataset_root")) c.dataset_root = Resolve(base, Field<std::string>(j, "dataset_root", ""));
  if (j.contains("output_dir")) c.output_dir = Resolve(base, Field<std::string>(j, "output_dir", ""));
  if (j.contains("patients")) c.patients = Field<std::vector<std::string>>(j, "patients", "");
  if (j.contains("window_s")) c.window_s = Field<double>(j, "window_s", "");
  if (j.contains("hop_s")) c.hop_s = Field<double>(j, "hop_s", "");
  if (j.contains("k_max")) c.k_max = Field<std::size_t>(j, "k_max", "");
  if (j.contains("split_ratio")) c.split_ratio = Field<double>(j, "split_ratio", "");
  if (j.contains("seed")) c.seed = Field<std::uint64_t>(j, "seed", "");
  if (j.contains("workers")) c.workers = Field<std::size_t>(j, "workers", "");
  if (j.contains("bands")) {
    if (!j["bands"].is_array()) Invalid("run config: 'bands' must be an array");
    c.bands.clear();
    for (const auto& b : j["bands"]) {
      if (!b.is_object()) Invalid("run config: each band must be an object");
      RejectUnknown(b, {"name", "low_hz", "high_hz"}, "bands[].");
      c.bands.push_back({Field<std::string>(b, "name", "bands[]."), Field<double>(b, "low_hz", "bands[]."),
                         Field<double>(b, "high_hz", "bands[].")});
    }
  }
  if (j.contains("filters")) {
    const Json& f = j["filters"];
    if (!f.is_object()) Invalid("run config: 'filters' must be an object");
    RejectUnknown(f,
                  {"highpass_hz", "highpass_transition_hz", "notch_low_hz", "notch_high_hz",
                   "band_transition_hz"},
                  "filters.");
    if (f.contains("highpass_hz")) c.filters.highpass_hz = Field<double>(f, "highpass_hz", "filters.");
    if (f.contains("highpass_transition_hz")) {
      c.filters.highpass_transition_hz = Field<double>(f, "highpass_transition_hz", "filters.");
    }
    if (f.contains("notch_low_hz")) c.filters.notch_low_hz = Field<double>(f, "notch_low_hz", "filters.");
    if (f.contains("notch_high_hz")) c.filters.notch_high_hz = Field<double>(f, "notch_high_hz", "filters.");
    if (f.contains("band_transition_hz")) {
      c.filters.band_transition_hz = Field<double>(f, "band_transition_hz", "filters.");
    }
  }
  return c;
}

RunConfig LoadRunConfig(const fs::path& path) {
  std::string text;
  try {
    text = ReadTextFile(path);
  } catch (const Error&) {
    Invalid(fmt::format("run config {} does not exist", path.string()));
  }
  return ParseRunConfig(text, path.parent_path());
}

std::string RunConfigJson(const RunConfig& c) {
  Json j;
  j["dataset_root"] = c.dataset_root.string();
  j["patients"] = c.patients;
  Json bands = Json::array();
  for (const auto& b : c.bands) bands.push_back({{"name", b.name}, {"low_hz", b.low_hz}, {"high_hz", b.high_hz}});
  j["bands"] = std::move(bands);
  j["window_s"] = c.window_s;
  j["hop_s"] = c.hop_s;
  j["filters"] = {{"highpass_hz", c.filters.highpass_hz},
                  {"highpass_transition_hz", c.filters.highpass_transition_hz},
                  {"notch_low_hz", c.filters.notch_low_hz},
                  {"notch_high_hz", c.filters.notch_high_hz},
                  {"band_transition_hz", c.filters.band_transition_hz}};
  j["k_max"] = c.k_max;
  j["split_ratio"] = c.split_ratio;
  j["output_dir"] = c.output_dir.string();
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  return j.dump(2);
}

void ValidateRunConfig(const RunConfig& c, bool require_dataset) {
  if (c.patients.empty()) Invalid("run config: patient list is empty");
  if (std::set<std::string>(c.patients.begin(), c.patients.end()).size() != c.patients.size()) {
    Invalid("run config: patient ids repeat");
  }
  if (c.output_dir.empty()) Invalid("run config: output_dir is not set");
  if (c.bands.empty()) Invalid("run config: no bands");
  std::set<std::string> names;
  for (const auto& b : c.bands) {
    if (b.name.empty() || b.name.find_first_of("/,") != std::string::npos) {
      Invalid(fmt::format("run config: band name '{}' is empty or contains '/' or ','", b.name));
    }
    if (!names.insert(b.name).second) Invalid(fmt::format("run config: band '{}' repeats", b.name));
    if (!(b.low_hz > 0.0 && b.low_hz < b.high_hz)) {
      Invalid(fmt::format("run config: band '{}' needs 0 < low_hz < high_hz", b.name));
    }
  }
  if (!(c.window_s > 0.0) || !(c.hop_s > 0.0)) Invalid("run config: window_s and hop_s must be positive");
  if (c.k_max < 3) Invalid("run config: k_max must be at least 3");
  if (!(c.split_ratio > 0.0 && c.split_ratio < 1.0)) Invalid("run config: split_ratio must be in (0, 1)");
  if (c.workers == 0) Invalid("run config: workers must be at least 1");
  const FilterSettings& f = c.filters;
  if (!(f.highpass_hz > 0.0 && f.highpass_transition_hz > 0.0 && f.band_transition_hz > 0.0)) {
    Invalid("run config: filter cut-offs and transition widths must be positive");
  }
  if (!(f.notch_low_hz > 0.0 && f.notch_low_hz < f.notch_high_hz)) {
    Invalid("run config: notch needs 0 < notch_low_hz < notch_high_hz");
  }
  if (!require_dataset) return;
  if (c.dataset_root.empty() || !fs::is_directory(c.dataset_root)) {
    Invalid(fmt::format("run config: dataset_root '{}' is not a directory", c.dataset_root.string()));
  }
  for (const auto& p : c.patients) {
    const fs::path summary = c.dataset_root / p / (p + "-summary.txt");
    if (!fs::exists(summary)) Invalid(fmt::format("run config: missing {}", summary.string()));
  }
}

const char* StageName(Stage stage) {
  switch (stage) {
    case Stage::kIngest: return "ingest";
    case Stage::kPreprocess: return "preprocess";
    case Stage::kConnect: return "connect";
    case Stage::kFeatures: return "features";
    case Stage::kCluster: return "cluster";
    case Stage::kStates: return "states";
    case Stage::kStats: return "stats";
    case Stage::kReport: return "report";
  }
  return "?";
}

std::optional<Stage> ParseStage(std::string_view name) {
  for (Stage s : kAllStages) {
    if (name == StageName(s)) return s;
  }
  return std::nullopt;
}

std::size_t StageReport::NumFailed() const {
  return static_cast<std::size_t>(
      std::count_if(units.begin(), units.end(), [](const UnitOutcome& u) { return !u.ok; }));
}

StageReport RunStage(Stage stage, const RunConfig& c) {
  ValidateRunConfig(c, stage == Stage::kIngest);
  spdlog::info("stage {}", StageName(stage));
  switch (stage) {
    case Stage::kIngest: return RunIngest(c);
    case Stage::kPreprocess: return RunPreprocess(c);
    case Stage::kConnect: return RunConnect(c);
    case Stage::kFeatures: return RunFeatures(c);
    case Stage::kCluster: return RunCluster(c);
    case Stage::kStates: return RunStates(c);
    case Stage::kStats: return RunStats(c);
    case Stage::kReport: return RunReport(c);
  }
  throw Error(ErrorKind::kValidation, "unknown stage");
}

std::vector<StageReport> RunPipeline(const RunConfig& c) {
  ValidateRunConfig(c, true);
  std::vector<StageReport> reports;
  for (Stage s : kAllStages) reports.push_back(RunStage(s, c));
  return reports;
}

int ExitCodeForError(const Error& error) {
  return error.kind() == ErrorKind::kValidation ? kExitValidation : kExitData;
}

int ExitCodeForReports(std::span<const StageReport> reports) {
  for (const auto& r : reports) {
    if (r.NumFailed() > 0) return kExitPartial;
  }
  return kExitOk;
}

void ParallelFor(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& job) {
  const std::size_t threads = std::min(std::max<std::size_t>(workers, 1), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex mu;
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            job(i);
          } catch (...) {
            std::lock_guard lock(mu);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace sznet
