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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "sznet/annotations.h"
#include "sznet/edf.h"
#include "sznet/error.h"
#include "sznet/recording.h"
#include "test_util.h"

namespace sznet {
namespace {

using testing::RawEdf;
using testing::RawEdfSignal;
using testing::TempDir;

// Calibration written out independently of the reader.
double Physical(int d, double pmin, double pmax, int dmin, int dmax) {
  return pmin + (pmax - pmin) * (static_cast<double>(d) - dmin) / (static_cast<double>(dmax) - dmin);
}

RawEdfSignal RampSignal(const std::string& label, int slope, int offset) {
  RawEdfSignal s;
  s.label = label;
  s.physical_min = "-200";
  s.physical_max = "200";
  for (int k = 0; k < 2560; ++k) s.digital.push_back(static_cast<std::int16_t>(slope * k + offset));
  return s;
}

Recording Ramp(std::size_t channels, std::size_t n, int rate = 256) {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> data(channels, std::vector<double>(n));
  for (std::size_t c = 0; c < channels; ++c) {
    labels.push_back("C" + std::to_string(c));
    for (std::size_t t = 0; t < n; ++t) data[c][t] = 0.25 * static_cast<double>(t) - 3.0 * c;
  }
  return Recording(labels, rate, data);
}

TEST_CASE("ReadEdf calibrates a two-channel ramp") {
  TempDir dir("edf");
  RawEdf edf;
  edf.signals = {RampSignal("FP1-F7", 1, -1280), RampSignal("F7-T7", 3, -4000)};
  edf.Write(dir / "ramp.edf");

  const Recording rec = ReadEdf(dir / "ramp.edf");
  REQUIRE(rec.num_channels() == 2);
  CHECK(rec.rate() == 256);
  REQUIRE(rec.num_samples() == 2560);
  CHECK(rec.channels() == std::vector<std::string>{"FP1-F7", "F7-T7"});
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t k = 0; k < 2560; ++k) {
      const int d = edf.signals[c].digital[k];
      CHECK(rec.channel(c)[k] == doctest::Approx(Physical(d, -200, 200, -32768, 32767)).epsilon(1e-12));
    }
  }
}

TEST_CASE("digital zero maps to the physical midpoint of a symmetric range") {
  TempDir dir("edf");
  RawEdf edf;
  RawEdfSignal s;
  s.label = "CZ";
  s.physical_min = "-3.5";
  s.physical_max = "3.5";
  s.digital_min = "-32768";
  s.digital_max = "32767";
  s.samples_per_record = 4;
  s.digital = {0, 0, 0, 0};
  edf.signals = {s};
  edf.Write(dir / "mid.edf");
  const Recording rec = ReadEdf(dir / "mid.edf");
  // The affine map sends the digital midpoint -0.5 to 0, so digital 0 lands
  // half a step above it.
  const double step = 7.0 / 65535.0;
  CHECK(rec.channel(0)[0] == doctest::Approx(0.5 * step).epsilon(1e-9));

  s.digital_min = "-32767";
  s.digital = {0, 0, 0, 0};
  edf.signals = {s};
  edf.Write(dir / "mid2.edf");
  CHECK(std::abs(ReadEdf(dir / "mid2.edf").channel(0)[0]) < 1e-12);
}

TEST_CASE("WriteEdf then ReadEdf reproduces samples within one quantization step") {
  TempDir dir("edf");
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 40.0);
  std::vector<std::vector<double>> data(3, std::vector<double>(512));
  for (auto& ch : data) {
    for (auto& v : ch) v = noise(rng);
  }
  const Recording rec({"A", "B", "C"}, 256, data);
  WriteEdf(dir / "rt.edf", rec);
  const Recording back = ReadEdf(dir / "rt.edf");
  REQUIRE(back.num_samples() == 512);
  CHECK(back.channels() == rec.channels());
  for (std::size_t c = 0; c < 3; ++c) {
    const auto [lo, hi] = std::minmax_element(data[c].begin(), data[c].end());
    // Bounds are widened to fit 8 characters, so allow a little headroom.
    const double step = (*hi - *lo) * 1.001 / 65535.0 + 2e-6;
    for (std::size_t k = 0; k < 512; ++k) CHECK(std::abs(back.channel(c)[k] - data[c][k]) <= step);
  }
}

TEST_CASE("WriteEdf rejects a fractional number of seconds") {
  TempDir dir("edf");
  CHECK_THROWS_AS(WriteEdf(dir / "x.edf", Ramp(2, 300)), Error);
}

TEST_CASE("ReadEdf rejects a non-EDF version field") {
  TempDir dir("edf");
  RawEdf edf;
  edf.version = "BIOSEMI";
  edf.signals = {RampSignal("CZ", 1, 0)};
  edf.Write(dir / "bad.edf");
  try {
    ReadEdf(dir / "bad.edf");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
    CHECK(std::string(e.what()).find("version") != std::string::npos);
  }
}

TEST_CASE("malformed numeric header fields are named in the error") {
  TempDir dir("edf");
  RawEdf edf;
  edf.signals = {RampSignal("CZ", 1, 0)};
  edf.signals[0].physical_max = "abc";
  edf.Write(dir / "bad.edf");
  try {
    ReadEdf(dir / "bad.edf");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
    CHECK(std::string(e.what()).find("physical maximum") != std::string::npos);
  }

  RawEdf edf2;
  edf2.record_duration = "x1";
  edf2.signals = {RampSignal("CZ", 1, 0)};
  edf2.Write(dir / "bad2.edf");
  try {
    ReadEdf(dir / "bad2.edf");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("duration of a data record") != std::string::npos);
  }
}

TEST_CASE("EDF+D is refused") {
  TempDir dir("edf");
  RawEdf edf;
  edf.reserved = "EDF+D";
  edf.signals = {RampSignal("CZ", 1, 0)};
  edf.Write(dir / "d.edf");
  CHECK_THROWS_AS(ReadEdf(dir / "d.edf"), Error);
}

TEST_CASE("a short data section reports the last whole record kept") {
  TempDir dir("edf");
  RawEdf edf;
  edf.signals = {RampSignal("CZ", 1, 0), RampSignal("PZ", 1, 5)};
  edf.drop_trailing_bytes = 300;  // last record loses part of its payload
  edf.Write(dir / "short.edf");
  try {
    ReadEdf(dir / "short.edf");
    FAIL("expected a truncation error");
  } catch (const TruncationError& e) {
    CHECK(e.kind() == ErrorKind::kTruncation);
    CHECK(e.records_kept() == 9);
  }
  const Recording rec = ReadEdf(dir / "short.edf", {.keep_partial_records = true});
  CHECK(rec.num_samples() == 9 * 256);
}

TEST_CASE("annotation and non-EEG channels are dropped") {
  TempDir dir("edf");
  RawEdf edf;
  edf.reserved = "EDF+C";
  RawEdfSignal ann = RampSignal("EDF Annotations", 0, 0);
  RawEdfSignal ecg = RampSignal("ECG", 1, 0);
  RawEdfSignal dash = RampSignal("-", 1, 0);
  edf.signals = {RampSignal("FP1-F7", 1, 0), ann, ecg, dash, RampSignal("F7-T7", 1, 0)};
  edf.Write(dir / "mixed.edf");
  const Recording rec = ReadEdf(dir / "mixed.edf");
  CHECK(rec.channels() == std::vector<std::string>{"FP1-F7", "F7-T7"});
}

TEST_CASE("a repeated label keeps its first occurrence") {
  TempDir dir("edf");
  RawEdf edf;
  edf.signals = {RampSignal("T8-P8", 1, 0), RampSignal("CZ", 1, 0), RampSignal("T8-P8", 2, 0)};
  edf.Write(dir / "dup.edf");
  const Recording rec = ReadEdf(dir / "dup.edf");
  REQUIRE(rec.channels() == std::vector<std::string>{"T8-P8", "CZ"});
  CHECK(rec.channel(0)[10] == doctest::Approx(Physical(10, -200, 200, -32768, 32767)));
}

constexpr const char* kSummary = R"(Data Sampling Rate: 256 Hz
*************************

Channels in EDF Files:
**********************
Channel 1: FP1-F7
Channel 2: F7-T7
Channel 3: -

File Name: chb01_03.edf
File Start Time: 13:43:04
File End Time: 14:43:04
Number of Seizures in File: 1
Seizure Start Time: 2996 seconds
Seizure End Time: 3036 seconds

File Name: chb01_04.edf
File Start Time: 14:43:12
File End Time: 15:43:12
Number of Seizures in File: 0

Channels changed:
Channel 1: FP1-F7
Channel 2: CZ

File Name: chb01_15.edf
Number of Seizures in File: 2
Seizure 1 Start Time: 1732 seconds
Seizure 1 End Time: 1772 seconds
Seizure 2 Start Time: 3000 seconds
Seizure 2 End Time: 3100 seconds
)";

TEST_CASE("summary stanzas yield seizures in file order") {
  std::istringstream in(kSummary);
  const auto entries = ParseSummary(in);
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].file_name == "chb01_03.edf");
  CHECK(entries[0].channels == std::vector<std::string>{"FP1-F7", "F7-T7"});
  REQUIRE(entries[0].seizures.size() == 1);
  CHECK(entries[0].seizures[0].onset_s == 2996.0);
  CHECK(entries[0].seizures[0].offset_s == 3036.0);
  CHECK(entries[0].seizures[0].source_file == "chb01_03.edf");
  CHECK(entries[1].seizures.empty());
  CHECK(entries[2].channels == std::vector<std::string>{"FP1-F7", "CZ"});
  REQUIRE(entries[2].seizures.size() == 2);
  CHECK(entries[2].seizures[1].onset_s == 3000.0);

  TempDir dir("summary");
  std::ofstream(dir / "chb01-summary.txt") << kSummary;
  const auto flat = ParseSeizureAnnotations(dir / "chb01-summary.txt");
  REQUIRE(flat.size() == 3);
  CHECK(flat[1].source_file == "chb01_15.edf");
  CHECK(flat[2].offset_s == 3100.0);
}

TEST_CASE("summary errors") {
  const auto expect_error = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    try {
      ParseSummary(in);
      FAIL("expected an annotation error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kAnnotation);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_error(
      "File Name: chb02_16.edf\nNumber of Seizures in File: 2\n"
      "Seizure Start Time: 130 seconds\nSeizure End Time: 212 seconds\n",
      "chb02_16.edf");
  expect_error(
      "File Name: a.edf\nNumber of Seizures in File: 1\n"
      "Seizure Start Time: 300 seconds\nSeizure End Time: 300 seconds\n",
      "a.edf");
  expect_error("File Name: b.edf\nNumber of Seizures in File: 1\nSeizure Start Time: 3 seconds\n",
               "b.edf");
}

TEST_CASE("common average reference") {
  SUBCASE("two constant channels") {
    const Recording rec({"A", "B"}, 1, {{1, 1, 1}, {3, 3, 3}});
    const Recording out = RereferenceCommonAverage(rec);
    CHECK(out.samples() == std::vector<std::vector<double>>{{-1, -1, -1}, {1, 1, 1}});
  }
  SUBCASE("column sums vanish, idempotent and linear") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 50.0);
    const auto random_rec = [&](std::size_t n_ch) {
      std::vector<std::string> labels;
      std::vector<std::vector<double>> d(n_ch, std::vector<double>(200));
      for (std::size_t c = 0; c < n_ch; ++c) {
        labels.push_back("E" + std::to_string(c));
        for (auto& v : d[c]) v = g(rng);
      }
      return Recording(labels, 100, d);
    };
    for (std::size_t n_ch : {2u, 5u, 23u}) {
      const Recording x = random_rec(n_ch);
      const Recording y = random_rec(n_ch);
      const Recording rx = RereferenceCommonAverage(x);
      for (std::size_t t = 0; t < 200; ++t) {
        double sum = 0.0;
        for (std::size_t c = 0; c < n_ch; ++c) sum += rx.channel(c)[t];
        CHECK(std::abs(sum) <= 1e-9 * static_cast<double>(n_ch));
      }
      const Recording rrx = RereferenceCommonAverage(rx);
      const Recording ry = RereferenceCommonAverage(y);
      std::vector<std::vector<double>> combo(n_ch, std::vector<double>(200));
      for (std::size_t c = 0; c < n_ch; ++c) {
        for (std::size_t t = 0; t < 200; ++t) combo[c][t] = 2.0 * x.channel(c)[t] - 0.5 * y.channel(c)[t];
      }
      const Recording rc = RereferenceCommonAverage(x.WithSamples(combo, 0, 0));
      for (std::size_t c = 0; c < n_ch; ++c) {
        for (std::size_t t = 0; t < 200; ++t) {
          CHECK(rrx.channel(c)[t] == doctest::Approx(rx.channel(c)[t]).epsilon(1e-12));
          CHECK(rc.channel(c)[t] ==
                doctest::Approx(2.0 * rx.channel(c)[t] - 0.5 * ry.channel(c)[t]).epsilon(1e-9));
        }
      }
    }
  }
  SUBCASE("single channel is an unsupported montage") {
    const Recording rec({"A"}, 1, {{1, 2, 3}});
    try {
      RereferenceCommonAverage(rec);
      FAIL("expected a montage error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kMontage);
    }
  }
}

TEST_CASE("period segmentation") {
  const Recording rec = Ramp(2, 300 * 256);
  SUBCASE("seizure with room on both sides") {
    const SeizureInterval sz{100.0, 140.0, "f.edf"};
    const PeriodSegmentation seg = SegmentPeriods(rec, sz);
    CHECK(seg.bounds.pre_start_s == 60.0);
    CHECK(seg.bounds.onset_s == 100.0);
    CHECK(seg.bounds.offset_s == 140.0);
    CHECK(seg.bounds.post_end_s == 180.0);
    CHECK(seg.pre.period == Period::kPre);
    CHECK(seg.ictal.period == Period::kIctal);
    CHECK(seg.post.period == Period::kPost);
    CHECK(seg.pre.recording.num_samples() == 10240);
    CHECK(seg.ictal.recording.num_samples() == 10240);
    CHECK(seg.post.recording.num_samples() == 10240);
    CHECK(seg.pre.recording.start_time() == 60.0);
    CHECK(seg.post.recording.start_time() == 140.0);
    // Contiguous: the slices tile [60, 180) of the source.
    CHECK(seg.pre.recording.channel(0).front() == rec.channel(0)[60 * 256]);
    CHECK(seg.ictal.recording.channel(0).front() == rec.channel(0)[100 * 256]);
    CHECK(seg.post.recording.channel(0).back() == rec.channel(0)[180 * 256 - 1]);
  }
  SUBCASE("durations are equal and sum to three seizure lengths") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const double d = 1.0 + 60.0 * u(rng);
      const double onset = d + 1.0 + (280.0 - 3.0 * d) * u(rng);
      const PeriodSegmentation seg = SegmentPeriods(rec, {onset, onset + d, "f"});
      const double a = seg.pre.recording.duration();
      CHECK(std::abs(seg.ictal.recording.duration() - a) <= 1.0 / 256);
      CHECK(std::abs(seg.post.recording.duration() - a) <= 1.0 / 256);
      const double total = a + seg.ictal.recording.duration() + seg.post.recording.duration();
      CHECK(std::abs(total - 3.0 * d) <= 3.0 / 256);
    }
  }
  SUBCASE("insufficient pre-ictal margin") {
    try {
      SegmentPeriods(rec, {10.0, 50.0, "f.edf"});
      FAIL("expected a boundary error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kBoundary);
      const std::string msg = e.what();
      CHECK(msg.find("needs 40 s") != std::string::npos);
      CHECK(msg.find("only 10 s") != std::string::npos);
    }
  }
  SUBCASE("insufficient post-ictal margin") {
    CHECK_THROWS_AS(SegmentPeriods(rec, {250.0, 290.0, "f.edf"}), Error);
  }
  SUBCASE("half-open period labels") {
    const PeriodBounds b{60, 100, 140, 180};
    CHECK(b.LabelAt(99.999) == Period::kPre);
    CHECK(b.LabelAt(100.0) == Period::kIctal);
    CHECK(b.LabelAt(140.0) == Period::kPost);
  }
}

TEST_CASE("montage check lists the differences") {
  const Recording rec({"FP1-F7", "CZ"}, 1, {{1, 2}, {3, 4}});
  CHECK_NOTHROW(CheckMontage(rec, {"CZ", "FP1-F7"}));
  try {
    CheckMontage(rec, {"FP1-F7", "PZ"});
    FAIL("expected a montage error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kMontage);
    const std::string msg = e.what();
    CHECK(msg.find("PZ") != std::string::npos);
    CHECK(msg.find("CZ") != std::string::npos);
  }
}

TEST_CASE("Recording invariants") {
  CHECK_THROWS_AS(Recording({"A", "A"}, 1, {{1}, {2}}), Error);
  CHECK_THROWS_AS(Recording({"A", "B"}, 1, {{1}, {2, 3}}), Error);
  CHECK_THROWS_AS(Recording({"A"}, 0, {{1}}), Error);
  CHECK_THROWS_AS(Recording({"A"}, 1, {{}}), Error);
}

}  // namespace
}  // namespace sznet
