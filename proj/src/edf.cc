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

#include "sznet/edf.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "sznet/error.h"

namespace sznet {

namespace {

constexpr int kFixedHeaderBytes = 256;
constexpr int kSignalHeaderBytes = 256;
constexpr int kDigitalMin = -32768;
constexpr int kDigitalMax = 32767;

std::string Trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (std::isspace(static_cast<unsigned char>(s[b])) || s[b] == '\0')) ++b;
  while (e > b && (std::isspace(static_cast<unsigned char>(s[e - 1])) || s[e - 1] == '\0')) --e;
  return std::string(s.substr(b, e - b));
}

std::string ReadField(std::istream& in, std::size_t width, const char* field) {
  std::string buf(width, ' ');
  in.read(buf.data(), static_cast<std::streamsize>(width));
  if (static_cast<std::size_t>(in.gcount()) != width) {
    throw Error(ErrorKind::kParse,
                fmt::format("EDF header ends inside field '{}'", field));
  }
  for (char c : buf) {
    if (static_cast<unsigned char>(c) > 126) {
      throw Error(ErrorKind::kParse,
                  fmt::format("EDF header field '{}' contains non-ASCII bytes", field));
    }
  }
  return buf;
}

template <typename T>
T ParseNumber(const std::string& raw, const std::string& field) {
  const std::string s = Trim(raw);
  T value{};
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (s.empty() || ec != std::errc() || ptr != last) {
    throw Error(ErrorKind::kParse,
                fmt::format("EDF header field '{}' is not a valid number: '{}'", field, s));
  }
  return value;
}

std::string Pad(std::string_view value, std::size_t width) {
  std::string out(value.substr(0, width));
  out.resize(width, ' ');
  return out;
}

// Decimal rendering of v in at most 8 characters, rounded away from the
// data (down for a lower bound, up for an upper one).
std::string FormatBound(double v, bool lower) {
  for (int decimals = 6; decimals >= 0; --decimals) {
    const double scale = std::pow(10.0, decimals);
    const double r = lower ? std::floor(v * scale) / scale : std::ceil(v * scale) / scale;
    std::string s = fmt::format("{:.{}f}", r, decimals);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    if (s.size() <= 8) return s;
  }
  throw Error(ErrorKind::kInput,
              fmt::format("physical value {} does not fit an 8-character EDF field", v));
}

}  // namespace

std::size_t EdfHeader::RecordBytes() const {
  std::size_t total = 0;
  for (const auto& s : signals) total += static_cast<std::size_t>(s.samples_per_record) * 2;
  return total;
}

EdfHeader ReadEdfHeader(std::istream& in) {
  EdfHeader h;
  h.version = Trim(ReadField(in, 8, "version"));
  if (h.version != "0") {
    throw Error(ErrorKind::kParse,
                fmt::format("EDF header field 'version' must be \"0\", got \"{}\"", h.version));
  }
  h.patient = Trim(ReadField(in, 80, "patient"));
  h.recording = Trim(ReadField(in, 80, "recording"));
  h.start_date = Trim(ReadField(in, 8, "startdate"));
  h.start_time = Trim(ReadField(in, 8, "starttime"));
  h.header_bytes = ParseNumber<int>(ReadField(in, 8, "header bytes"), "header bytes");
  h.reserved = Trim(ReadField(in, 44, "reserved"));
  h.num_records = ParseNumber<long>(ReadField(in, 8, "number of data records"),
                                    "number of data records");
  h.record_duration_s = ParseNumber<double>(ReadField(in, 8, "duration of a data record"),
                                            "duration of a data record");
  const int ns = ParseNumber<int>(ReadField(in, 4, "number of signals"), "number of signals");

  if (h.reserved.rfind("EDF+D", 0) == 0) {
    throw Error(ErrorKind::kParse,
                "EDF header field 'reserved' declares EDF+D; discontinuous files are not supported");
  }
  if (ns <= 0) {
    throw Error(ErrorKind::kParse,
                fmt::format("EDF header field 'number of signals' must be positive, got {}", ns));
  }
  if (h.header_bytes != kFixedHeaderBytes + ns * kSignalHeaderBytes) {
    throw Error(ErrorKind::kParse,
                fmt::format("EDF header field 'header bytes' is {}, expected {} for {} signals",
                            h.header_bytes, kFixedHeaderBytes + ns * kSignalHeaderBytes, ns));
  }
  if (h.num_records < -1) {
    throw Error(ErrorKind::kParse,
                fmt::format("EDF header field 'number of data records' is {}", h.num_records));
  }
  if (!(h.record_duration_s > 0.0)) {
    throw Error(ErrorKind::kParse,
                fmt::format("EDF header field 'duration of a data record' must be positive, got {}",
                            h.record_duration_s));
  }

  h.signals.resize(static_cast<std::size_t>(ns));
  // Signal headers are stored field by field across all signals.
  for (auto& s : h.signals) s.label = Trim(ReadField(in, 16, "label"));
  for (auto& s : h.signals) s.transducer = Trim(ReadField(in, 80, "transducer type"));
  for (auto& s : h.signals) s.physical_dimension = Trim(ReadField(in, 8, "physical dimension"));
  for (auto& s : h.signals) {
    s.physical_min = ParseNumber<double>(ReadField(in, 8, "physical minimum"), "physical minimum");
  }
  for (auto& s : h.signals) {
    s.physical_max = ParseNumber<double>(ReadField(in, 8, "physical maximum"), "physical maximum");
  }
  for (auto& s : h.signals) {
    s.digital_min = ParseNumber<int>(ReadField(in, 8, "digital minimum"), "digital minimum");
  }
  for (auto& s : h.signals) {
    s.digital_max = ParseNumber<int>(ReadField(in, 8, "digital maximum"), "digital maximum");
  }
  for (auto& s : h.signals) s.prefiltering = Trim(ReadField(in, 80, "prefiltering"));
  for (auto& s : h.signals) {
    s.samples_per_record = ParseNumber<int>(ReadField(in, 8, "number of samples in each data record"),
                                            "number of samples in each data record");
  }
  for (std::size_t i = 0; i < h.signals.size(); ++i) ReadField(in, 32, "signal reserved");

  for (const auto& s : h.signals) {
    if (s.digital_max <= s.digital_min) {
      throw Error(ErrorKind::kParse,
                  fmt::format("EDF header field 'digital maximum' of signal '{}' ({}) is not above "
                              "'digital minimum' ({})",
                              s.label, s.digital_max, s.digital_min));
    }
    if (s.physical_max == s.physical_min) {
      throw Error(ErrorKind::kParse,
                  fmt::format("EDF header field 'physical maximum' of signal '{}' equals "
                              "'physical minimum'",
                              s.label));
    }
    if (s.samples_per_record <= 0) {
      throw Error(ErrorKind::kParse,
                  fmt::format("EDF header field 'number of samples in each data record' of "
                              "signal '{}' must be positive",
                              s.label));
    }
  }
  return h;
}

bool IsEegSignal(const EdfSignalHeader& signal) {
  std::string upper = signal.label;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper.empty() || upper == "-" || upper == ".") return false;
  if (upper.find("ANNOTATION") != std::string::npos) return false;
  static constexpr std::array<const char*, 12> kNonEeg = {
      "ECG", "EKG", "EMG", "EOG", "VNS", "LOC", "ROC",
      "RESP", "SPO2", "PULSE", "DC", "PHOTIC"};
  for (const char* prefix : kNonEeg) {
    if (upper.rfind(prefix, 0) == 0) return false;
  }
  return true;
}

Recording ReadEdf(const std::filesystem::path& path, const EdfReadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kInput, fmt::format("cannot open EDF file {}", path.string()));
  const EdfHeader h = ReadEdfHeader(in);

  std::vector<std::size_t> keep;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < h.signals.size(); ++i) {
    const auto& s = h.signals[i];
    if (!IsEegSignal(s)) continue;
    if (!seen.insert(s.label).second) {
      spdlog::warn("{}: repeated channel '{}' dropped", path.filename().string(), s.label);
      continue;
    }
    keep.push_back(i);
  }
  if (keep.empty()) {
    throw Error(ErrorKind::kParse, fmt::format("{} contains no EEG signals", path.string()));
  }

  const double rate_exact = h.signals[keep.front()].samples_per_record / h.record_duration_s;
  const int rate = static_cast<int>(std::lround(rate_exact));
  if (rate <= 0 || std::abs(rate_exact - rate) > 1e-6) {
    throw Error(ErrorKind::kParse,
                fmt::format("EDF header field 'duration of a data record' gives a non-integer "
                            "sampling rate {}",
                            rate_exact));
  }
  for (std::size_t i : keep) {
    if (h.signals[i].samples_per_record != h.signals[keep.front()].samples_per_record) {
      throw Error(ErrorKind::kParse,
                  fmt::format("EDF header field 'number of samples in each data record' differs "
                              "between EEG signals ('{}' has {}, '{}' has {})",
                              h.signals[i].label, h.signals[i].samples_per_record,
                              h.signals[keep.front()].label,
                              h.signals[keep.front()].samples_per_record));
    }
  }

  const std::size_t record_bytes = h.RecordBytes();
  const auto file_size = std::filesystem::file_size(path);
  const std::size_t data_bytes =
      file_size > static_cast<std::uintmax_t>(h.header_bytes) ? file_size - h.header_bytes : 0;
  const std::size_t whole_records = data_bytes / record_bytes;
  std::size_t num_records = whole_records;
  if (h.num_records >= 0) {
    const auto declared = static_cast<std::size_t>(h.num_records);
    if (whole_records < declared) {
      if (!options.keep_partial_records) {
        throw TruncationError(
            fmt::format("{} declares {} data records but holds {} whole records; "
                        "last whole data record kept would be #{}",
                        path.string(), declared, whole_records,
                        whole_records == 0 ? std::string("none")
                                           : std::to_string(whole_records - 1)),
            whole_records);
      }
      spdlog::warn("{}: truncated, keeping {} of {} data records", path.filename().string(),
                   whole_records, declared);
    } else {
      num_records = declared;
      if (data_bytes != declared * record_bytes) {
        spdlog::warn("{}: {} trailing bytes after the last data record ignored",
                     path.filename().string(), data_bytes - declared * record_bytes);
      }
    }
  }
  if (num_records == 0) {
    throw TruncationError(fmt::format("{} holds no whole data record", path.string()), 0);
  }

  const std::size_t spr = static_cast<std::size_t>(h.signals[keep.front()].samples_per_record);
  std::vector<std::vector<double>> samples(keep.size(), std::vector<double>(num_records * spr));
  std::vector<double> gain(h.signals.size());
  std::vector<double> offset(h.signals.size());
  for (std::size_t i = 0; i < h.signals.size(); ++i) {
    const auto& s = h.signals[i];
    gain[i] = (s.physical_max - s.physical_min) / (s.digital_max - s.digital_min);
    offset[i] = s.physical_min - gain[i] * s.digital_min;
  }
  std::vector<int> slot(h.signals.size(), -1);
  for (std::size_t k = 0; k < keep.size(); ++k) slot[keep[k]] = static_cast<int>(k);

  std::vector<unsigned char> record(record_bytes);
  in.seekg(h.header_bytes);
  for (std::size_t r = 0; r < num_records; ++r) {
    in.read(reinterpret_cast<char*>(record.data()), static_cast<std::streamsize>(record_bytes));
    if (static_cast<std::size_t>(in.gcount()) != record_bytes) {
      throw TruncationError(fmt::format("{}: short read in data record #{}", path.string(), r), r);
    }
    std::size_t pos = 0;
    for (std::size_t i = 0; i < h.signals.size(); ++i) {
      const auto n = static_cast<std::size_t>(h.signals[i].samples_per_record);
      if (slot[i] >= 0) {
        auto& dst = samples[static_cast<std::size_t>(slot[i])];
        for (std::size_t j = 0; j < n; ++j) {
          const auto raw = static_cast<std::int16_t>(
              static_cast<std::uint16_t>(record[pos + 2 * j]) |
              static_cast<std::uint16_t>(record[pos + 2 * j + 1] << 8));
          dst[r * spr + j] = offset[i] + gain[i] * raw;
        }
      }
      pos += 2 * n;
    }
  }

  std::vector<std::string> labels;
  labels.reserve(keep.size());
  for (std::size_t i : keep) labels.push_back(h.signals[i].label);
  return Recording(std::move(labels), rate, std::move(samples), 0.0);
}

void WriteEdf(const std::filesystem::path& path, const Recording& rec,
              const std::string& patient_id) {
  const std::size_t n = rec.num_samples();
  const auto rate = static_cast<std::size_t>(rec.rate());
  if (n % rate != 0) {
    throw Error(ErrorKind::kInput,
                fmt::format("EDF writer needs whole seconds of data; {} samples at {} Hz", n, rate));
  }
  const std::size_t num_records = n / rate;
  const std::size_t ns = rec.num_channels();

  std::vector<double> pmin(ns);
  std::vector<double> pmax(ns);
  std::vector<std::string> pmin_s(ns);
  std::vector<std::string> pmax_s(ns);
  for (std::size_t c = 0; c < ns; ++c) {
    auto x = rec.channel(c);
    auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    double a = *lo;
    double b = *hi;
    if (b - a < 1e-6) b = a + 1.0;
    pmin_s[c] = FormatBound(a, true);
    pmax_s[c] = FormatBound(b, false);
    pmin[c] = ParseNumber<double>(pmin_s[c], "physical minimum");
    pmax[c] = ParseNumber<double>(pmax_s[c], "physical maximum");
  }

  std::string header;
  header += Pad("0", 8);
  header += Pad(patient_id, 80);
  header += Pad("Startdate X X X X", 80);
  header += Pad("01.01.26", 8);
  header += Pad("00.00.00", 8);
  header += Pad(std::to_string(kFixedHeaderBytes + ns * kSignalHeaderBytes), 8);
  header += Pad("", 44);
  header += Pad(std::to_string(num_records), 8);
  header += Pad("1", 8);
  header += Pad(std::to_string(ns), 4);
  for (std::size_t c = 0; c < ns; ++c) header += Pad(rec.channels()[c], 16);
  for (std::size_t c = 0; c < ns; ++c) header += Pad("", 80);
  for (std::size_t c = 0; c < ns; ++c) header += Pad("uV", 8);
  for (std::size_t c = 0; c < ns; ++c) header += Pad(pmin_s[c], 8);
  for (std::size_t c = 0; c < ns; ++c) header += Pad(pmax_s[c], 8);
  for (std::size_t c = 0; c < ns; ++c) header += Pad(std::to_string(kDigitalMin), 8);
  for (std::size_t c = 0; c < ns; ++c) header += Pad(std::to_string(kDigitalMax), 8);
  for (std::size_t c = 0; c < ns; ++c) header += Pad("", 80);
  for (std::size_t c = 0; c < ns; ++c) header += Pad(std::to_string(rate), 8);
  for (std::size_t c = 0; c < ns; ++c) header += Pad("", 32);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kInput, fmt::format("cannot write EDF file {}", path.string()));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  std::vector<unsigned char> record(ns * rate * 2);
  for (std::size_t r = 0; r < num_records; ++r) {
    std::size_t pos = 0;
    for (std::size_t c = 0; c < ns; ++c) {
      auto x = rec.channel(c);
      const double scale = (kDigitalMax - kDigitalMin) / (pmax[c] - pmin[c]);
      for (std::size_t j = 0; j < rate; ++j) {
        const double d = std::round((x[r * rate + j] - pmin[c]) * scale + kDigitalMin);
        const auto v = static_cast<std::int16_t>(
            std::clamp(d, static_cast<double>(kDigitalMin), static_cast<double>(kDigitalMax)));
        const auto u = static_cast<std::uint16_t>(v);
        record[pos++] = static_cast<unsigned char>(u & 0xff);
        record[pos++] = static_cast<unsigned char>(u >> 8);
      }
    }
    out.write(reinterpret_cast<const char*>(record.data()),
              static_cast<std::streamsize>(record.size()));
  }
  if (!out) throw Error(ErrorKind::kInput, fmt::format("failed writing {}", path.string()));
}

}  // namespace sznet
