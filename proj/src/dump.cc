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

#include "sznet/dump.h"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <type_traits>

#include <fmt/format.h>

#include "sznet/csv.h"
#include "sznet/error.h"

namespace sznet {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

constexpr char kRecordingMagic[8] = {'S', 'Z', 'R', 'E', 'C', '0', '1', '\0'};

template <typename T>
void Put(std::string& out, T v) {
  static_assert(std::is_arithmetic_v<T>);
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(bytes, sizeof(T));
}

class Reader {
 public:
  Reader(std::string data, std::string name) : data_(std::move(data)), name_(std::move(name)) {}

  template <typename T>
  T Get() {
    Need(sizeof(T));
    char bytes[sizeof(T)];
    std::memcpy(bytes, data_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, bytes, sizeof(T));
    return v;
  }

  std::string Bytes(std::size_t n) {
    Need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool AtEnd() const { return pos_ == data_.size(); }

 private:
  void Need(std::size_t n) const {
    if (data_.size() - pos_ < n) {
      throw Error(ErrorKind::kParse, fmt::format("{} ends unexpectedly at byte {}", name_, pos_));
    }
  }

  std::string data_;
  std::string name_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string RecordingCsv(const Recording& rec) {
  fmt::memory_buffer buf;
  for (std::size_t c = 0; c < rec.num_channels(); ++c) {
    fmt::format_to(std::back_inserter(buf), "{}{}", c ? "," : "", rec.channels()[c]);
  }
  buf.push_back('\n');
  for (std::size_t t = 0; t < rec.num_samples(); ++t) {
    for (std::size_t c = 0; c < rec.num_channels(); ++c) {
      fmt::format_to(std::back_inserter(buf), "{}{}", c ? "," : "", rec.channel(c)[t]);
    }
    buf.push_back('\n');
  }
  return fmt::to_string(buf);
}

Recording ParseRecordingCsv(std::string_view text, int rate, double start_time,
                            std::size_t transient_head, std::size_t transient_tail) {
  const CsvTable table = ParseCsv(text);
  std::vector<std::vector<double>> samples(table.header.size());
  for (auto& ch : samples) ch.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) samples[c].push_back(ParseDouble(row[c]));
  }
  return Recording(table.header, rate, std::move(samples), start_time, transient_head,
                   transient_tail);
}

void WriteRecordingBinary(const std::filesystem::path& path, const Recording& rec) {
  std::string out(kRecordingMagic, sizeof(kRecordingMagic));
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(rec.num_channels()));
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(rec.rate()));
  Put<std::uint64_t>(out, rec.num_samples());
  Put<double>(out, rec.start_time());
  Put<std::uint64_t>(out, rec.transient_head());
  Put<std::uint64_t>(out, rec.transient_tail());
  for (const auto& label : rec.channels()) {
    Put<std::uint16_t>(out, static_cast<std::uint16_t>(label.size()));
    out += label;
  }
  out.reserve(out.size() + rec.num_channels() * rec.num_samples() * sizeof(double));
  for (std::size_t c = 0; c < rec.num_channels(); ++c) {
    for (double v : rec.channel(c)) Put<double>(out, v);
  }
  WriteTextFile(path, out);
}

Recording ReadRecordingBinary(const std::filesystem::path& path) {
  Reader in(ReadTextFile(path), path.string());
  if (in.Bytes(sizeof(kRecordingMagic)) != std::string(kRecordingMagic, sizeof(kRecordingMagic))) {
    throw Error(ErrorKind::kParse, fmt::format("{} is not a recording dump", path.string()));
  }
  const auto nch = in.Get<std::uint32_t>();
  const auto rate = in.Get<std::uint32_t>();
  const auto n = in.Get<std::uint64_t>();
  const double start = in.Get<double>();
  const auto head = in.Get<std::uint64_t>();
  const auto tail = in.Get<std::uint64_t>();
  std::vector<std::string> labels;
  for (std::uint32_t c = 0; c < nch; ++c) labels.push_back(in.Bytes(in.Get<std::uint16_t>()));
  std::vector<std::vector<double>> samples(nch, std::vector<double>(n));
  for (auto& ch : samples) {
    for (auto& v : ch) v = in.Get<double>();
  }
  if (!in.AtEnd()) {
    throw Error(ErrorKind::kParse, fmt::format("{} has trailing bytes", path.string()));
  }
  return Recording(std::move(labels), static_cast<int>(rate), std::move(samples), start, head,
                   tail);
}

std::string ConnectivityCsv(const std::vector<ConnectivityMatrix>& series) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "window_index,i,j,pli\n");
  for (const auto& m : series) {
    const std::size_t n = m.values.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        fmt::format_to(std::back_inserter(buf), "{},{},{},{}\n", m.window_index, i, j,
                       m.values(i, j));
      }
    }
  }
  return fmt::to_string(buf);
}

std::vector<ConnectivityMatrix> ParseConnectivityCsv(std::string_view text,
                                                     const std::string& band,
                                                     std::size_t n_channels) {
  const CsvTable table = ParseCsv(text);
  const std::size_t cw = table.Column("window_index");
  const std::size_t ci = table.Column("i");
  const std::size_t cj = table.Column("j");
  const std::size_t cp = table.Column("pli");
  std::vector<ConnectivityMatrix> out;
  for (const auto& row : table.rows) {
    const auto w = static_cast<std::size_t>(ParseInteger(row[cw]));
    const auto i = static_cast<std::size_t>(ParseInteger(row[ci]));
    const auto j = static_cast<std::size_t>(ParseInteger(row[cj]));
    if (i >= n_channels || j >= n_channels || i >= j) {
      throw Error(ErrorKind::kParse,
                  fmt::format("connectivity entry ({}, {}) invalid for {} channels", i, j,
                              n_channels));
    }
    if (out.empty() || out.back().window_index != w) {
      if (!out.empty() && out.back().window_index > w) {
        throw Error(ErrorKind::kParse, "connectivity rows are not ordered by window");
      }
      out.push_back(ConnectivityMatrix{band, w, SquareMatrix(n_channels)});
    }
    const double v = ParseDouble(row[cp]);
    out.back().values(i, j) = v;
    out.back().values(j, i) = v;
  }
  return out;
}

void WriteConnectivityBinary(const std::filesystem::path& path,
                             const std::vector<ConnectivityMatrix>& series) {
  const std::size_t n = series.empty() ? 0 : series.front().values.size();
  std::string out;
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(n));
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(series.size()));
  for (const auto& m : series) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) Put<double>(out, m.values(i, j));
    }
  }
  WriteTextFile(path, out);
}

std::vector<ConnectivityMatrix> ReadConnectivityBinary(const std::filesystem::path& path,
                                                       const std::string& band) {
  Reader in(ReadTextFile(path), path.string());
  const auto n = in.Get<std::uint32_t>();
  const auto windows = in.Get<std::uint32_t>();
  std::vector<ConnectivityMatrix> out;
  for (std::uint32_t w = 0; w < windows; ++w) {
    ConnectivityMatrix m{band, w, SquareMatrix(n)};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        m.values(i, j) = m.values(j, i) = in.Get<double>();
      }
    }
    out.push_back(std::move(m));
  }
  if (!in.AtEnd()) {
    throw Error(ErrorKind::kParse, fmt::format("{} has trailing bytes", path.string()));
  }
  return out;
}

}  // namespace sznet
