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

#include "sznet/annotations.h"

#include <fstream>
#include <optional>
#include <regex>

#include <fmt/format.h>

#include "sznet/error.h"

namespace sznet {

namespace {

void FinishEntry(std::optional<SummaryEntry>& entry, int declared,
                 std::optional<double>& pending_start,
                 std::vector<SummaryEntry>& out) {
  if (!entry) return;
  if (pending_start) {
    throw Error(ErrorKind::kAnnotation,
                fmt::format("{}: seizure start at {} s has no matching end time",
                            entry->file_name, *pending_start));
  }
  if (declared >= 0 && static_cast<std::size_t>(declared) != entry->seizures.size()) {
    throw Error(ErrorKind::kAnnotation,
                fmt::format("{}: declares {} seizures but lists {}", entry->file_name,
                            declared, entry->seizures.size()));
  }
  out.push_back(std::move(*entry));
  entry.reset();
}

}  // namespace

std::vector<SummaryEntry> ParseSummary(std::istream& in) {
  static const std::regex kFileName(R"(^\s*File Name:\s*(\S+)\s*$)");
  static const std::regex kCount(R"(^\s*Number of Seizures in File:\s*(\d+)\s*$)");
  static const std::regex kStart(R"(^\s*Seizure(?:\s+\d+)?\s+Start Time:\s*([0-9.]+)\s*(?:seconds?)?\s*$)");
  static const std::regex kEnd(R"(^\s*Seizure(?:\s+\d+)?\s+End Time:\s*([0-9.]+)\s*(?:seconds?)?\s*$)");
  static const std::regex kChannelBlock(R"(^\s*(Channels in EDF Files|Channels changed):?.*$)");
  static const std::regex kChannel(R"(^\s*Channel\s+\d+:\s*(\S*)\s*$)");

  std::vector<SummaryEntry> out;
  std::vector<std::string> channels;
  bool channel_block_open = false;
  std::optional<SummaryEntry> entry;
  int declared = -1;
  std::optional<double> pending_start;

  std::string line;
  std::smatch m;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (std::regex_match(line, m, kChannelBlock)) {
      FinishEntry(entry, declared, pending_start, out);
      channels.clear();
      channel_block_open = true;
    } else if (std::regex_match(line, m, kChannel)) {
      if (!channel_block_open) {
        channels.clear();
        channel_block_open = true;
      }
      const std::string label = m[1];
      if (!label.empty() && label != "-") channels.push_back(label);
    } else if (std::regex_match(line, m, kFileName)) {
      FinishEntry(entry, declared, pending_start, out);
      channel_block_open = false;
      entry = SummaryEntry{m[1], channels, {}};
      declared = -1;
    } else if (std::regex_match(line, m, kCount)) {
      if (entry) declared = std::stoi(m[1]);
    } else if (std::regex_match(line, m, kStart)) {
      if (!entry) throw Error(ErrorKind::kAnnotation, "seizure start time outside a file stanza");
      if (pending_start) {
        throw Error(ErrorKind::kAnnotation,
                    fmt::format("{}: seizure start at {} s has no matching end time",
                                entry->file_name, *pending_start));
      }
      pending_start = std::stod(m[1]);
    } else if (std::regex_match(line, m, kEnd)) {
      if (!entry || !pending_start) {
        throw Error(ErrorKind::kAnnotation,
                    fmt::format("{}: seizure end time without a start time",
                                entry ? entry->file_name : std::string("<no file>")));
      }
      const double end = std::stod(m[1]);
      if (!(*pending_start < end)) {
        throw Error(ErrorKind::kAnnotation,
                    fmt::format("{}: seizure start {} s is not before end {} s",
                                entry->file_name, *pending_start, end));
      }
      entry->seizures.push_back(SeizureInterval{*pending_start, end, entry->file_name});
      pending_start.reset();
    }
  }
  FinishEntry(entry, declared, pending_start, out);
  return out;
}

std::vector<SummaryEntry> ParseSummaryFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kInput, fmt::format("cannot open summary file {}", path.string()));
  return ParseSummary(in);
}

std::vector<SeizureInterval> ParseSeizureAnnotations(const std::filesystem::path& path) {
  std::vector<SeizureInterval> out;
  for (auto& entry : ParseSummaryFile(path)) {
    for (auto& sz : entry.seizures) out.push_back(std::move(sz));
  }
  return out;
}

}  // namespace sznet
