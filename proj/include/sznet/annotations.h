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

#ifndef SZNET_ANNOTATIONS_H_
#define SZNET_ANNOTATIONS_H_

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "sznet/recording.h"

namespace sznet {

// One "File Name:" stanza of a CHB-MIT *-summary.txt file.
struct SummaryEntry {
  std::string file_name;
  // Channel list in effect for this file ("Channels in EDF Files:" or the
  // most recent "Channels changed:" block). Placeholder "-" entries dropped.
  std::vector<std::string> channels;
  std::vector<SeizureInterval> seizures;
};

// Parses a summary file. Throws Error(kAnnotation) when a seizure ends at or
// before its start, a start/end line is unpaired, or the declared seizure
// count of a stanza does not match the listed seizures.
std::vector<SummaryEntry> ParseSummary(std::istream& in);
std::vector<SummaryEntry> ParseSummaryFile(const std::filesystem::path& path);

// Every declared seizure, in file order.
std::vector<SeizureInterval> ParseSeizureAnnotations(const std::filesystem::path& path);

}  // namespace sznet

#endif  // SZNET_ANNOTATIONS_H_
