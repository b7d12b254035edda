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

#ifndef SZNET_DUMP_H_
#define SZNET_DUMP_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sznet/connectivity.h"
#include "sznet/recording.h"

namespace sznet {

// One row per sample, one column per channel, channel labels as header.
// Values are written in shortest round-trip form, so parsing restores them
// exactly. Rate, origin and transients travel separately.
std::string RecordingCsv(const Recording& rec);
Recording ParseRecordingCsv(std::string_view text, int rate, double start_time = 0.0,
                            std::size_t transient_head = 0, std::size_t transient_tail = 0);

// Self-describing little-endian dump:
//   char[8]  "SZREC01\0"
//   uint32   n_channels, rate
//   uint64   n_samples
//   float64  start_time
//   uint64   transient_head, transient_tail
//   n_channels x { uint16 length, label bytes }
//   n_channels x n_samples float64, channel-major
void WriteRecordingBinary(const std::filesystem::path& path, const Recording& rec);
// Throws Error(kDependency) when the file is missing, Error(kParse) when it
// is not a recording dump.
Recording ReadRecordingBinary(const std::filesystem::path& path);

// window_index,i,j,pli for every i < j.
std::string ConnectivityCsv(const std::vector<ConnectivityMatrix>& series);
std::vector<ConnectivityMatrix> ParseConnectivityCsv(std::string_view text,
                                                     const std::string& band,
                                                     std::size_t n_channels);

// Little-endian: uint32 n_channels, uint32 n_windows, then for each window
// the strict upper triangle as float64 in row-major order. Window indices
// are not stored; the reader numbers matrices 0..n_windows-1.
void WriteConnectivityBinary(const std::filesystem::path& path,
                             const std::vector<ConnectivityMatrix>& series);
std::vector<ConnectivityMatrix> ReadConnectivityBinary(const std::filesystem::path& path,
                                                       const std::string& band);

}  // namespace sznet

#endif  // SZNET_DUMP_H_
