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

#ifndef SZNET_CSV_H_
#define SZNET_CSV_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sznet {

// Comma-separated table with a header row. Fields never contain commas,
// quotes or newlines in the files this library writes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column. Throws Error(kParse) when absent.
  std::size_t Column(std::string_view name) const;
};

CsvTable ParseCsv(std::string_view text);
// Throws Error(kDependency) naming the path when the file is missing.
CsvTable ReadCsv(const std::filesystem::path& path);

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double v);
// Throws Error(kParse) unless the whole field is a number.
double ParseDouble(std::string_view field);
long long ParseInteger(std::string_view field);

// Creates parent directories and writes the whole file.
void WriteTextFile(const std::filesystem::path& path, std::string_view content);
// Throws Error(kDependency) naming the path when the file is missing.
std::string ReadTextFile(const std::filesystem::path& path);

}  // namespace sznet

#endif  // SZNET_CSV_H_
