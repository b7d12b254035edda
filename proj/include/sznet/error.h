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

#ifndef SZNET_ERROR_H_
#define SZNET_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sznet {

enum class ErrorKind {
  kParse,
  kTruncation,
  kAnnotation,
  kMontage,
  kBoundary,
  kDesign,
  kLength,
  kShape,
  kParameter,
  kInput,
  kSplit,
  kEmptyPlan,
  kPlan,
  kDependency,
  kValidation,
};

const char* ErrorKindName(ErrorKind kind);

// All library failures are reported through this type; the kind lets callers
// (the CLI in particular) map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when an EDF file holds fewer bytes than its header promises.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& message, std::size_t records_kept);

  // Number of whole data records that could be read.
  std::size_t records_kept() const { return records_kept_; }

 private:
  std::size_t records_kept_;
};

}  // namespace sznet

#endif  // SZNET_ERROR_H_
