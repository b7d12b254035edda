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

#include "sznet/error.h"

namespace sznet {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kTruncation: return "truncation error";
    case ErrorKind::kAnnotation: return "annotation error";
    case ErrorKind::kMontage: return "unsupported montage";
    case ErrorKind::kBoundary: return "boundary error";
    case ErrorKind::kDesign: return "filter design error";
    case ErrorKind::kLength: return "length error";
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kParameter: return "parameter error";
    case ErrorKind::kInput: return "input error";
    case ErrorKind::kSplit: return "split error";
    case ErrorKind::kEmptyPlan: return "empty window plan";
    case ErrorKind::kPlan: return "plan error";
    case ErrorKind::kDependency: return "dependency error";
    case ErrorKind::kValidation: return "validation error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
      kind_(kind) {}

TruncationError::TruncationError(const std::string& message,
                                 std::size_t records_kept)
    : Error(ErrorKind::kTruncation, message), records_kept_(records_kept) {}

}  // namespace sznet
