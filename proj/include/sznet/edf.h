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

#ifndef SZNET_EDF_H_
#define SZNET_EDF_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "sznet/recording.h"

namespace sznet {

struct EdfSignalHeader {
  std::string label;
  std::string transducer;
  std::string physical_dimension;
  double physical_min = 0.0;
  double physical_max = 0.0;
  int digital_min = 0;
  int digital_max = 0;
  std::string prefiltering;
  int samples_per_record = 0;
};

struct EdfHeader {
  std::string version;
  std::string patient;
  std::string recording;
  std::string start_date;
  std::string start_time;
  int header_bytes = 0;
  std::string reserved;
  long num_records = 0;  // -1 when unknown
  double record_duration_s = 0.0;
  std::vector<EdfSignalHeader> signals;

  std::size_t RecordBytes() const;
};

// Parses the fixed-width ASCII header. Throws Error(kParse) naming the
// offending field.
EdfHeader ReadEdfHeader(std::istream& in);

// Annotation channels, empty/placeholder labels ("-") and common non-EEG
// signal types (ECG, EMG, EOG, VNS, respiration, ...) are not EEG.
bool IsEegSignal(const EdfSignalHeader& signal);

struct EdfReadOptions {
  // When the file is shorter than the header promises, keep the whole
  // records that are present instead of throwing TruncationError.
  bool keep_partial_records = false;
};

// Reads the EEG signals of an EDF/EDF+C file as physical values. Repeated
// labels keep their first occurrence only.
Recording ReadEdf(const std::filesystem::path& path,
                  const EdfReadOptions& options = {});

// Writes a 16-bit EDF with one-second data records. Physical bounds are
// taken per channel from the data, so a read-back reproduces every sample
// to within one quantization step. The sample count must be a whole number
// of seconds.
void WriteEdf(const std::filesystem::path& path, const Recording& rec,
              const std::string& patient_id = "X X X X");

}  // namespace sznet

#endif  // SZNET_EDF_H_
