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

#ifndef SZNET_RECORDING_H_
#define SZNET_RECORDING_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sznet {

enum class Period { kPre, kIctal, kPost };

// "pre", "ictal", "post".
const char* PeriodName(Period period);
std::optional<Period> ParsePeriod(std::string_view name);

// Multichannel signal in physical units (microvolts). Immutable once built.
//
// Samples are stored channel-major. start_time is the offset in seconds of the
// first sample relative to the start of the source file. transient_head and
// transient_tail count samples at either end that are contaminated by filter
// start-up and should not be analysed.
class Recording {
 public:
  // Throws Error(kInput) when the invariants do not hold: at least one
  // channel, rate > 0, equal non-zero sample counts, unique labels.
  Recording(std::vector<std::string> channels, int rate,
            std::vector<std::vector<double>> samples, double start_time = 0.0,
            std::size_t transient_head = 0, std::size_t transient_tail = 0);

  const std::vector<std::string>& channels() const { return channels_; }
  int rate() const { return rate_; }
  double start_time() const { return start_time_; }
  std::size_t num_channels() const { return channels_.size(); }
  std::size_t num_samples() const { return samples_.front().size(); }
  double duration() const {
    return static_cast<double>(num_samples()) / rate_;
  }

  std::span<const double> channel(std::size_t i) const { return samples_[i]; }
  const std::vector<std::vector<double>>& samples() const { return samples_; }

  std::size_t transient_head() const { return transient_head_; }
  std::size_t transient_tail() const { return transient_tail_; }

  // Samples [begin, end); transient flags are clipped to the slice.
  Recording Slice(std::size_t begin, std::size_t end) const;

  // Same labels, rate and origin with new sample data and transient counts.
  Recording WithSamples(std::vector<std::vector<double>> samples,
                        std::size_t transient_head,
                        std::size_t transient_tail) const;

 private:
  std::vector<std::string> channels_;
  int rate_;
  std::vector<std::vector<double>> samples_;
  double start_time_;
  std::size_t transient_head_;
  std::size_t transient_tail_;
};

struct SeizureInterval {
  double onset_s = 0.0;
  double offset_s = 0.0;
  std::string source_file;

  double duration() const { return offset_s - onset_s; }
};

// Time boundaries of the three analysis periods, in source-file seconds.
// Each period is half-open: pre = [pre_start, onset), ictal = [onset,
// offset), post = [offset, post_end).
struct PeriodBounds {
  double pre_start_s = 0.0;
  double onset_s = 0.0;
  double offset_s = 0.0;
  double post_end_s = 0.0;

  Period LabelAt(double t) const;
};

struct PeriodSlice {
  Period period;
  Recording recording;
};

struct PeriodSegmentation {
  PeriodBounds bounds;
  PeriodSlice pre;
  PeriodSlice ictal;
  PeriodSlice post;
};

// Sample indices of the segmentation within a recording.
struct SegmentIndices {
  std::size_t pre_begin;
  std::size_t onset;
  std::size_t offset;
  std::size_t post_end;
};

// Subtracts the across-channel mean at every time point.
// Throws Error(kMontage) for single-channel input.
Recording RereferenceCommonAverage(const Recording& rec);

// Locates [onset - D, onset), [onset, offset), [offset, offset + D) with
// D = offset - onset. Throws Error(kBoundary) naming the available margin
// when the recording does not cover the whole span.
SegmentIndices LocateSegments(const Recording& rec, const SeizureInterval& sz);
PeriodSegmentation SegmentPeriods(const Recording& rec,
                                  const SeizureInterval& sz);

// Throws Error(kMontage) listing missing and unexpected labels when the
// channel set of rec differs from canonical (order is ignored).
void CheckMontage(const Recording& rec,
                  const std::vector<std::string>& canonical);

}  // namespace sznet

#endif  // SZNET_RECORDING_H_
