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

#include "sznet/recording.h"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "sznet/error.h"

namespace sznet {

const char* PeriodName(Period period) {
  switch (period) {
    case Period::kPre: return "pre";
    case Period::kIctal: return "ictal";
    case Period::kPost: return "post";
  }
  return "?";
}

std::optional<Period> ParsePeriod(std::string_view name) {
  if (name == "pre") return Period::kPre;
  if (name == "ictal") return Period::kIctal;
  if (name == "post") return Period::kPost;
  return std::nullopt;
}

Recording::Recording(std::vector<std::string> channels, int rate,
                     std::vector<std::vector<double>> samples,
                     double start_time, std::size_t transient_head,
                     std::size_t transient_tail)
    : channels_(std::move(channels)),
      rate_(rate),
      samples_(std::move(samples)),
      start_time_(start_time),
      transient_head_(transient_head),
      transient_tail_(transient_tail) {
  if (channels_.empty()) throw Error(ErrorKind::kInput, "recording has no channels");
  if (rate_ <= 0) {
    throw Error(ErrorKind::kInput, fmt::format("sampling rate must be positive, got {}", rate_));
  }
  if (samples_.size() != channels_.size()) {
    throw Error(ErrorKind::kInput,
                fmt::format("{} channel labels but {} sample rows",
                            channels_.size(), samples_.size()));
  }
  const std::size_t n = samples_.front().size();
  if (n == 0) throw Error(ErrorKind::kInput, "recording has no samples");
  for (std::size_t c = 0; c < samples_.size(); ++c) {
    if (samples_[c].size() != n) {
      throw Error(ErrorKind::kInput,
                  fmt::format("channel '{}' has {} samples, expected {}",
                              channels_[c], samples_[c].size(), n));
    }
  }
  std::set<std::string> seen;
  for (const auto& label : channels_) {
    if (!seen.insert(label).second) {
      throw Error(ErrorKind::kInput, fmt::format("duplicate channel label '{}'", label));
    }
  }
}

Recording Recording::Slice(std::size_t begin, std::size_t end) const {
  const std::size_t n = num_samples();
  if (begin >= end || end > n) {
    throw Error(ErrorKind::kLength,
                fmt::format("slice [{}, {}) outside recording of {} samples", begin, end, n));
  }
  std::vector<std::vector<double>> out;
  out.reserve(samples_.size());
  for (const auto& row : samples_) {
    out.emplace_back(row.begin() + static_cast<std::ptrdiff_t>(begin),
                     row.begin() + static_cast<std::ptrdiff_t>(end));
  }
  const std::size_t head = transient_head_ > begin ? transient_head_ - begin : 0;
  const std::size_t cut_tail = n - end;
  const std::size_t tail = transient_tail_ > cut_tail ? transient_tail_ - cut_tail : 0;
  return Recording(channels_, rate_, std::move(out),
                   start_time_ + static_cast<double>(begin) / rate_,
                   std::min(head, end - begin), std::min(tail, end - begin));
}

Recording Recording::WithSamples(std::vector<std::vector<double>> samples,
                                 std::size_t transient_head,
                                 std::size_t transient_tail) const {
  return Recording(channels_, rate_, std::move(samples), start_time_,
                   transient_head, transient_tail);
}

Period PeriodBounds::LabelAt(double t) const {
  if (t < onset_s) return Period::kPre;
  if (t < offset_s) return Period::kIctal;
  return Period::kPost;
}

Recording RereferenceCommonAverage(const Recording& rec) {
  const std::size_t nch = rec.num_channels();
  if (nch < 2) {
    throw Error(ErrorKind::kMontage,
                "common-average reference needs at least 2 channels");
  }
  const std::size_t n = rec.num_samples();
  std::vector<double> mean(n, 0.0);
  for (std::size_t c = 0; c < nch; ++c) {
    auto x = rec.channel(c);
    for (std::size_t t = 0; t < n; ++t) mean[t] += x[t];
  }
  for (double& m : mean) m /= static_cast<double>(nch);

  std::vector<std::vector<double>> out(nch, std::vector<double>(n));
  for (std::size_t c = 0; c < nch; ++c) {
    auto x = rec.channel(c);
    for (std::size_t t = 0; t < n; ++t) out[c][t] = x[t] - mean[t];
  }
  return rec.WithSamples(std::move(out), rec.transient_head(), rec.transient_tail());
}

SegmentIndices LocateSegments(const Recording& rec, const SeizureInterval& sz) {
  if (!(sz.onset_s >= 0.0) || !(sz.onset_s < sz.offset_s)) {
    throw Error(ErrorKind::kAnnotation,
                fmt::format("invalid seizure interval [{}, {})", sz.onset_s, sz.offset_s));
  }
  const double rate = rec.rate();
  const auto to_index = [&](double t) {
    return std::llround((t - rec.start_time()) * rate);
  };
  const long long onset = to_index(sz.onset_s);
  const long long offset = to_index(sz.offset_s);
  const long long d = offset - onset;
  const long long n = static_cast<long long>(rec.num_samples());
  const double need_s = static_cast<double>(d) / rate;
  if (onset - d < 0) {
    throw Error(ErrorKind::kBoundary,
                fmt::format("seizure [{}, {}) in {}: needs {} s of pre-ictal data, "
                            "only {} s available",
                            sz.onset_s, sz.offset_s, sz.source_file, need_s,
                            static_cast<double>(std::max(0LL, onset)) / rate));
  }
  if (offset + d > n) {
    throw Error(ErrorKind::kBoundary,
                fmt::format("seizure [{}, {}) in {}: needs {} s of post-ictal data, "
                            "only {} s available",
                            sz.onset_s, sz.offset_s, sz.source_file, need_s,
                            static_cast<double>(std::max(0LL, n - offset)) / rate));
  }
  return {static_cast<std::size_t>(onset - d), static_cast<std::size_t>(onset),
          static_cast<std::size_t>(offset), static_cast<std::size_t>(offset + d)};
}

PeriodSegmentation SegmentPeriods(const Recording& rec, const SeizureInterval& sz) {
  const SegmentIndices idx = LocateSegments(rec, sz);
  const double rate = rec.rate();
  const double t0 = rec.start_time();
  PeriodBounds bounds{t0 + idx.pre_begin / rate, t0 + idx.onset / rate,
                      t0 + idx.offset / rate, t0 + idx.post_end / rate};
  return PeriodSegmentation{
      bounds,
      {Period::kPre, rec.Slice(idx.pre_begin, idx.onset)},
      {Period::kIctal, rec.Slice(idx.onset, idx.offset)},
      {Period::kPost, rec.Slice(idx.offset, idx.post_end)},
  };
}

void CheckMontage(const Recording& rec, const std::vector<std::string>& canonical) {
  const std::set<std::string> have(rec.channels().begin(), rec.channels().end());
  const std::set<std::string> want(canonical.begin(), canonical.end());
  std::vector<std::string> missing;
  std::vector<std::string> extra;
  std::set_difference(want.begin(), want.end(), have.begin(), have.end(),
                      std::back_inserter(missing));
  std::set_difference(have.begin(), have.end(), want.begin(), want.end(),
                      std::back_inserter(extra));
  if (!missing.empty() || !extra.empty()) {
    throw Error(ErrorKind::kMontage,
                fmt::format("channel set differs from the canonical montage; "
                            "missing [{}], unexpected [{}]",
                            fmt::join(missing, ", "), fmt::join(extra, ", ")));
  }
}

}  // namespace sznet
