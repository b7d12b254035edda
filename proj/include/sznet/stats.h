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

#ifndef SZNET_STATS_H_
#define SZNET_STATS_H_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sznet/recording.h"

namespace sznet {

enum class RankSumMethod { kExact, kNormalApprox };

const char* RankSumMethodName(RankSumMethod method);

struct RankSumResult {
  double u_statistic = 0.0;  // pairs (a_i, b_j) with a_i > b_j, ties count 1/2
  double rank_sum = 0.0;     // sum of the mid-ranks of a
  double p_two_sided = 1.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  RankSumMethod method = RankSumMethod::kExact;
};

// Ranks 1..n with ties replaced by their average rank.
std::vector<double> MidRanks(std::span<const double> values);

inline constexpr std::size_t kExactRankSumLimit = 12;

// Wilcoxon rank-sum (Mann-Whitney) test. The exact permutation distribution
// is used when min(n_a, n_b) <= 12 and there are no ties; otherwise the
// normal approximation with tie and continuity corrections. Throws
// Error(kInput) for an empty group or non-finite value.
RankSumResult WilcoxonRankSum(std::span<const double> a, std::span<const double> b);

// Metric values of one band grouped by period.
struct BandPeriodSamples {
  std::string band;
  std::vector<double> pre;
  std::vector<double> ictal;
  std::vector<double> post;

  const std::vector<double>& of(Period p) const;
};

struct PeriodComparison {
  std::string band;
  Period first = Period::kPre;
  Period second = Period::kIctal;
  RankSumResult result;
  bool significant = false;
};

inline constexpr double kSignificanceLevel = 0.05;

// One test per (band, pair), rows in band order then pair order.
std::vector<PeriodComparison> ComparePeriods(
    std::span<const BandPeriodSamples> bands,
    std::span<const std::pair<Period, Period>> pairs,
    double alpha = kSignificanceLevel);
std::vector<PeriodComparison> ComparePeriods(std::span<const BandPeriodSamples> bands,
                                             double alpha = kSignificanceLevel);

// CSV: band,pair,n_a,n_b,statistic,p,method,significant
std::string ComparisonCsv(std::span<const PeriodComparison> rows);

// Plain-text table, one row per band and one p-value column per pair;
// significant cells carry a trailing '*'.
std::string RenderComparisonTable(std::span<const PeriodComparison> rows,
                                  const std::string& title);

}  // namespace sznet

#endif  // SZNET_STATS_H_
