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

#include "sznet/stats.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "sznet/error.h"

namespace sznet {

namespace {

// Number of arrangements giving each value of U for group sizes (m, n),
// built with c(u; m, n) = c(u - n; m - 1, n) + c(u; m, n - 1).
std::vector<double> ExactUCounts(std::size_t m, std::size_t n) {
  std::vector<std::vector<double>> prev(m + 1);
  std::vector<std::vector<double>> cur(m + 1);
  for (std::size_t i = 0; i <= m; ++i) prev[i] = {1.0};  // n = 0: only U = 0
  for (std::size_t nn = 1; nn <= n; ++nn) {
    cur[0] = {1.0};
    for (std::size_t mm = 1; mm <= m; ++mm) {
      std::vector<double>& c = cur[mm];
      c.assign(mm * nn + 1, 0.0);
      const auto& left = cur[mm - 1];  // (mm - 1, nn), shifted by nn
      for (std::size_t u = 0; u < left.size(); ++u) c[u + nn] += left[u];
      const auto& down = prev[mm];     // (mm, nn - 1)
      for (std::size_t u = 0; u < down.size(); ++u) c[u] += down[u];
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

const char* PairName(Period a, Period b) {
  if (a == Period::kPre && b == Period::kIctal) return "pre-ictal";
  if (a == Period::kIctal && b == Period::kPost) return "ictal-post";
  if (a == Period::kPre && b == Period::kPost) return "pre-post";
  return "other";
}

}  // namespace

const char* RankSumMethodName(RankSumMethod method) {
  return method == RankSumMethod::kExact ? "exact" : "normal-approx";
}

std::vector<double> MidRanks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of i+1 .. j
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

RankSumResult WilcoxonRankSum(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorKind::kInput,
                fmt::format("rank-sum test needs two non-empty groups, got {} and {}", a.size(),
                            b.size()));
  }
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  for (double v : pooled) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kInput, "rank-sum test input is not finite");
  }
  const std::vector<double> ranks = MidRanks(pooled);

  RankSumResult r;
  r.n_a = a.size();
  r.n_b = b.size();
  const double na = static_cast<double>(r.n_a);
  const double nb = static_cast<double>(r.n_b);
  const double n = na + nb;
  for (std::size_t i = 0; i < r.n_a; ++i) r.rank_sum += ranks[i];
  r.u_statistic = r.rank_sum - na * (na + 1.0) / 2.0;

  // Tie groups: sum of t^3 - t.
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }

  if (std::min(r.n_a, r.n_b) <= kExactRankSumLimit && tie_term == 0.0) {
    r.method = RankSumMethod::kExact;
    // U is integral without ties. The distribution of U_a for sizes
    // (n_a, n_b) equals that of U_b with the roles swapped, so build it for
    // the smaller group.
    const bool a_small = r.n_a <= r.n_b;
    const std::size_t m = a_small ? r.n_a : r.n_b;
    const std::size_t other = a_small ? r.n_b : r.n_a;
    const std::vector<double> counts = ExactUCounts(m, other);
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    const auto u = static_cast<std::size_t>(std::llround(a_small ? r.u_statistic
                                                                 : na * nb - r.u_statistic));
    double lower = 0.0;
    for (std::size_t k = 0; k <= u; ++k) lower += counts[k];
    double upper = 0.0;
    for (std::size_t k = u; k < counts.size(); ++k) upper += counts[k];
    r.p_two_sided = std::min(1.0, 2.0 * std::min(lower, upper) / total);
    return r;
  }

  r.method = RankSumMethod::kNormalApprox;
  const double variance = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (!(variance > 0.0)) {
    r.p_two_sided = 1.0;
    return r;
  }
  const double z = std::max(0.0, std::abs(r.u_statistic - na * nb / 2.0) - 0.5) /
                   std::sqrt(variance);
  r.p_two_sided = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return r;
}

const std::vector<double>& BandPeriodSamples::of(Period p) const {
  switch (p) {
    case Period::kPre: return pre;
    case Period::kIctal: return ictal;
    case Period::kPost: return post;
  }
  return pre;
}

std::vector<PeriodComparison> ComparePeriods(std::span<const BandPeriodSamples> bands,
                                             std::span<const std::pair<Period, Period>> pairs,
                                             double alpha) {
  std::vector<PeriodComparison> rows;
  for (const auto& band : bands) {
    for (const auto& [first, second] : pairs) {
      PeriodComparison row;
      row.band = band.band;
      row.first = first;
      row.second = second;
      row.result = WilcoxonRankSum(band.of(first), band.of(second));
      row.significant = row.result.p_two_sided < alpha;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<PeriodComparison> ComparePeriods(std::span<const BandPeriodSamples> bands,
                                             double alpha) {
  static const std::pair<Period, Period> kPairs[] = {{Period::kPre, Period::kIctal},
                                                      {Period::kIctal, Period::kPost}};
  return ComparePeriods(bands, kPairs, alpha);
}

std::string ComparisonCsv(std::span<const PeriodComparison> rows) {
  std::string out = "band,pair,n_a,n_b,statistic,p,method,significant\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", r.band, PairName(r.first, r.second),
                       r.result.n_a, r.result.n_b, r.result.u_statistic, r.result.p_two_sided,
                       RankSumMethodName(r.result.method), r.significant ? 1 : 0);
  }
  return out;
}

std::string RenderComparisonTable(std::span<const PeriodComparison> rows,
                                  const std::string& title) {
  std::vector<std::string> bands;
  std::vector<std::pair<Period, Period>> pairs;
  std::map<std::pair<std::string, std::string>, const PeriodComparison*> cell;
  for (const auto& r : rows) {
    if (std::find(bands.begin(), bands.end(), r.band) == bands.end()) bands.push_back(r.band);
    const std::pair<Period, Period> pr{r.first, r.second};
    if (std::find(pairs.begin(), pairs.end(), pr) == pairs.end()) pairs.push_back(pr);
    cell[{r.band, PairName(r.first, r.second)}] = &r;
  }
  std::string out = title + "\n";
  std::string header = fmt::format("{:<16}", "Frequency Band");
  for (const auto& [a, b] : pairs) {
    header += fmt::format("  {:>24}", fmt::format("P-Value ({}, {})", PeriodName(a), PeriodName(b)));
  }
  const std::string rule(header.size(), '=');
  out += rule + "\n" + header + "\n" + std::string(header.size(), '-') + "\n";
  for (const auto& band : bands) {
    std::string line = fmt::format("{:<16}", band);
    for (const auto& [a, b] : pairs) {
      auto it = cell.find({band, PairName(a, b)});
      if (it == cell.end()) {
        line += fmt::format("  {:>24}", "-");
      } else {
        const auto& r = *it->second;
        line += fmt::format("  {:>24}", fmt::format("{:.4g}{}", r.result.p_two_sided,
                                                    r.significant ? "*" : ""));
      }
    }
    out += line + "\n";
  }
  out += rule + "\n";
  return out;
}

}  // namespace sznet
