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

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "sznet/error.h"
#include "sznet/stats.h"

namespace sznet {
namespace {

// Two-sided p from the full permutation distribution of the rank sum of a,
// enumerating every way of choosing which ranks belong to a.
double EnumeratedP(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> all(a);
  all.insert(all.end(), b.begin(), b.end());
  std::vector<double> sorted(all);
  std::sort(sorted.begin(), sorted.end());
  const auto rank = [&](double v) {
    return static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin()) + 1;
  };
  double observed = 0.0;
  for (double v : a) observed += rank(v);
  const std::size_t n = all.size(), m = a.size();
  std::size_t lower = 0, upper = 0, total = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != m) continue;
    double w = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      if (mask & (1u << r)) w += static_cast<double>(r + 1);
    }
    ++total;
    lower += w <= observed;
    upper += w >= observed;
  }
  return std::min(1.0, 2.0 * static_cast<double>(std::min(lower, upper)) / static_cast<double>(total));
}

// Normal approximation with continuity correction, no ties.
double NormalP(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0.0;
  for (double x : a) {
    for (double y : b) u += (x > y) ? 1.0 : 0.0;
  }
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double mu = na * nb / 2.0;
  const double sigma = std::sqrt(na * nb * (na + nb + 1) / 12.0);
  const double z = std::max(0.0, std::abs(u - mu) - 0.5) / sigma;
  return std::erfc(z / std::sqrt(2.0));
}

std::vector<double> Draw(std::mt19937_64& rng, std::size_t n, double shift = 0.0) {
  std::normal_distribution<double> g(shift, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

TEST_CASE("mid-ranks") {
  CHECK(MidRanks(std::vector<double>{10, 20, 20, 5}) == std::vector<double>{2, 3.5, 3.5, 1});
}

TEST_CASE("exact distribution for three against three") {
  const std::vector<double> a = {1, 2, 3}, b = {4, 5, 6};
  const RankSumResult r = WilcoxonRankSum(a, b);
  CHECK(r.method == RankSumMethod::kExact);
  CHECK(r.p_two_sided == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(EnumeratedP(a, b) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r.u_statistic == 0.0);
  CHECK(r.rank_sum == 6.0);
  CHECK(r.n_a == 3);
  CHECK(r.n_b == 3);
}

TEST_CASE("exact path matches enumeration") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> size(1, 8);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t na = size(rng), nb = std::min<std::size_t>(size(rng), 16 - na);
    const auto a = Draw(rng, na, trial % 2 ? 0.8 : 0.0);
    const auto b = Draw(rng, nb);
    const RankSumResult r = WilcoxonRankSum(a, b);
    CHECK(r.method == RankSumMethod::kExact);
    CHECK(r.p_two_sided == doctest::Approx(EnumeratedP(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("identical samples give p = 1") {
  const std::vector<double> a = {3.1, 4.2, 5.0, 7.7, 1.5};
  const RankSumResult r = WilcoxonRankSum(a, a);
  CHECK(r.method == RankSumMethod::kNormalApprox);  // every value is tied
  CHECK(r.p_two_sided == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<double> flat(20, 2.0);
  CHECK(WilcoxonRankSum(flat, flat).p_two_sided == 1.0);
}

TEST_CASE("exact and normal paths agree near the switch-over") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t na = 8 + trial % 5, nb = 8 + (trial / 5) % 5;
    const auto a = Draw(rng, na, (trial % 4) * 0.3);
    const auto b = Draw(rng, nb);
    const RankSumResult r = WilcoxonRankSum(a, b);
    REQUIRE(r.method == RankSumMethod::kExact);
    CHECK(std::abs(r.p_two_sided - NormalP(a, b)) <= 0.02);
  }
  // Past the limit the library switches to the approximation.
  const auto a = Draw(rng, 13), b = Draw(rng, 20);
  const RankSumResult r = WilcoxonRankSum(a, b);
  CHECK(r.method == RankSumMethod::kNormalApprox);
  CHECK(r.p_two_sided == doctest::Approx(NormalP(a, b)).epsilon(1e-12));
}

TEST_CASE("rank invariances") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = Draw(rng, 4 + trial % 20, 0.5);
    const auto b = Draw(rng, 3 + trial % 17);
    const double p = WilcoxonRankSum(a, b).p_two_sided;
    CHECK(WilcoxonRankSum(b, a).p_two_sided == doctest::Approx(p).epsilon(1e-12));
    std::vector<double> ta(a), tb(b);
    for (auto& v : ta) v = std::exp(v) * 3 + 1;
    for (auto& v : tb) v = std::exp(v) * 3 + 1;
    CHECK(WilcoxonRankSum(ta, tb).p_two_sided == p);
  }
}

TEST_CASE("null calibration") {
  std::mt19937_64 rng(2718);
  int rejections = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const auto a = Draw(rng, 25), b = Draw(rng, 25);
    rejections += WilcoxonRankSum(a, b).p_two_sided < 0.05;
  }
  const double rate = static_cast<double>(rejections) / trials;
  CHECK(rate >= 0.04);
  CHECK(rate <= 0.06);
}

TEST_CASE("planted shift") {
  std::mt19937_64 rng(55);
  const auto a = Draw(rng, 35);
  std::vector<double> b(a);
  for (auto& v : b) v += 10.0;
  CHECK(WilcoxonRankSum(a, b).p_two_sided < 0.001);
  CHECK(WilcoxonRankSum(b, a).p_two_sided < 0.001);
}

TEST_CASE("input errors") {
  const std::vector<double> empty, one = {1.0}, bad = {1.0, NAN};
  try {
    WilcoxonRankSum(empty, one);
    FAIL("expected an input error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInput);
  }
  CHECK_THROWS_AS(WilcoxonRankSum(one, bad), Error);
}

std::vector<BandPeriodSamples> FiveBands(std::mt19937_64& rng, double ictal_shift) {
  std::vector<BandPeriodSamples> out;
  for (const char* name : {"theta", "alpha", "beta", "low_gamma", "high_gamma"}) {
    BandPeriodSamples s;
    s.band = name;
    s.pre = Draw(rng, 35);
    s.ictal = Draw(rng, 35, ictal_shift);
    s.post = Draw(rng, 35);
    out.push_back(std::move(s));
  }
  return out;
}

TEST_CASE("period comparison table") {
  std::mt19937_64 rng(66);
  SUBCASE("layout") {
    const auto bands = FiveBands(rng, -5.0);
    const auto rows = ComparePeriods(bands);
    REQUIRE(rows.size() == 10);
    CHECK(rows[0].band == "theta");
    CHECK(rows[0].first == Period::kPre);
    CHECK(rows[0].second == Period::kIctal);
    CHECK(rows[1].first == Period::kIctal);
    CHECK(rows[1].second == Period::kPost);
    CHECK(rows[9].band == "high_gamma");
    for (const auto& r : rows) CHECK(r.significant);
    const std::string csv = ComparisonCsv(rows);
    CHECK(csv.rfind("band,pair,n_a,n_b,statistic,p,method,significant\n", 0) == 0);
    CHECK(csv.find("theta,pre-ictal,35,35,") != std::string::npos);
    CHECK(csv.find("high_gamma,ictal-post,35,35,") != std::string::npos);
    const std::string table = RenderComparisonTable(rows, "Transition rate");
    CHECK(table.find("Transition rate") != std::string::npos);
    const auto theta = table.find("theta");
    const auto gamma = table.find("high_gamma");
    REQUIRE(theta != std::string::npos);
    REQUIRE(gamma != std::string::npos);
    CHECK(theta < gamma);
    CHECK(table.find('*') != std::string::npos);
  }
  SUBCASE("identical groups are never significant") {
    auto bands = FiveBands(rng, 0.0);
    for (auto& b : bands) {
      b.ictal = b.pre;
      b.post = b.pre;
    }
    for (const auto& r : ComparePeriods(bands)) CHECK_FALSE(r.significant);
    CHECK(RenderComparisonTable(ComparePeriods(bands), "x").find('*') == std::string::npos);
  }
}

}  // namespace
}  // namespace sznet
