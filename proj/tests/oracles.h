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

// Slow reference implementations shared by the unit tests and the
// acceptance suite. They share no code with the library.

#ifndef SZNET_TESTS_ORACLES_H_
#define SZNET_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "sznet/clustering.h"
#include "sznet/graph_metrics.h"
#include "sznet/matrix.h"

namespace sznet::testing {

inline SquareMatrix RandomWeights(std::size_t n, double zero_prob, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::bernoulli_distribution zero(zero_prob);
  SquareMatrix w(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = zero(rng) ? 0.0 : u(rng);
      w(i, j) = v;
      w(j, i) = v;
    }
  }
  return w;
}

// Minimum over every simple path of the summed reciprocal weights.
inline SquareMatrix EnumeratedPaths(const SquareMatrix& w) {
  const std::size_t n = w.size();
  SquareMatrix best(n, kUnreachable);
  std::vector<bool> on_path(n, false);
  std::function<void(std::size_t, std::size_t, double)> walk =
      [&](std::size_t src, std::size_t at, double len) {
    best(src, at) = std::min(best(src, at), len);
    for (std::size_t next = 0; next < n; ++next) {
      if (on_path[next] || w(at, next) <= 0.0) continue;
      on_path[next] = true;
      walk(src, next, len + 1.0 / w(at, next));
      on_path[next] = false;
    }
  };
  for (std::size_t s = 0; s < n; ++s) {
    on_path[s] = true;
    walk(s, s, 0.0);
    on_path[s] = false;
  }
  return best;
}

inline double OracleL(const SquareMatrix& d, double* excluded) {
  const std::size_t n = d.size();
  double sum = 0.0;
  std::size_t finite = 0, missing = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (std::isfinite(d(i, j))) {
        sum += d(i, j);
        ++finite;
      } else {
        ++missing;
      }
    }
  }
  *excluded = static_cast<double>(missing) / static_cast<double>(n * (n - 1));
  return finite ? sum / static_cast<double>(finite) : 0.0;
}

inline std::vector<double> OracleC(const SquareMatrix& w) {
  const std::size_t n = w.size();
  std::vector<double> c(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t l = 0; l < n; ++l) {
        if (k == i || l == i || l == k) continue;
        num += w(i, k) * w(i, l) * w(k, l);
        den += w(i, k) * w(i, l);
      }
    }
    c[i] = den > 0.0 ? num / den : 0.0;
  }
  return c;
}

// Greedy Ward agglomeration that re-evaluates the exact increase in the
// within-cluster sum of squares of every pair at every step. A cluster's
// slot is its smallest member index; ties go to the lowest slot pair.
inline std::vector<MergeStep> OracleWard(const PointSet& pts) {
  struct Cluster {
    std::size_t id;
    std::vector<std::size_t> members;
  };
  const std::size_t n = pts.size();
  const std::size_t dim = pts[0].size();
  std::vector<Cluster> live;
  for (std::size_t i = 0; i < n; ++i) live.push_back({i, {i}});
  const auto sse = [&](const std::vector<std::size_t>& m) {
    std::vector<double> mean(dim, 0.0);
    for (std::size_t p : m) {
      for (std::size_t d = 0; d < dim; ++d) mean[d] += pts[p][d];
    }
    for (double& v : mean) v /= static_cast<double>(m.size());
    double acc = 0.0;
    for (std::size_t p : m) {
      for (std::size_t d = 0; d < dim; ++d) acc += (pts[p][d] - mean[d]) * (pts[p][d] - mean[d]);
    }
    return acc;
  };
  std::vector<MergeStep> out;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 0, slot_a = n, slot_b = n;
    for (std::size_t a = 0; a < live.size(); ++a) {
      for (std::size_t b = a + 1; b < live.size(); ++b) {
        std::vector<std::size_t> joined = live[a].members;
        joined.insert(joined.end(), live[b].members.begin(), live[b].members.end());
        const double cost = sse(joined) - sse(live[a].members) - sse(live[b].members);
        const std::size_t sa = std::min(live[a].members.front(), live[b].members.front());
        const std::size_t sb = std::max(live[a].members.front(), live[b].members.front());
        if (cost < best || (cost == best && std::make_pair(sa, sb) < std::make_pair(slot_a, slot_b))) {
          best = cost;
          ba = a;
          bb = b;
          slot_a = sa;
          slot_b = sb;
        }
      }
    }
    Cluster merged{n + step, live[ba].members};
    merged.members.insert(merged.members.end(), live[bb].members.begin(), live[bb].members.end());
    std::sort(merged.members.begin(), merged.members.end());
    out.push_back({std::min(live[ba].id, live[bb].id), std::max(live[ba].id, live[bb].id), best,
                   merged.members.size()});
    live.erase(live.begin() + static_cast<std::ptrdiff_t>(bb));
    live[ba] = merged;
  }
  return out;
}

}  // namespace sznet::testing

#endif  // SZNET_TESTS_ORACLES_H_
