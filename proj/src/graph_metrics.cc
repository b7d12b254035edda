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

#include "sznet/graph_metrics.h"

#include <algorithm>

#include <fmt/format.h>

#include "sznet/error.h"

namespace sznet {

WeightedGraph::WeightedGraph(SquareMatrix weights) : weights_(std::move(weights)) {
  const std::size_t n = weights_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (weights_(i, i) != 0.0) {
      throw Error(ErrorKind::kShape, fmt::format("non-zero diagonal weight at node {}", i));
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = weights_(i, j);
      if (w != weights_(j, i)) {
        throw Error(ErrorKind::kShape, fmt::format("weights ({}, {}) are not symmetric", i, j));
      }
      if (!(w >= 0.0 && w <= 1.0)) {
        throw Error(ErrorKind::kShape, fmt::format("weight ({}, {}) = {} outside [0, 1]", i, j, w));
      }
    }
  }
}

SquareMatrix ShortestPathLengths(const WeightedGraph& g) {
  const std::size_t n = g.size();
  SquareMatrix d(n, kUnreachable);
  for (std::size_t i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && g.weight(i, j) > 0.0) d(i, j) = 1.0 / g.weight(i, j);
    }
  }
  // Floyd-Warshall; N is the channel count so cubic cost is negligible.
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double dik = d(i, k);
      if (dik == kUnreachable) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const double via = dik + d(k, j);
        if (via < d(i, j)) d(i, j) = via;
      }
    }
  }
  return d;
}

PathLengthResult CharacteristicPathLength(const WeightedGraph& g) {
  const std::size_t n = g.size();
  if (n < 2) return {0.0, 1.0, true};
  const SquareMatrix d = ShortestPathLengths(g);
  double sum = 0.0;
  std::size_t finite = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || d(i, j) == kUnreachable) continue;
      sum += d(i, j);
      ++finite;
    }
  }
  const double pairs = static_cast<double>(n * (n - 1));
  PathLengthResult r;
  r.excluded_fraction = (pairs - static_cast<double>(finite)) / pairs;
  if (finite == 0) {
    r.disconnected = true;
    return r;
  }
  r.value = sum / static_cast<double>(finite);
  return r;
}

std::vector<double> ClusteringCoefficients(const WeightedGraph& g) {
  // w_ii = 0, so the l != i exclusions hold automatically; the inner sums run
  // over row k of W for the numerator and row i (minus entry k) for the
  // denominator.
  const std::size_t n = g.size();
  const SquareMatrix& w = g.weights();
  std::vector<double> c(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto wi = w.row(i);
    double numerator = 0.0;
    double denominator = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (wi[k] == 0.0) continue;
      auto wk = w.row(k);
      double closed = 0.0;
      double open = 0.0;
      for (std::size_t l = 0; l < n; ++l) {
        closed += wk[l] * wi[l];
        if (l != k) open += wi[l];
      }
      numerator += wi[k] * closed;
      denominator += wi[k] * open;
    }
    if (denominator > 0.0) c[i] = std::min(1.0, numerator / denominator);
  }
  return c;
}

FeatureVector MakeFeatureVector(const ConnectivityMatrix& m, double window_midpoint_s,
                                const PeriodBounds& bounds) {
  const WeightedGraph g(m.values);
  const PathLengthResult path = CharacteristicPathLength(g);
  const std::vector<double> c = ClusteringCoefficients(g);
  FeatureVector fv;
  fv.window_index = m.window_index;
  fv.band = m.band;
  fv.period = bounds.LabelAt(window_midpoint_s);
  fv.valid = !path.disconnected;
  fv.excluded_fraction = path.excluded_fraction;
  fv.values.reserve(c.size() + 1);
  fv.values.push_back(path.value);
  fv.values.insert(fv.values.end(), c.begin(), c.end());
  return fv;
}

}  // namespace sznet
