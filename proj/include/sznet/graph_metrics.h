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

#ifndef SZNET_GRAPH_METRICS_H_
#define SZNET_GRAPH_METRICS_H_

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "sznet/connectivity.h"
#include "sznet/matrix.h"
#include "sznet/recording.h"

namespace sznet {

// Undirected weighted graph with weights in [0, 1] and a zero diagonal.
class WeightedGraph {
 public:
  // Throws Error(kShape) if weights is not symmetric, has a non-zero
  // diagonal or an entry outside [0, 1].
  explicit WeightedGraph(SquareMatrix weights);

  std::size_t size() const { return weights_.size(); }
  double weight(std::size_t i, std::size_t j) const { return weights_(i, j); }
  const SquareMatrix& weights() const { return weights_; }

 private:
  SquareMatrix weights_;
};

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

// All-pairs shortest paths where an edge of weight w has length 1/w.
// Zero-weight entries are not edges; unreachable pairs hold kUnreachable.
SquareMatrix ShortestPathLengths(const WeightedGraph& g);

struct PathLengthResult {
  double value = 0.0;              // mean over reachable ordered pairs
  double excluded_fraction = 0.0;  // unreachable ordered pairs / N(N-1)
  bool disconnected = false;       // no reachable pair at all
};

PathLengthResult CharacteristicPathLength(const WeightedGraph& g);

// Weighted clustering coefficient of every node:
//   C_i = sum_{k!=i} sum_{l!=i,k} w_ik w_il w_kl / sum_{k!=i} sum_{l!=i,k} w_ik w_il
// and 0 where the denominator vanishes.
std::vector<double> ClusteringCoefficients(const WeightedGraph& g);

struct FeatureVector {
  std::size_t window_index = 0;
  std::string band;
  std::vector<double> values;  // [L, C_1, ..., C_N]
  Period period = Period::kPre;
  bool valid = true;           // false when the graph is fully disconnected
  double excluded_fraction = 0.0;
};

// Features of one connectivity window. The period is taken from the window
// midpoint (seconds, same origin as bounds).
FeatureVector MakeFeatureVector(const ConnectivityMatrix& m, double window_midpoint_s,
                                const PeriodBounds& bounds);

}  // namespace sznet

#endif  // SZNET_GRAPH_METRICS_H_
