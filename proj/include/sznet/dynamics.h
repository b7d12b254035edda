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

#ifndef SZNET_DYNAMICS_H_
#define SZNET_DYNAMICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sznet/matrix.h"
#include "sznet/recording.h"

namespace sznet {

struct StateSequence {
  std::vector<std::size_t> labels;
  std::vector<double> window_times;  // window midpoints, seconds
  std::vector<Period> periods;

  // Throws Error(kShape) unless the three vectors have equal length and
  // window_times strictly increases.
  void Validate() const;
  std::size_t size() const { return labels.size(); }
};

struct TransitionMatrix {
  SquareMatrix counts;         // n_ij
  SquareMatrix probabilities;  // p_ij = n_ij / sum_j n_ij
  std::vector<bool> observed;  // false for rows without any transition

  std::size_t num_states() const { return counts.size(); }
};

// Counts consecutive label pairs (self-transitions included) of every
// sequence, never across sequences. num_states defaults to max label + 1.
// Throws Error(kLength) if no sequence has two windows.
TransitionMatrix EstimateTransitionMatrix(std::span<const StateSequence> sequences,
                                          std::size_t num_states = 0);
TransitionMatrix EstimateTransitionMatrix(const StateSequence& sequence,
                                          std::size_t num_states = 0);

// State changes per second among consecutive windows that both belong to
// period: changes / sum of the time between those windows. Pairs that
// straddle a period boundary are ignored. nullopt when fewer than two
// windows carry the label.
std::optional<double> TransitionRate(const StateSequence& sequence, Period period);

// States by descending self-transition probability, ties to the lower
// index, unobserved rows last.
std::vector<std::size_t> StabilityRanking(const TransitionMatrix& tm);

// Graphviz description of the diagram: one node per state, an edge for
// every p_ij > 0 labelled with the probability.
std::string TransitionDiagramDot(const TransitionMatrix& tm, const std::string& title);

}  // namespace sznet

#endif  // SZNET_DYNAMICS_H_
