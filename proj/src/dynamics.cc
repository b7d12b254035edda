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

#include "sznet/dynamics.h"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "sznet/error.h"

namespace sznet {

void StateSequence::Validate() const {
  if (labels.size() != window_times.size() || labels.size() != periods.size()) {
    throw Error(ErrorKind::kShape,
                fmt::format("state sequence has {} labels, {} times, {} periods", labels.size(),
                            window_times.size(), periods.size()));
  }
  for (std::size_t t = 1; t < window_times.size(); ++t) {
    if (!(window_times[t] > window_times[t - 1])) {
      throw Error(ErrorKind::kShape,
                  fmt::format("window times not increasing at index {}", t));
    }
  }
}

TransitionMatrix EstimateTransitionMatrix(std::span<const StateSequence> sequences,
                                          std::size_t num_states) {
  std::size_t max_label = 0;
  bool any_pair = false;
  for (const auto& s : sequences) {
    s.Validate();
    for (std::size_t l : s.labels) max_label = std::max(max_label, l);
    any_pair = any_pair || s.size() >= 2;
  }
  if (!any_pair) {
    throw Error(ErrorKind::kLength, "transition estimation needs a sequence of at least 2 windows");
  }
  if (num_states == 0) num_states = max_label + 1;
  if (max_label >= num_states) {
    throw Error(ErrorKind::kShape,
                fmt::format("label {} out of range for {} states", max_label, num_states));
  }

  TransitionMatrix tm{SquareMatrix(num_states, 0.0), SquareMatrix(num_states, 0.0),
                      std::vector<bool>(num_states, false)};
  for (const auto& s : sequences) {
    for (std::size_t t = 0; t + 1 < s.size(); ++t) tm.counts(s.labels[t], s.labels[t + 1]) += 1.0;
  }
  for (std::size_t i = 0; i < num_states; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < num_states; ++j) total += tm.counts(i, j);
    if (total == 0.0) continue;
    tm.observed[i] = true;
    for (std::size_t j = 0; j < num_states; ++j) tm.probabilities(i, j) = tm.counts(i, j) / total;
  }
  return tm;
}

TransitionMatrix EstimateTransitionMatrix(const StateSequence& sequence, std::size_t num_states) {
  return EstimateTransitionMatrix(std::span<const StateSequence>(&sequence, 1), num_states);
}

std::optional<double> TransitionRate(const StateSequence& sequence, Period period) {
  sequence.Validate();
  std::size_t windows = 0;
  for (Period p : sequence.periods) windows += p == period ? 1 : 0;
  if (windows < 2) return std::nullopt;

  std::size_t changes = 0;
  double span = 0.0;
  for (std::size_t t = 0; t + 1 < sequence.size(); ++t) {
    if (sequence.periods[t] != period || sequence.periods[t + 1] != period) continue;
    span += sequence.window_times[t + 1] - sequence.window_times[t];
    if (sequence.labels[t] != sequence.labels[t + 1]) ++changes;
  }
  if (span <= 0.0) return std::nullopt;
  return static_cast<double>(changes) / span;
}

std::vector<std::size_t> StabilityRanking(const TransitionMatrix& tm) {
  std::vector<std::size_t> order(tm.num_states());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (tm.observed[a] != tm.observed[b]) return static_cast<bool>(tm.observed[a]);
    return tm.probabilities(a, a) > tm.probabilities(b, b);
  });
  return order;
}

std::string TransitionDiagramDot(const TransitionMatrix& tm, const std::string& title) {
  std::string out = fmt::format("digraph \"{}\" {{\n  rankdir=LR;\n", title);
  for (std::size_t i = 0; i < tm.num_states(); ++i) {
    out += fmt::format("  s{} [label=\"state {}\"{}];\n", i, i,
                       tm.observed[i] ? "" : ", style=dashed");
  }
  for (std::size_t i = 0; i < tm.num_states(); ++i) {
    for (std::size_t j = 0; j < tm.num_states(); ++j) {
      const double p = tm.probabilities(i, j);
      if (p > 0.0) out += fmt::format("  s{} -> s{} [label=\"{:.3f}\"];\n", i, j, p);
    }
  }
  out += "}\n";
  return out;
}

}  // namespace sznet
