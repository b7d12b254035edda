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

#ifndef SZNET_CONNECTIVITY_H_
#define SZNET_CONNECTIVITY_H_

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sznet/matrix.h"
#include "sznet/recording.h"

namespace sznet {

// Discrete analytic signal: forward FFT, negative frequencies zeroed,
// positive ones doubled (DC and Nyquist untouched), inverse FFT.
// Throws Error(kLength) for an empty input.
std::vector<std::complex<double>> AnalyticSignal(std::span<const double> x);

// Angle of z wrapped to (-pi, pi].
double WrappedAngle(std::complex<double> z);

std::vector<double> InstantaneousPhase(std::span<const double> x);

// Sign of the phase difference a - b taken on the circle: +1 when a leads b
// by less than half a cycle, -1 when it lags, 0 when the two phases coincide
// or are exactly opposite.
int PhaseLeadSign(double a, double b);

// Phase lag index (1/N)|sum_t sign(phi1(t) - phi2(t))|, the difference being
// evaluated on the circle as in PhaseLeadSign. Throws Error(kShape) when the
// lengths differ or are zero.
double PhaseLagIndex(std::span<const double> phi1, std::span<const double> phi2);

struct PhaseSeries {
  std::vector<std::vector<double>> phases;  // per channel
  int rate = 0;
};

// Phase of every channel over the full length of rec.
PhaseSeries ComputePhases(const Recording& rec);

struct AnalysisWindow {
  std::size_t start = 0;  // first sample
  std::size_t end = 0;    // one past the last sample
  bool excluded = false;  // overlaps a filter transient
};

struct WindowPlan {
  double window_s = 2.0;
  double hop_s = 1.0;
  int rate = 0;
  std::vector<AnalysisWindow> windows;

  std::size_t NumValid() const;
};

// Sliding windows of window_s seconds every hop_s seconds. Windows touching
// the first transient_head or last transient_tail samples are excluded.
WindowPlan MakeWindowPlan(std::size_t num_samples, int rate, double window_s, double hop_s,
                          std::size_t transient_head = 0, std::size_t transient_tail = 0);
WindowPlan MakeWindowPlan(const Recording& rec, double window_s = 2.0, double hop_s = 1.0);

struct ConnectivityMatrix {
  std::string band;
  std::size_t window_index = 0;
  SquareMatrix values;  // symmetric PLI, zero diagonal
};

// PLI between every channel pair for each non-excluded window. Phases are
// extracted once over the whole recording and then windowed. Throws
// Error(kEmptyPlan) when the plan has no usable window.
std::vector<ConnectivityMatrix> ConnectivitySeries(const Recording& rec, const WindowPlan& plan,
                                                   const std::string& band);

}  // namespace sznet

#endif  // SZNET_CONNECTIVITY_H_
