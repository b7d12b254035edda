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

#ifndef SZNET_SYNTH_H_
#define SZNET_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sznet/recording.h"

namespace sznet {

// Channel j follows channel i by lag_rad on a shared oscillation centred at
// band_center_hz.
struct Coupling {
  std::size_t i = 0;
  std::size_t j = 0;
  double lag_rad = 0.0;
  double band_center_hz = 10.0;
};

struct SynthSpec {
  std::size_t n_channels = 4;
  int rate = 256;
  double duration_s = 10.0;
  std::vector<Coupling> coupling;
  double noise_sigma = 0.0;
  // Zero-lag source added to every channel (volume-conduction model).
  double common_source_gain = 0.0;
  double common_source_hz = 10.0;
  // Spectral width of each oscillation, realised as a phase random walk.
  double oscillator_bandwidth_hz = 0.5;
  std::uint64_t seed = 1;
};

// Labels "ch01", "ch02", ...
std::vector<std::string> SynthChannelLabels(std::size_t n);

// Couplings that share a frequency and are connected through common
// channels are driven by one oscillator; every channel's phase offset is
// propagated along the coupling edges. Independent Gaussian noise of
// noise_sigma is added per channel. Identical specs give bit-identical
// output. Throws Error(kParameter) for lags outside (-pi, pi], bad channel
// indices or non-positive sizes; a zero lag only logs a warning.
Recording CoupledOscillators(const SynthSpec& spec);

struct StateSegment {
  std::size_t state = 0;
  double duration_s = 0.0;
  Period period = Period::kPre;
};

struct TruthWindow {
  std::size_t window_index = 0;
  double mid_s = 0.0;
  std::size_t state = 0;   // state at the window midpoint
  Period period = Period::kPre;
  bool pure = true;        // the whole window lies in one segment
};

struct StateDataset {
  Recording recording;
  std::vector<std::size_t> sample_states;
  std::vector<Period> sample_periods;
  std::vector<TruthWindow> windows;
};

// Concatenates one CoupledOscillators segment per plan entry, segment s
// seeded with seed + s. States index into state_specs, which must agree on
// channel count and rate; their durations are ignored. Throws Error(kPlan)
// for fewer than two distinct state specs, an unknown state, or a segment
// shorter than one window or not a whole number of hops.
StateDataset ThreeStateDataset(const std::vector<SynthSpec>& state_specs,
                               const std::vector<StateSegment>& plan, std::uint64_t seed,
                               double window_s = 2.0, double hop_s = 1.0);

// A synthetic patient laid out like a CHB-MIT directory: one EDF per
// seizure holding lead + pre + ictal + post + tail, and a summary file.
struct SyntheticSeizure {
  double lead_s = 10.0;
  double duration_s = 40.0;  // ictal length; pre and post match it
  double tail_s = 10.0;
  std::size_t pre_state = 0;
  std::size_t ictal_state = 1;
  std::size_t post_state = 2;
};

struct SyntheticPatientSpec {
  std::string patient = "syn01";
  std::vector<SynthSpec> states;
  std::vector<SyntheticSeizure> seizures;
  std::uint64_t seed = 1;
};

// Three states on 12 channels: three disjoint four-channel cliques with
// lagged coupling in every analysis band, plus white noise.
SyntheticPatientSpec DefaultThreeStateFixture();

// Writes <dir>/<patient>/<patient>_NN.edf, <patient>-summary.txt and, per
// file, <patient>_NN_truth.csv (window_index,time_s,period,state,pure)
// over the analysis span [onset - D, offset + D).
void WriteSyntheticPatient(const std::filesystem::path& dir, const SyntheticPatientSpec& spec,
                           double window_s = 2.0, double hop_s = 1.0);

}  // namespace sznet

#endif  // SZNET_SYNTH_H_
