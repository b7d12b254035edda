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

#ifndef SZNET_FIR_H_
#define SZNET_FIR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sznet/recording.h"

namespace sznet {

struct BandDefinition {
  std::string name;
  double low_hz = 0.0;
  double high_hz = 0.0;
};

// theta 4-8, alpha 8-13, beta 13-30, low_gamma 30-60, high_gamma 60-80 Hz.
std::vector<BandDefinition> CanonicalBands();

// Throws Error(kDesign) unless 0 < low < high < rate/2.
void ValidateBand(const BandDefinition& band, int rate);

enum class FilterKind { kHighpass, kBandpass, kBandstop };

const char* FilterKindName(FilterKind kind);

struct FirDesign {
  FilterKind kind = FilterKind::kBandpass;
  std::vector<double> edges_hz;  // one edge for highpass, two otherwise
  double transition_hz = 0.0;
  int rate = 0;
  std::string window = "hamming";
};

// Type-I linear-phase FIR filter: odd length, taps symmetric about the
// centre tap.
struct FirFilter {
  std::vector<double> taps;
  FirDesign design;

  std::size_t order() const { return taps.size() - 1; }
  // Group delay in samples, also the transient length at each end.
  std::size_t half_length() const { return (taps.size() - 1) / 2; }
};

// ceil(3.3 * rate / transition), bumped to the next odd number.
std::size_t FirTapCount(int rate, double transition_hz);

// Hamming-windowed sinc design with the -6 dB points at the band edges.
// Throws Error(kDesign) for edges outside (0, rate/2) or a non-positive
// transition width.
FirFilter DesignFir(FilterKind kind, std::vector<double> edges_hz, int rate,
                    double transition_hz);

// |H(f)| evaluated from the DTFT of the taps.
double MagnitudeResponse(const FirFilter& filter, double hz);

// Convolution compensated for the group delay, with zeros beyond either end.
// Output length equals input length. Throws Error(kLength) when the input is
// not longer than the filter order.
std::vector<double> ApplyZeroPhase(const FirFilter& filter, std::span<const double> x);

// Filters every channel. The half filter length is added to the transient
// counts at both ends.
Recording ApplyZeroPhase(const FirFilter& filter, const Recording& rec);

struct BandSignal {
  BandDefinition band;
  Recording recording;
};

// One band-pass filtered copy of rec per band, in the order given.
std::vector<BandSignal> BandDecompose(const Recording& rec,
                                      std::span<const BandDefinition> bands,
                                      double transition_hz = 2.0);

// Placeholder for the ICA artifact-rejection step, which needs manual
// component review. Returns the input unchanged and logs that it did so.
Recording SkipIcaStage(const Recording& rec);

}  // namespace sznet

#endif  // SZNET_FIR_H_
