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

#include "sznet/fir.h"

#include <cmath>
#include <complex>
#include <numbers>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "sznet/error.h"

namespace sznet {

namespace {

// Windowed ideal low-pass with cutoff fc, symmetric by construction.
std::vector<double> WindowedSincLowpass(double fc, int rate, std::size_t num_taps) {
  const std::size_t m = num_taps - 1;
  const std::size_t half = m / 2;
  const double f = fc / rate;  // cycles per sample
  std::vector<double> h(num_taps);
  for (std::size_t k = 0; k <= half; ++k) {
    const double n = static_cast<double>(k) - static_cast<double>(half);
    const double ideal = n == 0.0 ? 2.0 * f
                                  : std::sin(2.0 * std::numbers::pi * f * n) / (std::numbers::pi * n);
    const double window =
        0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / m);
    h[k] = ideal * window;
    h[m - k] = h[k];
  }
  return h;
}

}  // namespace

std::vector<BandDefinition> CanonicalBands() {
  return {
      {"theta", 4.0, 8.0},
      {"alpha", 8.0, 13.0},
      {"beta", 13.0, 30.0},
      {"low_gamma", 30.0, 60.0},
      {"high_gamma", 60.0, 80.0},
  };
}

void ValidateBand(const BandDefinition& band, int rate) {
  if (!(band.low_hz > 0.0 && band.low_hz < band.high_hz && band.high_hz < rate / 2.0)) {
    throw Error(ErrorKind::kDesign,
                fmt::format("band '{}' [{}, {}] Hz must satisfy 0 < low < high < {}", band.name,
                            band.low_hz, band.high_hz, rate / 2.0));
  }
}

const char* FilterKindName(FilterKind kind) {
  switch (kind) {
    case FilterKind::kHighpass: return "highpass";
    case FilterKind::kBandpass: return "bandpass";
    case FilterKind::kBandstop: return "bandstop";
  }
  return "?";
}

std::size_t FirTapCount(int rate, double transition_hz) {
  auto taps = static_cast<std::size_t>(std::ceil(3.3 * rate / transition_hz));
  if (taps % 2 == 0) ++taps;
  return taps;
}

FirFilter DesignFir(FilterKind kind, std::vector<double> edges_hz, int rate,
                    double transition_hz) {
  if (rate <= 0) throw Error(ErrorKind::kDesign, fmt::format("invalid sampling rate {}", rate));
  if (!(transition_hz > 0.0)) {
    throw Error(ErrorKind::kDesign,
                fmt::format("transition width must be positive, got {}", transition_hz));
  }
  const std::size_t want_edges = kind == FilterKind::kHighpass ? 1 : 2;
  if (edges_hz.size() != want_edges) {
    throw Error(ErrorKind::kDesign, fmt::format("{} filter needs {} edge(s), got {}",
                                                FilterKindName(kind), want_edges, edges_hz.size()));
  }
  const double nyquist = rate / 2.0;
  for (double e : edges_hz) {
    if (!(e > 0.0 && e < nyquist)) {
      throw Error(ErrorKind::kDesign,
                  fmt::format("edge {} Hz outside (0, {}) Hz", e, nyquist));
    }
  }
  if (want_edges == 2 && !(edges_hz[0] < edges_hz[1])) {
    throw Error(ErrorKind::kDesign,
                fmt::format("band edges must increase, got [{}, {}]", edges_hz[0], edges_hz[1]));
  }

  const std::size_t num_taps = FirTapCount(rate, transition_hz);
  const std::size_t center = (num_taps - 1) / 2;
  std::vector<double> taps;
  switch (kind) {
    case FilterKind::kHighpass: {
      taps = WindowedSincLowpass(edges_hz[0], rate, num_taps);
      double dc = 0.0;
      for (double t : taps) dc += t;
      for (double& t : taps) t = -t / dc;
      taps[center] += 1.0;
      break;
    }
    case FilterKind::kBandpass:
    case FilterKind::kBandstop: {
      const auto upper = WindowedSincLowpass(edges_hz[1], rate, num_taps);
      const auto lower = WindowedSincLowpass(edges_hz[0], rate, num_taps);
      taps.resize(num_taps);
      for (std::size_t k = 0; k < num_taps; ++k) taps[k] = upper[k] - lower[k];
      if (kind == FilterKind::kBandstop) {
        for (double& t : taps) t = -t;
        taps[center] += 1.0;
      }
      break;
    }
  }
  for (std::size_t k = 0; k < center; ++k) taps[num_taps - 1 - k] = taps[k];

  return FirFilter{std::move(taps),
                   FirDesign{kind, std::move(edges_hz), transition_hz, rate, "hamming"}};
}

double MagnitudeResponse(const FirFilter& filter, double hz) {
  const double w = 2.0 * std::numbers::pi * hz / filter.design.rate;
  // Linear phase: H = e^{-jwM/2} (h[c] + 2 sum h[c-j] cos(wj)).
  const std::size_t c = filter.half_length();
  double amp = filter.taps[c];
  for (std::size_t j = 1; j <= c; ++j) amp += 2.0 * filter.taps[c - j] * std::cos(w * j);
  return std::abs(amp);
}

std::vector<double> ApplyZeroPhase(const FirFilter& filter, std::span<const double> x) {
  const std::size_t n = x.size();
  if (n <= filter.order()) {
    throw Error(ErrorKind::kLength,
                fmt::format("signal of {} samples is not longer than the filter order {}", n,
                            filter.order()));
  }
  const std::size_t half = filter.half_length();
  const double* h = filter.taps.data();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = h[half] * x[i];
    if (i >= half && i + half < n) {
      for (std::size_t j = 1; j <= half; ++j) acc += h[half - j] * (x[i + j] + x[i - j]);
    } else {
      for (std::size_t j = 1; j <= half; ++j) {
        const double ahead = i + j < n ? x[i + j] : 0.0;
        const double behind = j <= i ? x[i - j] : 0.0;
        acc += h[half - j] * (ahead + behind);
      }
    }
    y[i] = acc;
  }
  return y;
}

Recording ApplyZeroPhase(const FirFilter& filter, const Recording& rec) {
  if (filter.design.rate != rec.rate()) {
    throw Error(ErrorKind::kDesign,
                fmt::format("filter designed for {} Hz applied to a {} Hz recording",
                            filter.design.rate, rec.rate()));
  }
  std::vector<std::vector<double>> out;
  out.reserve(rec.num_channels());
  for (std::size_t c = 0; c < rec.num_channels(); ++c) {
    out.push_back(ApplyZeroPhase(filter, rec.channel(c)));
  }
  const std::size_t n = rec.num_samples();
  const std::size_t half = filter.half_length();
  return rec.WithSamples(std::move(out), std::min(n, rec.transient_head() + half),
                         std::min(n, rec.transient_tail() + half));
}

std::vector<BandSignal> BandDecompose(const Recording& rec,
                                      std::span<const BandDefinition> bands,
                                      double transition_hz) {
  std::vector<BandSignal> out;
  out.reserve(bands.size());
  for (const auto& band : bands) {
    ValidateBand(band, rec.rate());
    const FirFilter f =
        DesignFir(FilterKind::kBandpass, {band.low_hz, band.high_hz}, rec.rate(), transition_hz);
    out.push_back(BandSignal{band, ApplyZeroPhase(f, rec)});
  }
  return out;
}

Recording SkipIcaStage(const Recording& rec) {
  spdlog::info("ICA artifact removal skipped (no-op stage)");
  return rec;
}

}  // namespace sznet
