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

#include "sznet/synth.h"

#include <cmath>
#include <fstream>
#include <algorithm>
#include <map>
#include <numbers>
#include <numeric>
#include <random>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "sznet/edf.h"
#include "sznet/error.h"

namespace sznet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Box-Muller on top of mt19937_64 so that streams are reproducible across
// standard library implementations.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : rng_(seed) {}

  double Uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = Uniform();
    while (u1 <= 0.0) u1 = Uniform();
    const double u2 = Uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    has_spare_ = true;
    return r * std::cos(kTwoPi * u2);
  }

 private:
  std::mt19937_64 rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Narrowband oscillation phase: carrier plus a Gaussian phase random walk.
std::vector<double> OscillatorPhase(std::size_t n, int rate, double hz, double bandwidth_hz,
                                    NormalSource& normal) {
  std::vector<double> phase(n);
  const double step = kTwoPi * hz / rate;
  const double jitter = std::sqrt(kTwoPi * bandwidth_hz / rate);
  double theta = kTwoPi * normal.Uniform();
  for (std::size_t t = 0; t < n; ++t) {
    phase[t] = theta;
    theta += step + jitter * normal();
  }
  return phase;
}

void ValidateSpec(const SynthSpec& spec) {
  if (spec.n_channels == 0 || spec.rate <= 0 || !(spec.duration_s > 0.0)) {
    throw Error(ErrorKind::kParameter,
                fmt::format("synth spec needs channels, rate and duration > 0 (got {}, {}, {})",
                            spec.n_channels, spec.rate, spec.duration_s));
  }
  for (const auto& c : spec.coupling) {
    if (c.i >= spec.n_channels || c.j >= spec.n_channels || c.i == c.j) {
      throw Error(ErrorKind::kParameter,
                  fmt::format("coupling ({}, {}) invalid for {} channels", c.i, c.j,
                              spec.n_channels));
    }
    if (!(c.lag_rad > -std::numbers::pi && c.lag_rad <= std::numbers::pi)) {
      throw Error(ErrorKind::kParameter,
                  fmt::format("coupling lag {} outside (-pi, pi]", c.lag_rad));
    }
    if (!(c.band_center_hz > 0.0 && c.band_center_hz < spec.rate / 2.0)) {
      throw Error(ErrorKind::kParameter,
                  fmt::format("coupling frequency {} Hz outside (0, {})", c.band_center_hz,
                              spec.rate / 2.0));
    }
    if (c.lag_rad == 0.0) {
      spdlog::warn("coupling ({}, {}) has zero lag; phase lag index cannot detect it", c.i, c.j);
    }
  }
}

std::vector<TruthWindow> TruthWindows(const std::vector<std::size_t>& sample_states,
                                      const std::vector<std::size_t>& sample_segments,
                                      const std::vector<Period>& sample_periods,
                                      std::size_t begin, std::size_t end, int rate,
                                      double window_s, double hop_s) {
  const auto win = static_cast<std::size_t>(std::llround(window_s * rate));
  const auto hop = static_cast<std::size_t>(std::llround(hop_s * rate));
  std::vector<TruthWindow> out;
  for (std::size_t s = begin, w = 0; s + win <= end; s += hop, ++w) {
    const std::size_t mid = s + win / 2;
    TruthWindow tw;
    tw.window_index = w;
    tw.mid_s = static_cast<double>(mid) / rate;
    tw.state = sample_states[mid];
    tw.period = sample_periods[mid];
    tw.pure = sample_segments[s] == sample_segments[s + win - 1];
    out.push_back(tw);
  }
  return out;
}

}  // namespace

std::vector<std::string> SynthChannelLabels(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t c = 0; c < n; ++c) labels.push_back(fmt::format("ch{:02d}", c + 1));
  return labels;
}

Recording CoupledOscillators(const SynthSpec& spec) {
  ValidateSpec(spec);
  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.rate));
  NormalSource normal(spec.seed);
  std::vector<std::vector<double>> x(spec.n_channels, std::vector<double>(n, 0.0));

  // Couplings grouped by frequency in order of first appearance.
  std::vector<double> freqs;
  for (const auto& c : spec.coupling) {
    if (std::find(freqs.begin(), freqs.end(), c.band_center_hz) == freqs.end()) {
      freqs.push_back(c.band_center_hz);
    }
  }
  for (double hz : freqs) {
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(spec.n_channels);
    for (const auto& c : spec.coupling) {
      if (c.band_center_hz != hz) continue;
      adj[c.i].push_back({c.j, c.lag_rad});
      adj[c.j].push_back({c.i, -c.lag_rad});
    }
    std::vector<bool> seen(spec.n_channels, false);
    for (std::size_t root = 0; root < spec.n_channels; ++root) {
      if (seen[root] || adj[root].empty()) continue;
      // Breadth-first propagation of phase offsets: following an edge
      // (i -> j, lag) puts j lag radians behind i.
      std::vector<std::pair<std::size_t, double>> members{{root, 0.0}};
      seen[root] = true;
      std::map<std::size_t, double> offset{{root, 0.0}};
      for (std::size_t q = 0; q < members.size(); ++q) {
        const auto [node, off] = members[q];
        for (const auto& [next, lag] : adj[node]) {
          if (!seen[next]) {
            seen[next] = true;
            offset[next] = off + lag;
            members.push_back({next, off + lag});
          } else if (std::abs(std::remainder(offset[next] - (off + lag), kTwoPi)) > 1e-9) {
            spdlog::warn("inconsistent lag cycle through channels {} and {} at {} Hz", node,
                         next, hz);
          }
        }
      }
      const auto phase =
          OscillatorPhase(n, spec.rate, hz, spec.oscillator_bandwidth_hz, normal);
      for (const auto& [ch, off] : members) {
        for (std::size_t t = 0; t < n; ++t) x[ch][t] += std::cos(phase[t] - off);
      }
    }
  }

  if (spec.common_source_gain != 0.0) {
    const auto phase = OscillatorPhase(n, spec.rate, spec.common_source_hz,
                                       spec.oscillator_bandwidth_hz, normal);
    for (auto& row : x) {
      for (std::size_t t = 0; t < n; ++t) row[t] += spec.common_source_gain * std::cos(phase[t]);
    }
  }
  if (spec.noise_sigma > 0.0) {
    for (auto& row : x) {
      for (double& v : row) v += spec.noise_sigma * normal();
    }
  }
  return Recording(SynthChannelLabels(spec.n_channels), spec.rate, std::move(x));
}

StateDataset ThreeStateDataset(const std::vector<SynthSpec>& state_specs,
                               const std::vector<StateSegment>& plan, std::uint64_t seed,
                               double window_s, double hop_s) {
  if (state_specs.size() < 2) {
    throw Error(ErrorKind::kPlan, "state dataset needs at least two state specs");
  }
  if (plan.empty()) throw Error(ErrorKind::kPlan, "empty segment plan");
  const int rate = state_specs.front().rate;
  const std::size_t nch = state_specs.front().n_channels;
  for (const auto& s : state_specs) {
    if (s.rate != rate || s.n_channels != nch) {
      throw Error(ErrorKind::kPlan, "state specs disagree on rate or channel count");
    }
  }
  const double hop_samples = hop_s * rate;
  for (const auto& seg : plan) {
    if (seg.state >= state_specs.size()) {
      throw Error(ErrorKind::kPlan, fmt::format("segment refers to unknown state {}", seg.state));
    }
    if (seg.duration_s < window_s) {
      throw Error(ErrorKind::kPlan,
                  fmt::format("segment of {} s is shorter than one {} s window", seg.duration_s,
                              window_s));
    }
    const double hops = seg.duration_s * rate / hop_samples;
    if (std::abs(hops - std::round(hops)) > 1e-9) {
      throw Error(ErrorKind::kPlan,
                  fmt::format("segment of {} s is not a whole number of {} s hops",
                              seg.duration_s, hop_s));
    }
  }

  std::vector<std::vector<double>> samples(nch);
  std::vector<std::size_t> states;
  std::vector<std::size_t> segments;
  std::vector<Period> periods;
  for (std::size_t s = 0; s < plan.size(); ++s) {
    SynthSpec spec = state_specs[plan[s].state];
    spec.duration_s = plan[s].duration_s;
    spec.seed = seed + s;
    const Recording part = CoupledOscillators(spec);
    for (std::size_t c = 0; c < nch; ++c) {
      samples[c].insert(samples[c].end(), part.channel(c).begin(), part.channel(c).end());
    }
    states.insert(states.end(), part.num_samples(), plan[s].state);
    segments.insert(segments.end(), part.num_samples(), s);
    periods.insert(periods.end(), part.num_samples(), plan[s].period);
  }
  const std::size_t n = states.size();
  StateDataset ds{Recording(SynthChannelLabels(nch), rate, std::move(samples)), std::move(states),
                  std::move(periods), {}};
  ds.windows = TruthWindows(ds.sample_states, segments, ds.sample_periods, 0, n, rate, window_s,
                            hop_s);
  return ds;
}

SyntheticPatientSpec DefaultThreeStateFixture() {
  SyntheticPatientSpec spec;
  spec.patient = "syn01";
  spec.seed = 20231;
  constexpr std::size_t kChannels = 12;
  constexpr std::size_t kClique = 4;
  const double centers[] = {6.0, 10.5, 21.0, 45.0, 70.0};
  for (std::size_t state = 0; state < 3; ++state) {
    SynthSpec s;
    s.n_channels = kChannels;
    s.rate = 256;
    s.noise_sigma = 0.5;
    for (double hz : centers) {
      for (std::size_t k = 0; k + 1 < kClique; ++k) {
        const std::size_t base = state * kClique;
        s.coupling.push_back({base + k, base + k + 1, 0.5, hz});
      }
    }
    spec.states.push_back(std::move(s));
  }
  for (int i = 0; i < 3; ++i) spec.seizures.push_back(SyntheticSeizure{10.0, 40.0, 10.0, 0, 1, 2});
  return spec;
}

void WriteSyntheticPatient(const std::filesystem::path& dir, const SyntheticPatientSpec& spec,
                           double window_s, double hop_s) {
  if (spec.seizures.empty()) throw Error(ErrorKind::kPlan, "synthetic patient has no seizures");
  const std::filesystem::path root = dir / spec.patient;
  std::filesystem::create_directories(root);
  const int rate = spec.states.at(0).rate;
  const auto labels = SynthChannelLabels(spec.states.at(0).n_channels);

  std::string summary = fmt::format("Data Sampling Rate: {} Hz\n*************************\n\n",
                                    rate);
  summary += "Channels in EDF Files:\n**********************\n";
  for (std::size_t c = 0; c < labels.size(); ++c) {
    summary += fmt::format("Channel {}: {}\n", c + 1, labels[c]);
  }
  summary += "\n";

  for (std::size_t s = 0; s < spec.seizures.size(); ++s) {
    const SyntheticSeizure& sz = spec.seizures[s];
    const std::vector<StateSegment> plan = {
        {sz.pre_state, sz.lead_s, Period::kPre},
        {sz.pre_state, sz.duration_s, Period::kPre},
        {sz.ictal_state, sz.duration_s, Period::kIctal},
        {sz.post_state, sz.duration_s, Period::kPost},
        {sz.post_state, sz.tail_s, Period::kPost},
    };
    const StateDataset ds = ThreeStateDataset(spec.states, plan, spec.seed + 1000 * s, window_s,
                                              hop_s);
    const std::string stem = fmt::format("{}_{:02d}", spec.patient, s + 1);
    WriteEdf(root / (stem + ".edf"), ds.recording, spec.patient);

    const double onset = sz.lead_s + sz.duration_s;
    const double offset = onset + sz.duration_s;
    const double total = ds.recording.duration();
    summary += fmt::format("File Name: {}.edf\n", stem);
    summary += "File Start Time: 00:00:00\n";
    summary += fmt::format("File End Time: 00:{:02d}:{:02d}\n", static_cast<int>(total) / 60,
                           static_cast<int>(total) % 60);
    summary += "Number of Seizures in File: 1\n";
    summary += fmt::format("Seizure Start Time: {} seconds\n", onset);
    summary += fmt::format("Seizure End Time: {} seconds\n\n", offset);

    // Truth over the analysis span only, indexed like the pipeline's plan.
    const auto begin = static_cast<std::size_t>(std::llround(sz.lead_s * rate));
    const auto end = static_cast<std::size_t>(std::llround((offset + sz.duration_s) * rate));
    std::vector<std::size_t> segment_of(ds.sample_states.size());
    {
      std::size_t pos = 0;
      for (std::size_t k = 0; k < plan.size(); ++k) {
        const auto len = static_cast<std::size_t>(std::llround(plan[k].duration_s * rate));
        std::fill_n(segment_of.begin() + static_cast<std::ptrdiff_t>(pos), len, k);
        pos += len;
      }
    }
    const auto truth = TruthWindows(ds.sample_states, segment_of, ds.sample_periods, begin, end,
                                    rate, window_s, hop_s);
    std::ofstream out(root / (stem + "_truth.csv"));
    out << "window_index,time_s,period,state,pure\n";
    for (const auto& w : truth) {
      out << fmt::format("{},{},{},{},{}\n", w.window_index, w.mid_s, PeriodName(w.period),
                         w.state, w.pure ? 1 : 0);
    }
  }
  std::ofstream(root / (spec.patient + "-summary.txt")) << summary;
}

}  // namespace sznet
