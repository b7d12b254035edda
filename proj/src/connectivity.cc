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

#include "sznet/connectivity.h"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>
#include <fmt/format.h>

#include "sznet/error.h"

namespace sznet {

namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {}
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

class FftwPlan {
 public:
  FftwPlan(std::size_t n, fftw_complex* in, fftw_complex* out, int sign) {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), in, out, sign, FFTW_ESTIMATE);
  }
  ~FftwPlan() {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(plan_);
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
  void Execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

std::vector<std::complex<double>> AnalyticSignal(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) throw Error(ErrorKind::kLength, "analytic signal of an empty series");

  FftwBuffer buf(n);
  FftwPlan forward(n, buf.data, buf.data, FFTW_FORWARD);
  FftwPlan inverse(n, buf.data, buf.data, FFTW_BACKWARD);
  for (std::size_t i = 0; i < n; ++i) {
    buf.data[i][0] = x[i];
    buf.data[i][1] = 0.0;
  }
  forward.Execute();
  // Bins 1 .. ceil(n/2)-1 are positive frequencies; for even n bin n/2 is
  // the Nyquist bin and is shared.
  const std::size_t positive_end = (n + 1) / 2;
  for (std::size_t k = 1; k < positive_end; ++k) {
    buf.data[k][0] *= 2.0;
    buf.data[k][1] *= 2.0;
  }
  for (std::size_t k = n / 2 + 1; k < n; ++k) {
    buf.data[k][0] = 0.0;
    buf.data[k][1] = 0.0;
  }
  inverse.Execute();
  std::vector<std::complex<double>> out(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = {buf.data[i][0] * scale, buf.data[i][1] * scale};
  }
  return out;
}

double WrappedAngle(std::complex<double> z) {
  const double a = std::atan2(z.imag(), z.real());
  return a == -std::numbers::pi ? std::numbers::pi : a;
}

std::vector<double> InstantaneousPhase(std::span<const double> x) {
  const auto z = AnalyticSignal(x);
  std::vector<double> phase(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) phase[i] = WrappedAngle(z[i]);
  return phase;
}

int PhaseLeadSign(double a, double b) {
  constexpr double kPi = std::numbers::pi;
  double d = a - b;
  if (!(d > -kTwoPi && d < kTwoPi)) d = std::remainder(d, kTwoPi);
  if (d == 0.0 || d == kPi || d == -kPi) return 0;
  if (d > 0.0) return d < kPi ? 1 : -1;
  return d > -kPi ? -1 : 1;
}

double PhaseLagIndex(std::span<const double> phi1, std::span<const double> phi2) {
  if (phi1.size() != phi2.size() || phi1.empty()) {
    throw Error(ErrorKind::kShape,
                fmt::format("phase series lengths {} and {} must be equal and non-zero",
                            phi1.size(), phi2.size()));
  }
  long long sum = 0;
  for (std::size_t t = 0; t < phi1.size(); ++t) sum += PhaseLeadSign(phi1[t], phi2[t]);
  return static_cast<double>(std::llabs(sum)) / static_cast<double>(phi1.size());
}

PhaseSeries ComputePhases(const Recording& rec) {
  PhaseSeries out;
  out.rate = rec.rate();
  out.phases.reserve(rec.num_channels());
  for (std::size_t c = 0; c < rec.num_channels(); ++c) {
    out.phases.push_back(InstantaneousPhase(rec.channel(c)));
  }
  return out;
}

std::size_t WindowPlan::NumValid() const {
  std::size_t n = 0;
  for (const auto& w : windows) n += w.excluded ? 0 : 1;
  return n;
}

WindowPlan MakeWindowPlan(std::size_t num_samples, int rate, double window_s, double hop_s,
                          std::size_t transient_head, std::size_t transient_tail) {
  if (rate <= 0 || !(window_s > 0.0) || !(hop_s > 0.0)) {
    throw Error(ErrorKind::kParameter,
                fmt::format("window {} s / hop {} s at {} Hz is not a valid plan", window_s,
                            hop_s, rate));
  }
  const double win_exact = window_s * rate;
  const double hop_exact = hop_s * rate;
  const auto win = static_cast<std::size_t>(std::llround(win_exact));
  const auto hop = static_cast<std::size_t>(std::llround(hop_exact));
  if (std::abs(win_exact - win) > 1e-9 || std::abs(hop_exact - hop) > 1e-9 || win == 0 ||
      hop == 0) {
    throw Error(ErrorKind::kParameter,
                fmt::format("window {} s and hop {} s must be whole sample counts at {} Hz",
                            window_s, hop_s, rate));
  }
  WindowPlan plan{window_s, hop_s, rate, {}};
  const std::size_t clean_end =
      transient_tail >= num_samples ? 0 : num_samples - transient_tail;
  for (std::size_t start = 0; start + win <= num_samples; start += hop) {
    const std::size_t end = start + win;
    plan.windows.push_back({start, end, start < transient_head || end > clean_end});
  }
  return plan;
}

WindowPlan MakeWindowPlan(const Recording& rec, double window_s, double hop_s) {
  return MakeWindowPlan(rec.num_samples(), rec.rate(), window_s, hop_s, rec.transient_head(),
                        rec.transient_tail());
}

std::vector<ConnectivityMatrix> ConnectivitySeries(const Recording& rec, const WindowPlan& plan,
                                                   const std::string& band) {
  if (plan.NumValid() == 0) {
    throw Error(ErrorKind::kEmptyPlan,
                fmt::format("band {}: none of {} windows is usable", band, plan.windows.size()));
  }
  if (plan.rate != rec.rate() || plan.windows.back().end > rec.num_samples()) {
    throw Error(ErrorKind::kShape, "window plan does not match the recording");
  }
  const PhaseSeries phases = ComputePhases(rec);
  const std::size_t nch = rec.num_channels();
  std::vector<ConnectivityMatrix> out;
  out.reserve(plan.NumValid());
  for (std::size_t w = 0; w < plan.windows.size(); ++w) {
    const auto& win = plan.windows[w];
    if (win.excluded) continue;
    SquareMatrix m(nch, 0.0);
    const std::size_t len = win.end - win.start;
    for (std::size_t i = 0; i < nch; ++i) {
      std::span<const double> pi(phases.phases[i].data() + win.start, len);
      for (std::size_t j = i + 1; j < nch; ++j) {
        std::span<const double> pj(phases.phases[j].data() + win.start, len);
        const double v = PhaseLagIndex(pi, pj);
        m(i, j) = v;
        m(j, i) = v;
      }
    }
    out.push_back(ConnectivityMatrix{band, w, std::move(m)});
  }
  return out;
}

}  // namespace sznet
