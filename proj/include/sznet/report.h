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

#ifndef SZNET_REPORT_H_
#define SZNET_REPORT_H_

#include <string>

#include "sznet/csv.h"

namespace sznet {

// Every figure is drawn from a CSV table as written by the pipeline, never
// from in-memory results, so the same SVG can be regenerated from disk.

// Columns k, loss, selected (1 on the chosen k).
std::string LossCurveSvg(const CsvTable& loss_curve, const std::string& title);

// Columns time_s, period, state. Step plot of the state over time with the
// periods shaded.
std::string StateTimelineSvg(const CsvTable& states, const std::string& title);

// Columns from, to, probability. States on a circle, one arrow per p > 0.
std::string TransitionDiagramSvg(const CsvTable& transitions, const std::string& title);

// Columns band, period, rate ("NA" rows skipped). One panel per band with
// the rates of each period as a strip and its median as a bar.
std::string RateDistributionSvg(const CsvTable& rates, const std::string& title);

// samples: columns band, metric, period, value; comparisons: columns band,
// pair, significant as written for that metric. Per band, the three period
// distributions of one metric with '*' over significant pairs.
std::string MetricComparisonSvg(const CsvTable& samples, const CsvTable& comparisons,
                                const std::string& metric, const std::string& title);

}  // namespace sznet

#endif  // SZNET_REPORT_H_
