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

#ifndef SZNET_CLUSTERING_H_
#define SZNET_CLUSTERING_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sznet {

using PointSet = std::vector<std::vector<double>>;

// Per-feature z-scoring fitted on training rows. Features with zero spread
// keep a unit divisor.
struct Normalization {
  std::vector<double> mean;
  std::vector<double> stddev;  // population standard deviation

  static Normalization Fit(const PointSet& rows);
  std::vector<double> Apply(std::span<const double> row) const;
  PointSet Apply(const PointSet& rows) const;
};

// One agglomeration. Cluster ids follow the usual linkage convention:
// points are 0..n-1 and the cluster created by step s is n + s.
struct MergeStep {
  std::size_t cluster_a = 0;  // smaller id
  std::size_t cluster_b = 0;
  double cost = 0.0;          // increase of the within-cluster sum of squares
  std::size_t size = 0;       // points in the merged cluster
};

// Ward agglomerative clustering via the Lance-Williams recurrence on merge
// costs. Among equal-cost candidates the pair with the lowest (slot, slot)
// index wins, where a merged cluster keeps the lower slot of its parts.
std::vector<MergeStep> WardLinkage(const PointSet& points);

// Labels after undoing all but the first n - k merges. Labels are numbered
// by first appearance in point order.
std::vector<std::size_t> CutTree(std::size_t num_points, std::span<const MergeStep> merges,
                                 std::size_t k);

// Sum over clusters of squared distances to the cluster mean.
double WithinClusterLoss(const PointSet& points, std::span<const std::size_t> labels,
                         std::size_t k);

PointSet ClusterCentroids(const PointSet& points, std::span<const std::size_t> labels,
                          std::size_t k);

// k* = argmax_{2 <= k <= k_max-1} Loss(k-1) - 2 Loss(k) + Loss(k+1), ties to
// the smaller k. loss_curve[0] holds Loss(1). Throws Error(kParameter) for
// fewer than three points on the curve; logs a warning if it increases.
std::size_t KneePoint(std::span<const double> loss_curve);

inline constexpr const char* kTieBreakPolicy = "lowest-slot-pair/v1";

struct ClusterModel {
  std::size_t k = 0;
  std::size_t k_max = 0;
  PointSet centroids;               // normalized feature space
  std::vector<MergeStep> merge_tree;
  std::vector<double> loss_curve;   // Loss(1) .. Loss(k_max)
  Normalization normalization;
  std::string tie_break_policy = kTieBreakPolicy;
};

// Ward clustering of already normalized points, loss curve for
// k = 1..k_max from the tree cuts, knee selection and centroids of the
// selected cut. Throws Error(kParameter) when there are fewer points than
// k_max or k_max < 3.
ClusterModel WardCluster(const PointSet& normalized, std::size_t k_max,
                         Normalization normalization);

// Fits the normalization on raw training features, then WardCluster.
ClusterModel FitClusterModel(const PointSet& raw_features, std::size_t k_max);

// Index of the nearest centroid by Euclidean distance, ties to the lower
// index. fv must already be normalized. Throws Error(kShape) on a dimension
// mismatch.
std::size_t AssignNearestCentroid(std::span<const double> fv, const ClusterModel& model);

struct TrainTestSplit {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

// Chronological split: the first round(ratio * n) seizures train, at least
// one is held out. Throws Error(kSplit) for fewer than two seizures.
TrainTestSplit SplitTrainTest(const std::vector<std::string>& seizures,
                              double ratio = 2.0 / 3.0);

std::string SerializeClusterModel(const ClusterModel& model);
ClusterModel ParseClusterModel(const std::string& text);

}  // namespace sznet

#endif  // SZNET_CLUSTERING_H_
