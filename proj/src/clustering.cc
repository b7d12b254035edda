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

#include "sznet/clustering.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "sznet/error.h"

namespace sznet {

namespace {

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Condensed storage of the strict upper triangle.
class CondensedMatrix {
 public:
  explicit CondensedMatrix(std::size_t n) : n_(n), data_(n * (n - 1) / 2) {}
  double& at(std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return data_[i * (2 * n_ - i - 1) / 2 + (j - i - 1)];
  }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

std::size_t CheckedDimension(const PointSet& points) {
  if (points.empty()) throw Error(ErrorKind::kParameter, "no points to cluster");
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) {
      throw Error(ErrorKind::kShape,
                  fmt::format("points have dimensions {} and {}", dim, p.size()));
    }
  }
  return dim;
}

}  // namespace

Normalization Normalization::Fit(const PointSet& rows) {
  const std::size_t dim = CheckedDimension(rows);
  Normalization norm{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < dim; ++j) norm.mean[j] += r[j];
  }
  for (double& m : norm.mean) m /= n;
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = r[j] - norm.mean[j];
      norm.stddev[j] += d * d;
    }
  }
  for (double& s : norm.stddev) {
    s = std::sqrt(s / n);
    if (!(s > 0.0)) s = 1.0;
  }
  return norm;
}

std::vector<double> Normalization::Apply(std::span<const double> row) const {
  if (row.size() != mean.size()) {
    throw Error(ErrorKind::kShape, fmt::format("feature vector has dimension {}, expected {}",
                                               row.size(), mean.size()));
  }
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - mean[j]) / stddev[j];
  return out;
}

PointSet Normalization::Apply(const PointSet& rows) const {
  PointSet out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(Apply(r));
  return out;
}

std::vector<MergeStep> WardLinkage(const PointSet& points) {
  CheckedDimension(points);
  const std::size_t n = points.size();
  std::vector<MergeStep> merges;
  if (n < 2) return merges;
  merges.reserve(n - 1);

  CondensedMatrix cost(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      cost.at(i, j) = 0.5 * SquaredDistance(points[i], points[j]);
    }
  }

  std::vector<bool> active(n, true);
  std::vector<std::size_t> size(n, 1);
  std::vector<std::size_t> id(n);
  std::iota(id.begin(), id.end(), 0);
  std::vector<std::size_t> nn(n, 0);
  std::vector<double> nn_cost(n, std::numeric_limits<double>::infinity());

  const auto refresh = [&](std::size_t i) {
    nn_cost[i] = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !active[j]) continue;
      const double c = cost.at(i, j);
      if (c < nn_cost[i]) {
        nn_cost[i] = c;
        nn[i] = j;
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t a = n;
    std::size_t b = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      const std::size_t lo = std::min(i, nn[i]);
      const std::size_t hi = std::max(i, nn[i]);
      if (nn_cost[i] < best || (nn_cost[i] == best && (lo < a || (lo == a && hi < b)))) {
        best = nn_cost[i];
        a = lo;
        b = hi;
      }
    }

    const double na = static_cast<double>(size[a]);
    const double nb = static_cast<double>(size[b]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      const double nk = static_cast<double>(size[k]);
      cost.at(a, k) = ((na + nk) * cost.at(a, k) + (nb + nk) * cost.at(b, k) - nk * best) /
                      (na + nb + nk);
    }
    merges.push_back({std::min(id[a], id[b]), std::max(id[a], id[b]), best, size[a] + size[b]});
    size[a] += size[b];
    id[a] = n + step;
    active[b] = false;

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a) continue;
      if (nn[k] == a || nn[k] == b) {
        refresh(k);
      } else {
        const double c = cost.at(a, k);
        if (c < nn_cost[k] || (c == nn_cost[k] && a < nn[k])) {
          nn_cost[k] = c;
          nn[k] = a;
        }
      }
    }
    refresh(a);
  }
  return merges;
}

std::vector<std::size_t> CutTree(std::size_t num_points, std::span<const MergeStep> merges,
                                 std::size_t k) {
  if (k == 0 || k > num_points || merges.size() + 1 != num_points) {
    throw Error(ErrorKind::kParameter,
                fmt::format("cannot cut a tree of {} points into {} clusters", num_points, k));
  }
  // Union-find over cluster ids 0 .. 2n-2.
  std::vector<std::size_t> parent(2 * num_points - 1);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t s = 0; s < num_points - k; ++s) {
    parent[find(merges[s].cluster_a)] = num_points + s;
    parent[find(merges[s].cluster_b)] = num_points + s;
  }
  std::vector<std::size_t> labels(num_points);
  std::vector<std::size_t> root_label(2 * num_points - 1, num_points);
  std::size_t next = 0;
  for (std::size_t i = 0; i < num_points; ++i) {
    const std::size_t r = find(i);
    if (root_label[r] == num_points) root_label[r] = next++;
    labels[i] = root_label[r];
  }
  return labels;
}

PointSet ClusterCentroids(const PointSet& points, std::span<const std::size_t> labels,
                          std::size_t k) {
  const std::size_t dim = CheckedDimension(points);
  PointSet centroids(k, std::vector<double>(dim, 0.0));
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    ++counts[labels[i]];
    for (std::size_t j = 0; j < dim; ++j) centroids[labels[i]][j] += points[i][j];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    for (double& v : centroids[c]) v /= static_cast<double>(counts[c]);
  }
  return centroids;
}

double WithinClusterLoss(const PointSet& points, std::span<const std::size_t> labels,
                         std::size_t k) {
  const PointSet centroids = ClusterCentroids(points, labels, k);
  double loss = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    loss += SquaredDistance(points[i], centroids[labels[i]]);
  }
  return loss;
}

std::size_t KneePoint(std::span<const double> loss_curve) {
  if (loss_curve.size() < 3) {
    throw Error(ErrorKind::kParameter,
                fmt::format("knee selection needs Loss(1..k_max) with k_max >= 3, got {} points",
                            loss_curve.size()));
  }
  for (std::size_t i = 1; i < loss_curve.size(); ++i) {
    if (loss_curve[i] > loss_curve[i - 1]) {
      spdlog::warn("loss curve increases at k={} ({} > {}); using raw second differences",
                   i + 1, loss_curve[i], loss_curve[i - 1]);
      break;
    }
  }
  std::size_t best_k = 2;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 2; k + 1 <= loss_curve.size(); ++k) {
    // loss_curve[k - 1] is Loss(k).
    const double second = loss_curve[k - 2] - 2.0 * loss_curve[k - 1] + loss_curve[k];
    if (second > best) {
      best = second;
      best_k = k;
    }
  }
  return best_k;
}

ClusterModel WardCluster(const PointSet& normalized, std::size_t k_max,
                         Normalization normalization) {
  if (k_max < 3) {
    throw Error(ErrorKind::kParameter, fmt::format("k_max must be at least 3, got {}", k_max));
  }
  if (normalized.size() < k_max) {
    throw Error(ErrorKind::kParameter,
                fmt::format("{} feature vectors are fewer than k_max = {}", normalized.size(),
                            k_max));
  }
  ClusterModel model;
  model.k_max = k_max;
  model.normalization = std::move(normalization);
  model.merge_tree = WardLinkage(normalized);
  model.loss_curve.reserve(k_max);
  for (std::size_t k = 1; k <= k_max; ++k) {
    const auto labels = CutTree(normalized.size(), model.merge_tree, k);
    model.loss_curve.push_back(WithinClusterLoss(normalized, labels, k));
  }
  model.k = KneePoint(model.loss_curve);
  const auto labels = CutTree(normalized.size(), model.merge_tree, model.k);
  model.centroids = ClusterCentroids(normalized, labels, model.k);
  return model;
}

ClusterModel FitClusterModel(const PointSet& raw_features, std::size_t k_max) {
  Normalization norm = Normalization::Fit(raw_features);
  const PointSet normalized = norm.Apply(raw_features);
  return WardCluster(normalized, k_max, std::move(norm));
}

std::size_t AssignNearestCentroid(std::span<const double> fv, const ClusterModel& model) {
  if (model.centroids.empty()) throw Error(ErrorKind::kParameter, "model has no centroids");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < model.centroids.size(); ++c) {
    if (model.centroids[c].size() != fv.size()) {
      throw Error(ErrorKind::kShape,
                  fmt::format("feature vector has dimension {}, centroids have {}", fv.size(),
                              model.centroids[c].size()));
    }
    const double d = SquaredDistance(fv, model.centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

TrainTestSplit SplitTrainTest(const std::vector<std::string>& seizures, double ratio) {
  const std::size_t n = seizures.size();
  if (n < 2) {
    throw Error(ErrorKind::kSplit,
                fmt::format("train/test split needs at least 2 seizures, got {}", n));
  }
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw Error(ErrorKind::kSplit, fmt::format("split ratio {} outside (0, 1)", ratio));
  }
  auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  TrainTestSplit split;
  split.train.assign(seizures.begin(), seizures.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test.assign(seizures.begin() + static_cast<std::ptrdiff_t>(n_train), seizures.end());
  return split;
}

std::string SerializeClusterModel(const ClusterModel& model) {
  nlohmann::ordered_json j;
  j["format"] = "sznet-cluster-model";
  j["version"] = 1;
  j["tie_break_policy"] = model.tie_break_policy;
  j["k"] = model.k;
  j["k_max"] = model.k_max;
  j["feature_dim"] = model.normalization.mean.size();
  j["normalization"] = {{"mean", model.normalization.mean},
                        {"stddev", model.normalization.stddev}};
  j["centroids"] = model.centroids;
  j["loss_curve"] = model.loss_curve;
  auto tree = nlohmann::ordered_json::array();
  for (const auto& m : model.merge_tree) {
    tree.push_back({m.cluster_a, m.cluster_b, m.cost, m.size});
  }
  j["merge_tree"] = std::move(tree);
  return j.dump(2) + "\n";
}

ClusterModel ParseClusterModel(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format") != "sznet-cluster-model" || j.at("version") != 1) {
      throw Error(ErrorKind::kParse, "not a version-1 cluster model");
    }
    ClusterModel model;
    model.tie_break_policy = j.at("tie_break_policy").get<std::string>();
    model.k = j.at("k").get<std::size_t>();
    model.k_max = j.at("k_max").get<std::size_t>();
    model.normalization.mean = j.at("normalization").at("mean").get<std::vector<double>>();
    model.normalization.stddev = j.at("normalization").at("stddev").get<std::vector<double>>();
    model.centroids = j.at("centroids").get<PointSet>();
    model.loss_curve = j.at("loss_curve").get<std::vector<double>>();
    for (const auto& m : j.at("merge_tree")) {
      model.merge_tree.push_back({m.at(0).get<std::size_t>(), m.at(1).get<std::size_t>(),
                                  m.at(2).get<double>(), m.at(3).get<std::size_t>()});
    }
    if (model.centroids.size() != model.k) {
      throw Error(ErrorKind::kParse, "centroid count does not match k");
    }
    for (const auto& c : model.centroids) {
      if (c.size() != model.normalization.mean.size()) {
        throw Error(ErrorKind::kParse, "centroid dimension does not match the normalization");
      }
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, fmt::format("cluster model: {}", e.what()));
  }
}

}  // namespace sznet
