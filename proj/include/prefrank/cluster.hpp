// Copyright 2026 The prefrank Authors.
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

#ifndef PREFRANK_CLUSTER_HPP_
#define PREFRANK_CLUSTER_HPP_

// k-means++ / Lloyd clustering with the number of clusters picked by mean
// silhouette width.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "prefrank/error.hpp"
#include "prefrank/matrix.hpp"
#include "prefrank/rng.hpp"

namespace prefrank {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

struct KMeansRun {
  std::vector<std::size_t> labels;
  Matrix centroids;
  double objective = 0.0;                 // within-cluster sum of squares
  std::vector<double> objective_trace;    // after each assignment step
  int iterations = 0;
};

struct KMeansConfig {
  std::size_t restarts = 10;
  int max_iterations = 300;
  double tolerance = 1e-8;
  std::uint64_t seed = 7;
};

namespace detail {

inline Matrix kmeans_pp_init(const Matrix& x, std::size_t k, Rng& rng) {
  const std::size_t n = x.rows();
  Matrix c(k, x.cols());
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t pick = rng.below(n);
  for (std::size_t j = 0; j < k; ++j) {
    std::copy(x.row(pick).begin(), x.row(pick).end(), c.row(j).begin());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(x.row(i), c.row(j)));
      total += d2[i];
    }
    if (j + 1 == k) break;
    pick = total > 0.0 ? rng.categorical(d2, total) : rng.below(n);
  }
  return c;
}

inline double assign(const Matrix& x, const Matrix& c, std::vector<std::size_t>& labels) {
  double objective = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t j = 0; j < c.rows(); ++j) {
      const double d = squared_distance(x.row(i), c.row(j));
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    labels[i] = arg;
    objective += best;
  }
  return objective;
}

// Recomputes centroids. An empty cluster takes over the point farthest from
// its current centroid.
inline void update_centroids(const Matrix& x, std::vector<std::size_t>& labels, Matrix& c) {
  const std::size_t k = c.rows();
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t l : labels) ++sizes[l];
  for (std::size_t j = 0; j < k; ++j) {
    if (sizes[j] != 0) continue;
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (sizes[labels[i]] <= 1) continue;
      const double d = squared_distance(x.row(i), c.row(labels[i]));
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far_d < 0.0) continue;
    --sizes[labels[far]];
    labels[far] = j;
    sizes[j] = 1;
  }
  c = Matrix(k, x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto row = c.row(labels[i]);
    const auto xi = x.row(i);
    for (std::size_t d = 0; d < x.cols(); ++d) row[d] += xi[d];
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (sizes[j] == 0) continue;
    for (double& v : c.row(j)) v /= static_cast<double>(sizes[j]);
  }
}

inline double objective_of(const Matrix& x, const Matrix& c,
                           const std::vector<std::size_t>& labels) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) s += squared_distance(x.row(i), c.row(labels[i]));
  return s;
}

}  // namespace detail

// Best of cfg.restarts seeded k-means++ starts by final objective.
inline KMeansRun kmeans(const Matrix& x, std::size_t k, const KMeansConfig& cfg = {}) {
  if (k < 1 || x.rows() < k) throw Error(Errc::kTooFewPoints, "k exceeds point count");
  KMeansRun best;
  best.objective = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(cfg.restarts, 1); ++r) {
    Rng rng(mix_seed(cfg.seed, k * 1000003 + r));
    KMeansRun run;
    run.centroids = detail::kmeans_pp_init(x, k, rng);
    run.labels.assign(x.rows(), 0);
    double prev = detail::assign(x, run.centroids, run.labels);
    run.objective_trace.push_back(prev);
    for (int it = 0; it < cfg.max_iterations; ++it) {
      detail::update_centroids(x, run.labels, run.centroids);
      const double obj = detail::assign(x, run.centroids, run.labels);
      run.objective_trace.push_back(obj);
      ++run.iterations;
      if (prev - obj <= cfg.tolerance * std::max(1.0, prev)) {
        prev = obj;
        break;
      }
      prev = obj;
    }
    run.objective = detail::objective_of(x, run.centroids, run.labels);
    if (run.objective < best.objective) best = std::move(run);
  }
  return best;
}

// Mean silhouette width; points in singleton clusters score 0.
inline double mean_silhouette(const Matrix& x, std::span<const std::size_t> labels,
                              std::size_t k) {
  const std::size_t n = x.rows();
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t l : labels) ++sizes[l];
  double total = 0.0;
  std::vector<double> sum(k);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) sum[labels[j]] += std::sqrt(squared_distance(x.row(i), x.row(j)));
    }
    const std::size_t own = labels[i];
    if (sizes[own] <= 1) continue;
    const double a = sum[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c != own && sizes[c] > 0) b = std::min(b, sum[c] / static_cast<double>(sizes[c]));
    }
    const double m = std::max(a, b);
    if (std::isfinite(b) && m > 0.0) total += (b - a) / m;
  }
  return total / static_cast<double>(n);
}

struct SilhouetteScore {
  std::size_t k = 0;
  double silhouette = 0.0;
  double objective = 0.0;
};

struct ClusterAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> labels;
  Matrix centroids;
  std::vector<SilhouetteScore> scanned;
};

// Scans k in [k_min, k_max] and keeps the clustering with the highest mean
// silhouette (smaller k on ties).
inline ClusterAssignment kmeans_cluster(const Matrix& x, std::size_t k_min, std::size_t k_max,
                                        const KMeansConfig& cfg = {}) {
  if (k_min < 2 || k_max < k_min) throw Error(Errc::kInvalidArgument, "invalid k range");
  if (x.rows() < k_max + 1) {
    throw Error(Errc::kTooFewPoints,
                std::to_string(x.rows()) + " points for k up to " + std::to_string(k_max));
  }
  std::size_t distinct = 0;
  {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < x.rows(); ++i) rows.emplace_back(x.row(i).begin(), x.row(i).end());
    std::sort(rows.begin(), rows.end());
    distinct = static_cast<std::size_t>(std::unique(rows.begin(), rows.end()) - rows.begin());
  }
  if (distinct < 2) throw Error(Errc::kDegenerateGeometry, "all points coincide");

  ClusterAssignment out;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = k_min; k <= std::min(k_max, distinct); ++k) {
    KMeansRun run = kmeans(x, k, cfg);
    const double s = mean_silhouette(x, run.labels, k);
    out.scanned.push_back({k, s, run.objective});
    if (s > best) {
      best = s;
      out.k = k;
      out.labels = std::move(run.labels);
      out.centroids = std::move(run.centroids);
    }
  }
  return out;
}

}  // namespace prefrank

#endif  // PREFRANK_CLUSTER_HPP_
