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

#ifndef PREFRANK_PCA_HPP_
#define PREFRANK_PCA_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "prefrank/error.hpp"
#include "prefrank/matrix.hpp"

namespace prefrank {

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // row i is the eigenvector of values[i]
};

// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
inline SymmetricEigen jacobi_eigen(Matrix a, int max_sweeps = 100) {
  const std::size_t n = a.rows();
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diag += a(i, i) * a(i, i);
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    }
    if (off <= 1e-30 * std::max(diag, 1e-300)) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  SymmetricEigen out;
  out.vectors = Matrix(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    out.values.push_back(a(order[r], order[r]));
    for (std::size_t k = 0; k < n; ++k) out.vectors(r, k) = v(k, order[r]);
  }
  return out;
}

struct PcaProjection {
  std::vector<double> mean;
  Matrix components;                    // n_components x dims, orthonormal rows
  std::vector<double> explained_ratio;  // per kept component
  std::vector<double> eigenvalues;      // all, descending
  Matrix coordinates;                   // points x n_components
};

inline PcaProjection pca_project(const Matrix& points, std::size_t n_components = 2) {
  const std::size_t n = points.rows(), d = points.cols();
  if (n < 2) throw Error(Errc::kTooFewPoints, "PCA needs at least two points");
  if (n_components > d) throw Error(Errc::kInvalidArgument, "more components than dimensions");
  PcaProjection out;
  out.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) out.mean[j] += points(i, j);
  }
  for (double& m : out.mean) m /= static_cast<double>(n);
  Matrix centered(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) centered(i, j) = points(i, j) - out.mean[j];
  }
  Matrix cov(d, d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += centered(i, a) * centered(i, b);
      cov(a, b) = cov(b, a) = s / static_cast<double>(n - 1);
    }
  }
  SymmetricEigen eig = jacobi_eigen(cov);
  for (double& v : eig.values) v = std::max(v, 0.0);
  const double total = std::accumulate(eig.values.begin(), eig.values.end(), 0.0);
  out.eigenvalues = eig.values;
  out.components = Matrix(n_components, d);
  for (std::size_t c = 0; c < n_components; ++c) {
    for (std::size_t j = 0; j < d; ++j) out.components(c, j) = eig.vectors(c, j);
    out.explained_ratio.push_back(total > 0.0 ? eig.values[c] / total : 0.0);
  }
  out.coordinates = Matrix(n, n_components);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < n_components; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += centered(i, j) * out.components(c, j);
      out.coordinates(i, c) = s;
    }
  }
  return out;
}

}  // namespace prefrank

#endif  // PREFRANK_PCA_HPP_
