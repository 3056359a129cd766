// Copyright 2026 The bcprobe Authors.
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

#include <cmath>
#include <limits>

#include "bcprobe/kernels.hpp"

namespace bcprobe::kernels {

namespace {

inline void AssignOne(const Matrix& points, const Matrix& centroids,
                      Eigen::Index i, int& label, double& d2) {
  const Eigen::Index d = points.cols();
  double best = std::numeric_limits<double>::infinity();
  int arg = 0;
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double s = SquaredDistance(&points(i, 0), &centroids(c, 0), d);
    if (s < best) {
      best = s;
      arg = static_cast<int>(c);
    }
  }
  label = arg;
  d2 = best;
}

inline double SilhouetteOne(const Matrix& points, std::span<const int> labels,
                            const std::vector<std::size_t>& counts,
                            std::vector<double>& sums, Eigen::Index i) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  std::fill(sums.begin(), sums.end(), 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == i) continue;
    sums[static_cast<std::size_t>(labels[j])] +=
        std::sqrt(SquaredDistance(&points(i, 0), &points(j, 0), d));
  }
  const auto own = static_cast<std::size_t>(labels[i]);
  if (counts[own] <= 1) return 0.0;
  const double a = sums[own] / static_cast<double>(counts[own] - 1);
  double b = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (c == own || counts[c] == 0) continue;
    b = std::min(b, sums[c] / static_cast<double>(counts[c]));
  }
  const double denom = std::max(a, b);
  if (!std::isfinite(b) || denom == 0.0) return 0.0;
  return (b - a) / denom;
}

std::vector<std::size_t> Counts(std::span<const int> labels, int k) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  return counts;
}

}  // namespace

void AssignSerial(const Matrix& points, const Matrix& centroids,
                  std::vector<int>& labels, std::vector<double>& dist2) {
  const Eigen::Index n = points.rows();
  labels.resize(static_cast<std::size_t>(n));
  dist2.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    AssignOne(points, centroids, i, labels[i], dist2[i]);
  }
}

void AssignOmp(const Matrix& points, const Matrix& centroids,
               std::vector<int>& labels, std::vector<double>& dist2) {
  const Eigen::Index n = points.rows();
  labels.resize(static_cast<std::size_t>(n));
  dist2.resize(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    AssignOne(points, centroids, i, labels[i], dist2[i]);
  }
}

std::vector<double> SilhouetteSamplesSerial(const Matrix& points,
                                            std::span<const int> labels, int k) {
  const auto counts = Counts(labels, k);
  std::vector<double> sums(static_cast<std::size_t>(k));
  std::vector<double> s(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    s[i] = SilhouetteOne(points, labels, counts, sums, i);
  }
  return s;
}

std::vector<double> SilhouetteSamplesOmp(const Matrix& points,
                                         std::span<const int> labels, int k) {
  const auto counts = Counts(labels, k);
  std::vector<double> s(static_cast<std::size_t>(points.rows()));
#pragma omp parallel
  {
    std::vector<double> sums(static_cast<std::size_t>(k));
#pragma omp for schedule(dynamic, 16)
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      s[i] = SilhouetteOne(points, labels, counts, sums, i);
    }
  }
  return s;
}

Matrix PairwiseDistancesSerial(const Matrix& points) {
  const Eigen::Index n = points.rows();
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      out(i, j) = out(j, i) =
          std::sqrt(SquaredDistance(&points(i, 0), &points(j, 0), points.cols()));
    }
  }
  return out;
}

Matrix PairwiseDistancesOmp(const Matrix& points) {
  const Eigen::Index n = points.rows();
  Matrix out = Matrix::Zero(n, n);
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      out(i, j) = out(j, i) =
          std::sqrt(SquaredDistance(&points(i, 0), &points(j, 0), points.cols()));
    }
  }
  return out;
}

}  // namespace bcprobe::kernels
