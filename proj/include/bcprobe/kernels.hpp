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

// Data-parallel inner loops of the clustering code. Every kernel has a
// serial reference and an OpenMP variant with identical per-element
// arithmetic, so both return bit-identical results for any thread count.

#ifndef BCPROBE_KERNELS_HPP_
#define BCPROBE_KERNELS_HPP_

#include <span>
#include <vector>

#include "bcprobe/embeddings.hpp"

namespace bcprobe {

enum class Backend { kSerial, kOpenMP };

namespace kernels {

// Squared Euclidean distance, accumulated left to right.
inline double SquaredDistance(const double* a, const double* b, Eigen::Index d) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double t = a[j] - b[j];
    s += t * t;
  }
  return s;
}

// Nearest centroid per point (ties to the lower index) and its squared
// distance.
void AssignSerial(const Matrix& points, const Matrix& centroids,
                  std::vector<int>& labels, std::vector<double>& dist2);
void AssignOmp(const Matrix& points, const Matrix& centroids,
               std::vector<int>& labels, std::vector<double>& dist2);

// Per-point silhouette coefficients. Labels must lie in [0, k). Points in
// singleton clusters, and points with a(i) = b(i) = 0, get 0.
std::vector<double> SilhouetteSamplesSerial(const Matrix& points,
                                            std::span<const int> labels, int k);
std::vector<double> SilhouetteSamplesOmp(const Matrix& points,
                                         std::span<const int> labels, int k);

// Full n x n Euclidean distance matrix.
Matrix PairwiseDistancesSerial(const Matrix& points);
Matrix PairwiseDistancesOmp(const Matrix& points);

inline void Assign(Backend b, const Matrix& points, const Matrix& centroids,
                   std::vector<int>& labels, std::vector<double>& dist2) {
  b == Backend::kSerial ? AssignSerial(points, centroids, labels, dist2)
                        : AssignOmp(points, centroids, labels, dist2);
}

inline std::vector<double> SilhouetteSamples(Backend b, const Matrix& points,
                                             std::span<const int> labels,
                                             int k) {
  return b == Backend::kSerial ? SilhouetteSamplesSerial(points, labels, k)
                               : SilhouetteSamplesOmp(points, labels, k);
}

}  // namespace kernels
}  // namespace bcprobe

#endif  // BCPROBE_KERNELS_HPP_
