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

// k-means, silhouette scoring, k sweeps and inter-marker distances.

#ifndef BCPROBE_CLUSTER_HPP_
#define BCPROBE_CLUSTER_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bcprobe/embeddings.hpp"
#include "bcprobe/kernels.hpp"

namespace bcprobe {

struct KMeansOptions {
  int max_iter = 300;
  double tol = 1e-6;  // stop once no centroid moves farther than this
  int restarts = 10;  // best-of-n by inertia, restart r seeded (seed, r)
  Backend backend = Backend::kOpenMP;
};

struct Clustering {
  int k = 0;
  std::vector<int> assignments;
  Matrix centroids;  // k x d
  double inertia = 0.0;
  int iterations = 0;
  // Inertia after each centroid update of the winning run, Lloyd steps
  // first, then one entry per refinement pass.
  std::vector<double> inertia_history;
};

// Greedy k-means++ seeding, Lloyd iterations, then single-point Hartigan
// moves until none lowers the inertia. Empty clusters are re-seeded with
// the point farthest from its centroid (taken from a cluster with at least
// two members), so every cluster id is used. Throws kKTooLarge unless
// 1 <= k <= n.
Clustering KMeans(const Matrix& points, int k, std::uint64_t seed,
                  const KMeansOptions& options = {});

// Sum of squared distances from each point to its assigned centroid.
double Inertia(const Matrix& points, std::span<const int> assignments,
               const Matrix& centroids);

// Mean silhouette coefficient. Throws kSingleCluster when fewer than two
// clusters are populated.
double SilhouetteScore(const Matrix& points, std::span<const int> assignments,
                       Backend backend = Backend::kOpenMP);

struct SilhouetteReport {
  std::vector<std::pair<int, double>> per_k;  // ascending k
  int best_k = 0;
  double best_sc = 0.0;
  Clustering best;
};

// k ranges over [k_min, min(k_max, n - 1)]; ties go to the smaller k. Each
// k runs with seed CounterRng::Substream(seed, k).key(). Throws
// kTooFewPoints when n < k_min + 1.
SilhouetteReport SweepK(const Matrix& points, int k_min, int k_max,
                        std::uint64_t seed, const KMeansOptions& options = {});

// Unweighted mean of the centroids.
Vector MarkerRepresentative(const Clustering& clustering);

struct DistanceMatrix {
  std::vector<std::string> labels;
  Matrix values;
};

// Euclidean distances between representatives, labels in input order.
// Throws kDimensionMismatch.
DistanceMatrix BuildDistanceMatrix(
    const std::vector<std::pair<std::string, Vector>>& representatives);

}  // namespace bcprobe

#endif  // BCPROBE_CLUSTER_HPP_
