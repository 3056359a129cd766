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

#include "bcprobe/cluster.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "bcprobe/error.hpp"
#include "bcprobe/rng.hpp"

namespace bcprobe {

namespace {

// Greedy k-means++: each new center is the best of 2 + floor(ln k) draws
// from the D^2 distribution, judged by the potential it leaves behind.
Matrix SeedPlusPlus(const Matrix& points, int k, CounterRng& rng) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  const int trials = 2 + static_cast<int>(std::log(static_cast<double>(k)));
  Matrix centroids(k, d);
  centroids.row(0) = points.row(static_cast<Eigen::Index>(
      rng.NextBelow(static_cast<std::uint64_t>(n))));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    d2[i] = kernels::SquaredDistance(&points(i, 0), &centroids(0, 0), d);
  }
  std::vector<double> trial_d2(static_cast<std::size_t>(n));
  std::vector<double> best_d2(static_cast<std::size_t>(n));
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    Eigen::Index best_pick = -1;
    double best_potential = 0.0;
    for (int t = 0; t < trials; ++t) {
      Eigen::Index pick = n - 1;
      if (total > 0.0) {
        const double r = rng.NextDouble() * total;
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          acc += d2[i];
          if (r < acc) {
            pick = i;
            break;
          }
        }
      } else {
        pick = static_cast<Eigen::Index>(
            rng.NextBelow(static_cast<std::uint64_t>(n)));
      }
      double potential = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        trial_d2[i] = std::min(
            d2[i], kernels::SquaredDistance(&points(i, 0), &points(pick, 0), d));
        potential += trial_d2[i];
      }
      if (best_pick < 0 || potential < best_potential) {
        best_pick = pick;
        best_potential = potential;
        best_d2.swap(trial_d2);
      }
    }
    centroids.row(c) = points.row(best_pick);
    d2.swap(best_d2);
  }
  return centroids;
}

// Moves the farthest point of a multi-member cluster into each empty one.
void FillEmptyClusters(const Matrix& points, Matrix& centroids,
                       std::vector<int>& labels, std::vector<double>& dist2) {
  const int k = static_cast<int>(centroids.rows());
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  for (int c = 0; c < k; ++c) {
    if (counts[static_cast<std::size_t>(c)] > 0) continue;
    std::size_t far = labels.size();
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (counts[static_cast<std::size_t>(labels[i])] < 2) continue;
      if (far == labels.size() || dist2[i] > dist2[far]) far = i;
    }
    --counts[static_cast<std::size_t>(labels[far])];
    ++counts[static_cast<std::size_t>(c)];
    labels[far] = c;
    dist2[far] = 0.0;
    centroids.row(c) = points.row(static_cast<Eigen::Index>(far));
  }
}

Matrix Means(const Matrix& points, const std::vector<int>& labels, int k) {
  Matrix sums = Matrix::Zero(k, points.cols());
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    sums.row(labels[i]) += points.row(static_cast<Eigen::Index>(i));
    ++counts[static_cast<std::size_t>(labels[i])];
  }
  for (int c = 0; c < k; ++c) {
    sums.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
  }
  return sums;
}

// Hartigan refinement: move single points while that lowers the sum of
// squares. Moving x from a (size n_a) to b (size n_b) changes it by
// n_b/(n_b+1)|x-c_b|^2 - n_a/(n_a-1)|x-c_a|^2. A stable result is also a
// Lloyd fixed point. Returns the number of passes that moved something.
int Refine(const Matrix& points, Clustering& out, int max_passes) {
  const int k = out.k;
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (int l : out.assignments) ++counts[static_cast<std::size_t>(l)];
  int passes = 0;
  for (; passes < max_passes; ++passes) {
    bool moved = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int a = out.assignments[static_cast<std::size_t>(i)];
      const auto na = static_cast<double>(counts[static_cast<std::size_t>(a)]);
      if (na < 2) continue;
      const double remove =
          na / (na - 1.0) *
          kernels::SquaredDistance(&points(i, 0), &out.centroids(a, 0), d);
      int best = a;
      double best_gain = 0.0;
      for (int b = 0; b < k; ++b) {
        if (b == a) continue;
        const auto nb = static_cast<double>(counts[static_cast<std::size_t>(b)]);
        const double add =
            nb / (nb + 1.0) *
            kernels::SquaredDistance(&points(i, 0), &out.centroids(b, 0), d);
        // Relative margin so rounding noise never triggers a move.
        const double gain = remove - add;
        if (gain > best_gain && gain > 1e-12 * remove) {
          best = b;
          best_gain = gain;
        }
      }
      if (best == a) continue;
      const auto nb = static_cast<double>(counts[static_cast<std::size_t>(best)]);
      out.centroids.row(a) = (out.centroids.row(a) * na - points.row(i)) / (na - 1.0);
      out.centroids.row(best) =
          (out.centroids.row(best) * nb + points.row(i)) / (nb + 1.0);
      --counts[static_cast<std::size_t>(a)];
      ++counts[static_cast<std::size_t>(best)];
      out.assignments[static_cast<std::size_t>(i)] = best;
      moved = true;
    }
    if (!moved) break;
    out.centroids = Means(points, out.assignments, k);
    out.inertia = Inertia(points, out.assignments, out.centroids);
    out.inertia_history.push_back(out.inertia);
  }
  return passes;
}

Clustering RunLloyd(const Matrix& points, int k, CounterRng& rng,
                    const KMeansOptions& options) {
  Clustering out;
  out.k = k;
  out.centroids = SeedPlusPlus(points, k, rng);
  std::vector<double> dist2;
  for (int iter = 0; iter < std::max(1, options.max_iter); ++iter) {
    kernels::Assign(options.backend, points, out.centroids, out.assignments,
                    dist2);
    FillEmptyClusters(points, out.centroids, out.assignments, dist2);
    Matrix next = Means(points, out.assignments, k);
    double shift = 0.0;
    for (int c = 0; c < k; ++c) {
      shift = std::max(shift, (next.row(c) - out.centroids.row(c)).norm());
    }
    out.centroids = std::move(next);
    out.inertia = Inertia(points, out.assignments, out.centroids);
    assert(out.inertia_history.empty() ||
           out.inertia <= out.inertia_history.back() * (1 + 1e-12) + 1e-300);
    out.inertia_history.push_back(out.inertia);
    out.iterations = iter + 1;
    if (shift < options.tol) break;
  }
  out.iterations += Refine(points, out, std::max(1, options.max_iter));
  return out;
}

}  // namespace

double Inertia(const Matrix& points, std::span<const int> assignments,
               const Matrix& centroids) {
  double total = 0.0;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    total += kernels::SquaredDistance(&points(static_cast<Eigen::Index>(i), 0),
                                      &centroids(assignments[i], 0),
                                      points.cols());
  }
  return total;
}

Clustering KMeans(const Matrix& points, int k, std::uint64_t seed,
                  const KMeansOptions& options) {
  if (k < 1 || k > points.rows()) {
    throw Error(ErrorCode::kKTooLarge,
                "k=" + std::to_string(k) + " requires 1 <= k <= n=" +
                    std::to_string(points.rows()));
  }
  Clustering best;
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    CounterRng rng = CounterRng::Substream(seed, static_cast<std::uint64_t>(r));
    Clustering run = RunLloyd(points, k, rng, options);
    if (r == 0 || run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

double SilhouetteScore(const Matrix& points, std::span<const int> assignments,
                       Backend backend) {
  if (assignments.size() != static_cast<std::size_t>(points.rows())) {
    throw Error(ErrorCode::kDimensionMismatch,
                "one assignment per point is required");
  }
  int k = 0;
  for (int l : assignments) {
    if (l < 0) {
      throw Error(ErrorCode::kDimensionMismatch, "negative cluster label");
    }
    k = std::max(k, l + 1);
  }
  std::vector<bool> used(static_cast<std::size_t>(k), false);
  for (int l : assignments) used[static_cast<std::size_t>(l)] = true;
  if (std::count(used.begin(), used.end(), true) < 2) {
    throw Error(ErrorCode::kSingleCluster,
                "silhouette needs at least two populated clusters");
  }
  const std::vector<double> s =
      kernels::SilhouetteSamples(backend, points, assignments, k);
  double total = 0.0;
  for (double v : s) total += v;
  return total / static_cast<double>(s.size());
}

SilhouetteReport SweepK(const Matrix& points, int k_min, int k_max,
                        std::uint64_t seed, const KMeansOptions& options) {
  if (k_min < 2 || k_max < k_min) {
    throw Error(ErrorCode::kInvalidConfig,
                "k range must satisfy 2 <= k_min <= k_max");
  }
  const auto n = static_cast<int>(points.rows());
  if (n < k_min + 1) {
    throw Error(ErrorCode::kTooFewPoints,
                "need at least " + std::to_string(k_min + 1) +
                    " points, got " + std::to_string(n));
  }
  SilhouetteReport report;
  const int hi = std::min(k_max, n - 1);
  for (int k = k_min; k <= hi; ++k) {
    const std::uint64_t k_seed =
        CounterRng::Substream(seed, static_cast<std::uint64_t>(k)).key();
    Clustering c = KMeans(points, k, k_seed, options);
    const double sc = SilhouetteScore(points, c.assignments, options.backend);
    report.per_k.emplace_back(k, sc);
    if (report.per_k.size() == 1 || sc > report.best_sc) {
      report.best_k = k;
      report.best_sc = sc;
      report.best = std::move(c);
    }
  }
  return report;
}

Vector MarkerRepresentative(const Clustering& clustering) {
  Vector sum = Vector::Zero(clustering.centroids.cols());
  for (Eigen::Index c = 0; c < clustering.centroids.rows(); ++c) {
    sum += clustering.centroids.row(c).transpose();
  }
  return sum / static_cast<double>(clustering.centroids.rows());
}

DistanceMatrix BuildDistanceMatrix(
    const std::vector<std::pair<std::string, Vector>>& representatives) {
  DistanceMatrix out;
  const auto n = static_cast<Eigen::Index>(representatives.size());
  const Eigen::Index d = n ? representatives.front().second.size() : 0;
  Matrix points(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [label, vec] = representatives[static_cast<std::size_t>(i)];
    if (vec.size() != d) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "representative '" + label + "' has dimension " +
                      std::to_string(vec.size()) + ", expected " +
                      std::to_string(d));
    }
    points.row(i) = vec.transpose();
    out.labels.push_back(label);
  }
  out.values = d > 0 ? kernels::PairwiseDistancesSerial(points)
                     : Matrix(Matrix::Zero(n, n));
  return out;
}

}  // namespace bcprobe
