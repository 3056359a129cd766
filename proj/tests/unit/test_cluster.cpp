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

#include <doctest.h>

#include <random>

#include "bcprobe/cluster.hpp"
#include "bcprobe/error.hpp"
#include "oracles.hpp"

using namespace bcprobe;

namespace {

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kIoError;
}

Matrix Rows(std::initializer_list<std::initializer_list<double>> rows) {
  oracle::Points p;
  for (auto r : rows) p.emplace_back(r);
  return oracle::ToMatrix(p);
}

Matrix ThreeBlobs(std::mt19937_64& gen, std::vector<int>* truth = nullptr) {
  // Radius ~ 3 sigma = 1.5; centers 30 apart.
  oracle::Points centers = {{0, 0, 0}, {30, 0, 0}, {0, 30, 0}};
  return oracle::ToMatrix(oracle::Blobs(gen, centers, 90, 0.5, truth));
}

}  // namespace

TEST_CASE("kmeans: k = 1 gives the mean") {
  std::mt19937_64 gen(1);
  Matrix m = oracle::ToMatrix(oracle::Gaussian(gen, 25, 3));
  Clustering c = KMeans(m, 1, 4);
  Vector mean = m.colwise().mean().transpose();
  CHECK((c.centroids.row(0).transpose() - mean).norm() <= 1e-12);
  CHECK(std::abs(c.inertia - oracle::Variance(m) * 25) <= 1e-9);
}

TEST_CASE("kmeans: four points on a line") {
  Matrix m = Rows({{0}, {1}, {10}, {11}});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Clustering c = KMeans(m, 2, seed);
    CHECK(c.assignments[0] == c.assignments[1]);
    CHECK(c.assignments[2] == c.assignments[3]);
    CHECK(c.assignments[0] != c.assignments[2]);
    CHECK(c.centroids(c.assignments[0], 0) == 0.5);
    CHECK(c.centroids(c.assignments[2], 0) == 10.5);
    CHECK(c.inertia == 1.0);
  }
}

TEST_CASE("kmeans: validation and determinism") {
  Matrix m = Rows({{0}, {1}, {2}});
  CHECK(CodeOf([&] { KMeans(m, 4, 1); }) == ErrorCode::kKTooLarge);
  CHECK(CodeOf([&] { KMeans(m, 0, 1); }) == ErrorCode::kKTooLarge);
  Clustering c = KMeans(m, 3, 9);
  CHECK(c.inertia == 0.0);
  std::mt19937_64 gen(2);
  Matrix r = oracle::ToMatrix(oracle::Gaussian(gen, 60, 4));
  Clustering a = KMeans(r, 5, 77);
  Clustering b = KMeans(r, 5, 77);
  CHECK(a.assignments == b.assignments);
  CHECK(a.centroids == b.centroids);
  KMeansOptions serial;
  serial.backend = Backend::kSerial;
  Clustering s = KMeans(r, 5, 77, serial);
  CHECK(s.assignments == a.assignments);
  CHECK(s.inertia == a.inertia);
}

TEST_CASE("kmeans: duplicate points still fill every cluster") {
  Matrix m = Rows({{1, 1}, {1, 1}, {1, 1}, {1, 1}, {5, 5}});
  Clustering c = KMeans(m, 4, 3);
  std::vector<int> counts(4, 0);
  for (int l : c.assignments) ++counts[l];
  for (int n : counts) CHECK(n >= 1);
}

TEST_CASE("kmeans: brute-force optimum and monotone inertia") {
  std::mt19937_64 gen(3);
  int optimal = 0;
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 7;
    oracle::Points p = oracle::Gaussian(gen, n, 2);
    Clustering c = KMeans(oracle::ToMatrix(p), 2, t);
    optimal += c.inertia <= oracle::BruteForceTwoMeans(p) + 1e-9;
    for (std::size_t i = 1; i < c.inertia_history.size(); ++i) {
      CHECK(c.inertia_history[i] <= c.inertia_history[i - 1]);
    }
    CHECK(c.inertia == doctest::Approx(Inertia(oracle::ToMatrix(p), c.assignments,
                                              c.centroids)));
  }
  CHECK(optimal >= 95);
}

TEST_CASE("kmeans: restarts never do worse") {
  std::mt19937_64 gen(4);
  for (int t = 0; t < 10; ++t) {
    Matrix m = oracle::ToMatrix(oracle::Gaussian(gen, 40, 2));
    KMeansOptions one, more;
    one.restarts = 1;
    more.restarts = 5;
    CHECK(KMeans(m, 4, t, more).inertia <= KMeans(m, 4, t, one).inertia);
  }
}

TEST_CASE("silhouette: four-point fixture") {
  Matrix m = Rows({{0, 0}, {0, 1}, {10, 10}, {10, 11}});
  const std::vector<int> labels = {0, 0, 1, 1};
  const double sc = SilhouetteScore(m, labels);
  CHECK(std::abs(sc - 0.9293) <= 1e-4);
  auto s = kernels::SilhouetteSamplesSerial(m, labels, 2);
  CHECK(std::abs(s[0] - 0.93105) <= 1e-5);
  CHECK(std::abs(s[1] - 0.92752) <= 1e-5);
  CHECK(std::abs(s[2] - 0.92752) <= 1e-5);
  CHECK(std::abs(s[3] - 0.93105) <= 1e-5);
}

TEST_CASE("silhouette: conventions") {
  Matrix same = Rows({{2, 2}, {2, 2}, {2, 2}, {2, 2}});
  CHECK(SilhouetteScore(same, std::vector<int>{0, 0, 1, 1}) == 0.0);
  Matrix m = Rows({{0}, {0.5}, {9}, {9.5}, {40}});
  auto s = kernels::SilhouetteSamplesSerial(m, std::vector<int>{0, 0, 1, 1, 2}, 3);
  CHECK(s[4] == 0.0);
  CHECK(CodeOf([&] { SilhouetteScore(m, std::vector<int>{1, 1, 1, 1, 1}); }) ==
        ErrorCode::kSingleCluster);
  CHECK(CodeOf([&] { SilhouetteScore(m, std::vector<int>{0, 1}); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("silhouette: matches the oracle and its invariances") {
  std::mt19937_64 gen(5);
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + gen() % 99;
    const int d = 1 + gen() % 10;
    const int k = 2 + gen() % 4;
    oracle::Points p = oracle::Gaussian(gen, n, d, 1.0 + t % 3);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = i < 2 ? i : static_cast<int>(gen() % k);
    const Matrix m = oracle::ToMatrix(p);
    const double want = oracle::Silhouette(p, labels);
    const double got = SilhouetteScore(m, labels);
    CHECK(std::abs(got - want) <= 1e-9);
    CHECK(got >= -1.0);
    CHECK(got <= 1.0);
    CHECK(SilhouetteScore(m, labels, Backend::kSerial) == got);

    // Relabel clusters.
    std::vector<int> perm = {3, 0, 4, 1, 2};
    std::vector<int> relabeled(n);
    for (int i = 0; i < n; ++i) relabeled[i] = perm[labels[i]];
    CHECK(std::abs(SilhouetteScore(m, relabeled) - got) <= 1e-9);

    // Rotate and translate.
    Eigen::MatrixXd q = oracle::RandomOrthonormal(gen, d, d);
    Matrix moved = m * q;
    moved.rowwise() += Eigen::RowVectorXd::Constant(d, 3.5);
    CHECK(std::abs(SilhouetteScore(moved, labels) - got) <= 1e-9);
  }
}

TEST_CASE("sweep: blobs are recovered") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 gen(100 + seed);
    oracle::Points two_centers = {{0, 0}, {10, 0}};
    Matrix two = oracle::ToMatrix(oracle::Blobs(gen, two_centers, 60, 0.5));
    CHECK(SweepK(two, 2, 15, seed).best_k == 2);
    CHECK(SweepK(ThreeBlobs(gen), 2, 15, seed).best_k == 3);
  }
}

TEST_CASE("sweep: range clamping, ties and determinism") {
  std::mt19937_64 gen(6);
  Matrix m = oracle::ToMatrix(oracle::Gaussian(gen, 10, 2));
  SilhouetteReport r = SweepK(m, 2, 15, 3);
  REQUIRE(r.per_k.size() == 8);
  CHECK(r.per_k.back().first == 9);
  double best = -2.0;
  int best_k = 0;
  for (auto [k, sc] : r.per_k) {
    if (sc > best) {
      best = sc;
      best_k = k;
    }
  }
  CHECK(r.best_k == best_k);
  CHECK(r.best_sc == best);
  SilhouetteReport again = SweepK(m, 2, 15, 3);
  CHECK(again.per_k == r.per_k);
  CHECK(again.best.assignments == r.best.assignments);

  // All points equal: every k scores 0 and the smallest k wins.
  Matrix flat = Matrix::Constant(6, 2, 1.0);
  CHECK(SweepK(flat, 2, 5, 1).best_k == 2);
  CHECK(CodeOf([&] { SweepK(m.topRows(2), 2, 15, 1); }) == ErrorCode::kTooFewPoints);
  CHECK(CodeOf([&] { SweepK(m, 1, 15, 1); }) == ErrorCode::kInvalidConfig);
}

TEST_CASE("representatives and distance matrices") {
  Clustering c;
  c.centroids = Rows({{0, 0}, {2, 2}});
  CHECK(MarkerRepresentative(c) == Vector((Vector(2) << 1, 1).finished()));
  Clustering one;
  one.centroids = Rows({{3, -1}});
  CHECK(MarkerRepresentative(one) == Vector((Vector(2) << 3, -1).finished()));

  std::mt19937_64 gen(7);
  Clustering four;
  four.centroids = oracle::ToMatrix(oracle::Gaussian(gen, 4, 5));
  Vector rep = MarkerRepresentative(four);
  for (int j = 0; j < 5; ++j) {
    double s = 0.0;
    for (int c2 = 0; c2 < 4; ++c2) s += four.centroids(c2, j);
    CHECK(std::abs(rep(j) - s / 4) <= 1e-12);
  }

  auto v = [](std::initializer_list<double> xs) {
    Vector out(xs.size());
    int i = 0;
    for (double x : xs) out(i++) = x;
    return out;
  };
  DistanceMatrix dm = BuildDistanceMatrix({{"a", v({0})}, {"b", v({3})}, {"c", v({7})}});
  CHECK(dm.labels == std::vector<std::string>{"a", "b", "c"});
  CHECK(dm.values(0, 2) == 7.0);
  CHECK(dm.values(1, 2) == 4.0);
  DistanceMatrix zero = BuildDistanceMatrix({{"a", v({1, 2})}, {"b", v({1, 2})}});
  CHECK(zero.values.isZero(0.0));
  CHECK(CodeOf([&] { BuildDistanceMatrix({{"a", v({1, 2})}, {"b", v({1})}}); }) ==
        ErrorCode::kDimensionMismatch);

  std::vector<std::pair<std::string, Vector>> reps;
  oracle::Points p = oracle::Gaussian(gen, 15, 6);
  for (int i = 0; i < 15; ++i) {
    reps.push_back({"m" + std::to_string(i), oracle::ToMatrix({p[i]}).row(0).transpose()});
  }
  DistanceMatrix big = BuildDistanceMatrix(reps);
  for (int i = 0; i < 15; ++i) {
    for (int j = 0; j < 15; ++j) {
      CHECK(big.values(i, j) == big.values(j, i));
      CHECK(std::abs(big.values(i, j) - oracle::Dist(p[i], p[j])) <= 1e-12);
    }
  }
}
