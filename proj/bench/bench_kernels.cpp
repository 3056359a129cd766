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

// Serial reference kernels against their OpenMP variants.
//   bench_kernels --benchmark_filter=Silhouette

#include <benchmark/benchmark.h>

#include <random>

#include "bcprobe/kernels.hpp"

namespace {

using bcprobe::Matrix;

Matrix Random(std::int64_t n, std::int64_t d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  Matrix m(n, d);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < d; ++j) m(i, j) = nd(gen);
  return m;
}

std::vector<int> Labels(std::int64_t n, int k) {
  std::vector<int> l(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) l[i] = static_cast<int>(i % k);
  return l;
}

template <bool kParallel>
void BM_Assign(benchmark::State& state) {
  const Matrix points = Random(state.range(0), state.range(1), 1);
  const Matrix centroids = Random(15, state.range(1), 2);
  std::vector<int> labels;
  std::vector<double> d2;
  for (auto _ : state) {
    if constexpr (kParallel) {
      bcprobe::kernels::AssignOmp(points, centroids, labels, d2);
    } else {
      bcprobe::kernels::AssignSerial(points, centroids, labels, d2);
    }
    benchmark::DoNotOptimize(labels.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool kParallel>
void BM_Silhouette(benchmark::State& state) {
  const Matrix points = Random(state.range(0), state.range(1), 3);
  const std::vector<int> labels = Labels(state.range(0), 8);
  for (auto _ : state) {
    auto s = kParallel ? bcprobe::kernels::SilhouetteSamplesOmp(points, labels, 8)
                       : bcprobe::kernels::SilhouetteSamplesSerial(points, labels, 8);
    benchmark::DoNotOptimize(s.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool kParallel>
void BM_Pairwise(benchmark::State& state) {
  const Matrix points = Random(state.range(0), state.range(1), 4);
  for (auto _ : state) {
    Matrix d = kParallel ? bcprobe::kernels::PairwiseDistancesOmp(points)
                         : bcprobe::kernels::PairwiseDistancesSerial(points);
    benchmark::DoNotOptimize(d.data());
  }
}

void Sizes(benchmark::internal::Benchmark* b) {
  for (std::int64_t n : {500, 2000}) {
    for (std::int64_t d : {100, 768}) b->Args({n, d});
  }
}

BENCHMARK(BM_Assign<false>)->Name("Assign/serial")->Apply(Sizes);
BENCHMARK(BM_Assign<true>)->Name("Assign/omp")->Apply(Sizes);
BENCHMARK(BM_Silhouette<false>)->Name("Silhouette/serial")->Apply(Sizes);
BENCHMARK(BM_Silhouette<true>)->Name("Silhouette/omp")->Apply(Sizes);
BENCHMARK(BM_Pairwise<false>)->Name("Pairwise/serial")->Args({15, 768})->Args({200, 768});
BENCHMARK(BM_Pairwise<true>)->Name("Pairwise/omp")->Args({15, 768})->Args({200, 768});

}  // namespace

BENCHMARK_MAIN();
