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

// Span embedding interchange, pooling, standardization and PCA.

#ifndef BCPROBE_EMBEDDINGS_HPP_
#define BCPROBE_EMBEDDINGS_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bcprobe/datasetgen.hpp"

namespace bcprobe {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct SpanEmbeddingRecord {
  std::string canonical;
  std::string dialogue_id;
  std::int64_t turn_index = 0;
  ContextSetting context = ContextSetting::kNone;
  Matrix matrix;  // Q x K, one row per span token
};

struct Provenance {
  std::string model;
  bool fine_tuned = false;

  bool operator==(const Provenance&) const = default;
};

struct EmbeddingSet {
  Provenance provenance;
  std::size_t dimension = 0;  // K
  std::vector<SpanEmbeddingRecord> records;
};

// Interchange format: a header line {"k": K, "model": ..., "fine_tuned": b}
// followed by one record per line. Matrices are written at 32-bit float
// precision and read back through float, so write -> read -> write is
// byte-stable. Throws kDimensionMismatch or kMalformedRecord.
EmbeddingSet ReadEmbeddings(std::istream& in);
void WriteEmbeddings(const EmbeddingSet& set, std::ostream& out);

// Uniform mean over the Q rows.
Vector PoolSpan(const Matrix& matrix);
// Weighted mean; weights must be non-negative with a positive sum.
Vector PoolSpan(const Matrix& matrix, std::span<const double> weights);

struct PointKey {
  std::string canonical;
  std::string dialogue_id;
  std::int64_t turn_index = 0;
  ContextSetting context = ContextSetting::kNone;
};

// Pooled records: row i of points belongs to keys[i].
struct PooledSet {
  Provenance provenance;
  std::vector<PointKey> keys;
  Matrix points;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  std::size_t dimension() const {
    return static_cast<std::size_t>(points.cols());
  }
  // Rows whose key has the given canonical form, in order.
  PooledSet Select(const std::string& canonical) const;
};

PooledSet PoolSet(const EmbeddingSet& set);

// Per-dimension z-scores with the population (n) denominator. Dimensions
// whose spread is negligible relative to their magnitude map to zero.
// Throws kTooFewRecords below two records.
Matrix Standardize(const Matrix& points);
PooledSet Standardize(const PooledSet& set);

struct PcaModel {
  Vector mean;
  Matrix components;  // K x m, unit columns, descending variance
  Vector variances;   // per component, population denominator

  Matrix Transform(const Matrix& points) const;
};

// Exact PCA by symmetric eigendecomposition (covariance when K <= n, Gram
// matrix otherwise). m = min(target_dim, K, n - 1). Each component is signed
// so that its largest-magnitude coordinate is positive.
PcaModel FitPca(const Matrix& points, std::size_t target_dim);
PooledSet PcaReduce(const PooledSet& set, std::size_t target_dim = 100);

}  // namespace bcprobe

#endif  // BCPROBE_EMBEDDINGS_HPP_
