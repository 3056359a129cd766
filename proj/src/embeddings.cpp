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

#include "bcprobe/embeddings.hpp"

#include <charconv>
#include <cmath>
#include <nlohmann/json.hpp>

#include "bcprobe/error.hpp"

namespace bcprobe {

namespace {

using nlohmann::json;

[[noreturn]] void Malformed(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kMalformedRecord,
              "embeddings line " + std::to_string(line_no) + ": " + what);
}

void AppendFloat(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), static_cast<float>(v));
  out.append(buf, res.ptr);
}

void RequireRecords(std::size_t n) {
  if (n < 2) {
    throw Error(ErrorCode::kTooFewRecords,
                "need at least 2 records, got " + std::to_string(n));
  }
}

}  // namespace

EmbeddingSet ReadEmbeddings(std::istream& in) {
  EmbeddingSet set;
  bool have_header = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      Malformed(line_no, e.what());
    }
    if (!rec.is_object()) Malformed(line_no, "not an object");
    try {
      if (!have_header) {
        if (!rec.contains("k")) Malformed(line_no, "missing header line");
        const auto k = rec.at("k").get<std::int64_t>();
        if (k < 1) Malformed(line_no, "k must be positive");
        set.dimension = static_cast<std::size_t>(k);
        set.provenance.model = rec.value("model", std::string());
        set.provenance.fine_tuned = rec.value("fine_tuned", false);
        have_header = true;
        continue;
      }
      SpanEmbeddingRecord r;
      r.canonical = rec.at("canonical").get<std::string>();
      r.dialogue_id = rec.at("dialogue_id").get<std::string>();
      r.turn_index = rec.at("turn_index").get<std::int64_t>();
      r.context = ParseContext(rec.at("context").get<std::string>());
      const json& rows = rec.at("matrix");
      if (!rows.is_array() || rows.empty()) Malformed(line_no, "empty matrix");
      r.matrix.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(set.dimension));
      for (std::size_t q = 0; q < rows.size(); ++q) {
        const json& row = rows[q];
        if (!row.is_array()) Malformed(line_no, "matrix row is not an array");
        if (row.size() != set.dimension) {
          throw Error(ErrorCode::kDimensionMismatch,
                      "embeddings line " + std::to_string(line_no) +
                          ": row has " + std::to_string(row.size()) +
                          " values, header says k=" +
                          std::to_string(set.dimension));
        }
        for (std::size_t k = 0; k < set.dimension; ++k) {
          if (!row[k].is_number()) Malformed(line_no, "non-numeric entry");
          const double v = static_cast<float>(row[k].get<double>());
          if (!std::isfinite(v)) Malformed(line_no, "non-finite entry");
          r.matrix(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(k)) = v;
        }
      }
      set.records.push_back(std::move(r));
    } catch (const json::exception& e) {
      Malformed(line_no, e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kInvalidConfig) Malformed(line_no, e.what());
      throw;
    }
  }
  return set;
}

void WriteEmbeddings(const EmbeddingSet& set, std::ostream& out) {
  nlohmann::ordered_json header;
  header["k"] = set.dimension;
  header["model"] = set.provenance.model;
  header["fine_tuned"] = set.provenance.fine_tuned;
  out << header.dump() << '\n';
  for (const SpanEmbeddingRecord& r : set.records) {
    if (static_cast<std::size_t>(r.matrix.cols()) != set.dimension) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "record for '" + r.canonical + "' has K=" +
                      std::to_string(r.matrix.cols()));
    }
    std::string line = "{\"canonical\":" + json(r.canonical).dump() +
                       ",\"dialogue_id\":" + json(r.dialogue_id).dump() +
                       ",\"turn_index\":" + std::to_string(r.turn_index) +
                       ",\"context\":\"" + std::string(ContextName(r.context)) +
                       "\",\"matrix\":[";
    for (Eigen::Index q = 0; q < r.matrix.rows(); ++q) {
      line += q ? ",[" : "[";
      for (Eigen::Index k = 0; k < r.matrix.cols(); ++k) {
        if (k) line += ',';
        AppendFloat(line, r.matrix(q, k));
      }
      line += ']';
    }
    line += "]}\n";
    out << line;
  }
}

Vector PoolSpan(const Matrix& matrix) {
  // Fixed row order so the result does not depend on Eigen's reduction.
  Vector out = Vector::Zero(matrix.cols());
  for (Eigen::Index q = 0; q < matrix.rows(); ++q) out += matrix.row(q).transpose();
  return out / static_cast<double>(matrix.rows());
}

Vector PoolSpan(const Matrix& matrix, std::span<const double> weights) {
  if (weights.size() != static_cast<std::size_t>(matrix.rows())) {
    throw Error(ErrorCode::kDimensionMismatch,
                "one weight per span token is required");
  }
  double total = 0.0;
  Vector out = Vector::Zero(matrix.cols());
  for (Eigen::Index q = 0; q < matrix.rows(); ++q) {
    const double w = weights[static_cast<std::size_t>(q)];
    if (!(w >= 0.0)) {
      throw Error(ErrorCode::kInvalidConfig, "pooling weights must be >= 0");
    }
    out += w * matrix.row(q).transpose();
    total += w;
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "pooling weights sum to zero");
  }
  return out / total;
}

PooledSet PooledSet::Select(const std::string& canonical) const {
  PooledSet out;
  out.provenance = provenance;
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i].canonical == canonical) {
      rows.push_back(static_cast<Eigen::Index>(i));
      out.keys.push_back(keys[i]);
    }
  }
  out.points.resize(static_cast<Eigen::Index>(rows.size()), points.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.points.row(static_cast<Eigen::Index>(i)) = points.row(rows[i]);
  }
  return out;
}

PooledSet PoolSet(const EmbeddingSet& set) {
  PooledSet out;
  out.provenance = set.provenance;
  out.points.resize(static_cast<Eigen::Index>(set.records.size()),
                    static_cast<Eigen::Index>(set.dimension));
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    const SpanEmbeddingRecord& r = set.records[i];
    if (static_cast<std::size_t>(r.matrix.cols()) != set.dimension) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "record " + std::to_string(i) + " has K=" +
                      std::to_string(r.matrix.cols()));
    }
    out.points.row(static_cast<Eigen::Index>(i)) = PoolSpan(r.matrix).transpose();
    out.keys.push_back({r.canonical, r.dialogue_id, r.turn_index, r.context});
  }
  return out;
}

Matrix Standardize(const Matrix& points) {
  const Eigen::Index n = points.rows();
  RequireRecords(static_cast<std::size_t>(n));
  Matrix out(n, points.cols());
  for (Eigen::Index k = 0; k < points.cols(); ++k) {
    double mean = 0.0;
    double scale = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      mean += points(i, k);
      scale = std::max(scale, std::abs(points(i, k)));
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = points(i, k) - mean;
      var += d * d;
    }
    const double sd = std::sqrt(var / static_cast<double>(n));
    if (sd <= 1e-10 * std::max(1.0, scale)) {
      out.col(k).setZero();
      continue;
    }
    for (Eigen::Index i = 0; i < n; ++i) out(i, k) = (points(i, k) - mean) / sd;
  }
  return out;
}

PooledSet Standardize(const PooledSet& set) {
  PooledSet out;
  out.provenance = set.provenance;
  out.keys = set.keys;
  out.points = Standardize(set.points);
  return out;
}

Matrix PcaModel::Transform(const Matrix& points) const {
  Matrix centered = points.rowwise() - mean.transpose();
  return centered * components;
}

PcaModel FitPca(const Matrix& points, std::size_t target_dim) {
  const auto n = static_cast<std::size_t>(points.rows());
  const auto k = static_cast<std::size_t>(points.cols());
  RequireRecords(n);
  const std::size_t m = std::min({target_dim, k, n - 1});
  const auto em = static_cast<Eigen::Index>(m);

  PcaModel model;
  model.mean = points.colwise().mean().transpose();
  const Matrix centered = points.rowwise() - model.mean.transpose();
  const double inv_n = 1.0 / static_cast<double>(n);

  model.components.resize(static_cast<Eigen::Index>(k), em);
  model.variances.resize(em);
  if (k <= n) {
    const Eigen::MatrixXd cov = (centered.transpose() * centered) * inv_n;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    const Eigen::Index top = static_cast<Eigen::Index>(k) - 1;
    for (Eigen::Index j = 0; j < em; ++j) {
      model.components.col(j) = solver.eigenvectors().col(top - j);
      model.variances(j) = std::max(0.0, solver.eigenvalues()(top - j));
    }
  } else {
    const Eigen::MatrixXd gram = (centered * centered.transpose()) * inv_n;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    const Eigen::Index top = static_cast<Eigen::Index>(n) - 1;
    for (Eigen::Index j = 0; j < em; ++j) {
      Vector v = centered.transpose() * solver.eigenvectors().col(top - j);
      const double norm = v.norm();
      model.components.col(j) = norm > 0.0 ? Vector(v / norm)
                                           : Vector(Vector::Zero(v.size()));
      model.variances(j) = std::max(0.0, solver.eigenvalues()(top - j));
    }
  }

  for (Eigen::Index j = 0; j < em; ++j) {
    Eigen::Index arg = 0;
    for (Eigen::Index r = 1; r < model.components.rows(); ++r) {
      if (std::abs(model.components(r, j)) > std::abs(model.components(arg, j))) {
        arg = r;
      }
    }
    if (model.components(arg, j) < 0.0) model.components.col(j) *= -1.0;
  }
  return model;
}

PooledSet PcaReduce(const PooledSet& set, std::size_t target_dim) {
  const PcaModel model = FitPca(set.points, target_dim);
  PooledSet out;
  out.provenance = set.provenance;
  out.keys = set.keys;
  out.points = model.Transform(set.points);
  return out;
}

}  // namespace bcprobe
