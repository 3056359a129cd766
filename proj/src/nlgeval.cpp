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

#include "bcprobe/nlgeval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "bcprobe/error.hpp"

namespace bcprobe {

namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

// Whitespace words (EN) or non-whitespace characters (JA).
std::vector<std::string> Units(std::string_view s, Language lang) {
  std::vector<std::string> out;
  const std::u32string cps = text::Decode(s);
  if (lang == Language::kJa) {
    for (char32_t c : cps) {
      if (!text::IsSpace(c)) out.push_back(text::Encode(c));
    }
    return out;
  }
  std::u32string cur;
  for (char32_t c : cps) {
    if (text::IsSpace(c)) {
      if (!cur.empty()) out.push_back(text::Encode(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(text::Encode(cur));
  return out;
}

std::size_t MarkerUnits(const MarkerSpan& s, Language lang) {
  if (lang == Language::kJa) return s.char_end - s.char_start;
  return std::max<std::size_t>(1, Units(s.matched_variant, lang).size());
}

void CheckLanguage(const GenerationRecord& r, const MarkerLexicon& lex) {
  if (r.language != lex.language()) {
    throw Error(ErrorCode::kLanguageMismatch,
                "generation record language " +
                    std::string(LanguageName(r.language)) +
                    " does not match lexicon");
  }
}

std::map<std::string, std::size_t> NGramCounts(
    const std::vector<std::string>& units, std::size_t n) {
  std::map<std::string, std::size_t> counts;
  for (std::size_t i = 0; i + n <= units.size(); ++i) {
    std::string key;
    for (std::size_t j = 0; j < n; ++j) {
      if (j) key.push_back('\x1f');
      key += units[i + j];
    }
    ++counts[key];
  }
  return counts;
}

std::vector<Vector> CheckedVectors(const std::vector<Vector>& vecs) {
  std::vector<Vector> out;
  out.reserve(vecs.size());
  for (const Vector& v : vecs) {
    const double norm = std::sqrt(v.dot(v));
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorCode::kMissingVectors, "token vector has zero norm");
    }
    out.push_back(v);
  }
  return out;
}

double Cosine(const Vector& a, const Vector& b) {
  const double c = a.dot(b) / std::sqrt(a.dot(a) * b.dot(b));
  return std::clamp(c, -1.0, 1.0);
}

std::vector<Vector> ParseVectors(const json& arr) {
  std::vector<Vector> out;
  for (const json& row : arr) {
    Vector v(static_cast<Eigen::Index>(row.size()));
    for (std::size_t i = 0; i < row.size(); ++i) {
      v(static_cast<Eigen::Index>(i)) = row.at(i).get<double>();
    }
    out.push_back(std::move(v));
  }
  return out;
}

ojson VectorsJson(const std::vector<Vector>& vecs) {
  ojson arr = ojson::array();
  for (const Vector& v : vecs) {
    arr.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  }
  return arr;
}

}  // namespace

std::vector<GenerationRecord> ReadGenerations(std::istream& in) {
  std::vector<GenerationRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "generations line " + std::to_string(line_no);
    try {
      const json rec = json::parse(line);
      GenerationRecord r;
      r.context = rec.at("context").get<std::string>();
      r.generated = rec.at("generated").get<std::string>();
      r.reference = rec.at("reference").get<std::string>();
      r.language = ParseLanguage(rec.at("language").get<std::string>());
      if (rec.contains("marker_logprobs") && !rec["marker_logprobs"].is_null()) {
        std::vector<MarkerLogprob> lps;
        for (const json& js : rec["marker_logprobs"]) {
          MarkerLogprob lp;
          lp.surface = js.at("surface").get<std::string>();
          lp.canonical = js.at("canonical").get<std::string>();
          lp.logprob = js.at("logprob").get<double>();
          if (!std::isfinite(lp.logprob) || lp.logprob > 0.0) {
            throw Error(ErrorCode::kMalformedRecord,
                        where + ": logprob must be finite and <= 0");
          }
          lps.push_back(std::move(lp));
        }
        r.marker_logprobs = std::move(lps);
      }
      if (rec.contains("cand_vecs") && !rec["cand_vecs"].is_null()) {
        r.candidate_vectors = ParseVectors(rec["cand_vecs"]);
      }
      if (rec.contains("ref_vecs") && !rec["ref_vecs"].is_null()) {
        r.reference_vectors = ParseVectors(rec["ref_vecs"]);
      }
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedRecord, where + ": " + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kInvalidConfig) {
        throw Error(ErrorCode::kMalformedRecord, where + ": " + e.what());
      }
      throw;
    }
  }
  return out;
}

void WriteGenerations(const std::vector<GenerationRecord>& records,
                      std::ostream& out) {
  for (const GenerationRecord& r : records) {
    ojson rec;
    rec["context"] = r.context;
    rec["generated"] = r.generated;
    rec["reference"] = r.reference;
    rec["language"] = LanguageName(r.language);
    if (r.marker_logprobs) {
      ojson lps = ojson::array();
      for (const MarkerLogprob& lp : *r.marker_logprobs) {
        ojson js;
        js["surface"] = lp.surface;
        js["canonical"] = lp.canonical;
        js["logprob"] = lp.logprob;
        lps.push_back(std::move(js));
      }
      rec["marker_logprobs"] = std::move(lps);
    }
    if (r.candidate_vectors) rec["cand_vecs"] = VectorsJson(*r.candidate_vectors);
    if (r.reference_vectors) rec["ref_vecs"] = VectorsJson(*r.reference_vectors);
    out << rec.dump() << '\n';
  }
}

double MarkerFrequency(const std::vector<GenerationRecord>& records,
                       const MarkerLexicon& lex) {
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyGenerationSet, "no generation records");
  }
  std::size_t marker_units = 0;
  std::size_t units = 0;
  for (const GenerationRecord& r : records) {
    CheckLanguage(r, lex);
    units += Units(r.generated, r.language).size();
    for (const MarkerSpan& s : FindSpansInText(r.generated, lex)) {
      marker_units += MarkerUnits(s, r.language);
    }
  }
  return units == 0 ? 0.0
                    : static_cast<double>(marker_units) / static_cast<double>(units);
}

int MarkerDiversity(const std::vector<GenerationRecord>& records,
                    const MarkerLexicon& lex) {
  std::set<std::string> types;
  for (const GenerationRecord& r : records) {
    CheckLanguage(r, lex);
    for (const MarkerSpan& s : FindSpansInText(r.generated, lex)) {
      types.insert(s.canonical);
    }
  }
  return static_cast<int>(types.size());
}

double WeightedPerplexity(const std::vector<GenerationRecord>& records) {
  double nll = 0.0;
  std::size_t count = 0;
  for (const GenerationRecord& r : records) {
    if (!r.marker_logprobs) continue;
    for (const MarkerLogprob& lp : *r.marker_logprobs) {
      nll -= lp.logprob;
      ++count;
    }
  }
  if (count == 0) {
    throw Error(ErrorCode::kNoMarkerTokens,
                "no marker log-probabilities to score");
  }
  return std::exp(nll / static_cast<double>(count));
}

double Bleu(const std::vector<GenerationRecord>& records) {
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyPair, "BLEU needs at least one pair");
  }
  constexpr std::size_t kMaxOrder = 4;
  std::size_t clipped[kMaxOrder] = {};
  std::size_t totals[kMaxOrder] = {};
  std::size_t cand_len = 0;
  std::size_t ref_len = 0;
  for (const GenerationRecord& r : records) {
    const auto cand = Units(r.generated, r.language);
    const auto ref = Units(r.reference, r.language);
    cand_len += cand.size();
    ref_len += ref.size();
    for (std::size_t n = 1; n <= kMaxOrder; ++n) {
      const auto cc = NGramCounts(cand, n);
      const auto rc = NGramCounts(ref, n);
      for (const auto& [gram, count] : cc) {
        totals[n - 1] += count;
        const auto it = rc.find(gram);
        if (it != rc.end()) clipped[n - 1] += std::min(count, it->second);
      }
    }
  }
  if (cand_len == 0) return 0.0;

  double log_sum = 0.0;
  int orders = 0;
  for (std::size_t n = 0; n < kMaxOrder; ++n) {
    if (totals[n] == 0) continue;
    const double num = clipped[n] > 0 ? static_cast<double>(clipped[n]) : kBleuEpsilon;
    log_sum += std::log(num / static_cast<double>(totals[n]));
    ++orders;
  }
  const double precision = std::exp(log_sum / orders);
  const double bp =
      cand_len < ref_len
          ? std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len))
          : 1.0;
  return bp * precision;
}

double BertScoreF1(const GenerationRecord& record) {
  if (!record.candidate_vectors || !record.reference_vectors ||
      record.candidate_vectors->empty() || record.reference_vectors->empty()) {
    throw Error(ErrorCode::kMissingVectors,
                "BERTScore needs candidate and reference token vectors");
  }
  const auto cand = CheckedVectors(*record.candidate_vectors);
  const auto ref = CheckedVectors(*record.reference_vectors);
  const Eigen::Index d = cand.front().size();
  for (const auto* side : {&cand, &ref}) {
    for (const Vector& v : *side) {
      if (v.size() != d) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "token vectors have inconsistent dimensions");
      }
    }
  }
  Matrix sim(static_cast<Eigen::Index>(cand.size()),
             static_cast<Eigen::Index>(ref.size()));
  for (std::size_t i = 0; i < cand.size(); ++i) {
    for (std::size_t j = 0; j < ref.size(); ++j) {
      sim(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          Cosine(cand[i], ref[j]);
    }
  }
  double p = 0.0;
  for (Eigen::Index i = 0; i < sim.rows(); ++i) p += sim.row(i).maxCoeff();
  p /= static_cast<double>(sim.rows());
  double r = 0.0;
  for (Eigen::Index j = 0; j < sim.cols(); ++j) r += sim.col(j).maxCoeff();
  r /= static_cast<double>(sim.cols());
  if (p * r <= 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

double BertScoreF1(const std::vector<GenerationRecord>& records) {
  if (records.empty()) {
    throw Error(ErrorCode::kMissingVectors, "no records to score");
  }
  double total = 0.0;
  for (const GenerationRecord& r : records) total += BertScoreF1(r);
  return total / static_cast<double>(records.size());
}

MetricReport Evaluate(const std::vector<GenerationRecord>& records,
                      const MarkerLexicon& lex) {
  MetricReport report;
  report.frequency = MarkerFrequency(records, lex);
  report.diversity = MarkerDiversity(records, lex);
  report.bleu = Bleu(records);
  try {
    report.weighted_perplexity = WeightedPerplexity(records);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoMarkerTokens) throw;
  }
  const bool have_vectors = std::all_of(
      records.begin(), records.end(), [](const GenerationRecord& r) {
        return r.candidate_vectors && r.reference_vectors;
      });
  if (have_vectors) report.bertscore_f1 = BertScoreF1(records);
  return report;
}

std::vector<RecordMetrics> EvaluatePerRecord(
    const std::vector<GenerationRecord>& records, const MarkerLexicon& lex) {
  std::vector<RecordMetrics> out;
  out.reserve(records.size());
  for (const GenerationRecord& r : records) {
    CheckLanguage(r, lex);
    RecordMetrics m;
    m.units = Units(r.generated, r.language).size();
    const auto spans = FindSpansInText(r.generated, lex);
    m.markers = spans.size();
    for (const MarkerSpan& s : spans) m.marker_units += MarkerUnits(s, r.language);
    m.bleu = Bleu({r});
    if (r.candidate_vectors && r.reference_vectors) m.bertscore_f1 = BertScoreF1(r);
    if (r.marker_logprobs && !r.marker_logprobs->empty()) {
      double sum = 0.0;
      for (const MarkerLogprob& lp : *r.marker_logprobs) sum += lp.logprob;
      m.logprob_count = r.marker_logprobs->size();
      m.mean_logprob = sum / static_cast<double>(m.logprob_count);
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace bcprobe
