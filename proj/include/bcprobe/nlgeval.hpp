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

// Evaluation metrics for generated continuations: marker frequency and
// diversity, marker perplexity, BLEU and greedy-matching BERTScore.

#ifndef BCPROBE_NLGEVAL_HPP_
#define BCPROBE_NLGEVAL_HPP_

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bcprobe/embeddings.hpp"
#include "bcprobe/lexicon.hpp"

namespace bcprobe {

struct MarkerLogprob {
  std::string surface;
  std::string canonical;
  double logprob = 0.0;  // finite, <= 0
};

struct GenerationRecord {
  std::string context;
  std::string generated;
  std::string reference;
  Language language = Language::kEn;
  std::optional<std::vector<MarkerLogprob>> marker_logprobs;
  std::optional<std::vector<Vector>> candidate_vectors;
  std::optional<std::vector<Vector>> reference_vectors;
};

std::vector<GenerationRecord> ReadGenerations(std::istream& in);
void WriteGenerations(const std::vector<GenerationRecord>& records,
                      std::ostream& out);

// EN: marker words / whitespace-separated words. JA: characters inside
// marker spans / non-whitespace characters (punctuation included). Throws
// kEmptyGenerationSet on an empty record list.
double MarkerFrequency(const std::vector<GenerationRecord>& records,
                       const MarkerLexicon& lex);

// Distinct canonical forms found in the generated texts.
int MarkerDiversity(const std::vector<GenerationRecord>& records,
                    const MarkerLexicon& lex);

// exp(-mean log p) over every marker occurrence. Throws kNoMarkerTokens.
double WeightedPerplexity(const std::vector<GenerationRecord>& records);

// Corpus BLEU, orders 1..4 with uniform weights, clipped counts, brevity
// penalty exp(1 - r/c) when c < r. A zero clipped count is floored at
// kBleuEpsilon. Orders for which the candidates have no n-grams at all are
// left out of the geometric mean. Units: EN words, JA characters. Throws
// kEmptyPair.
inline constexpr double kBleuEpsilon = 1e-9;
double Bleu(const std::vector<GenerationRecord>& records);

// Greedy cosine matching per pair, mean F1 over pairs. No idf weighting or
// baseline rescaling. F1 is 0 when P * R <= 0. Throws kMissingVectors.
double BertScoreF1(const GenerationRecord& record);
double BertScoreF1(const std::vector<GenerationRecord>& records);

struct MetricReport {
  int diversity = 0;
  double frequency = 0.0;
  std::optional<double> weighted_perplexity;
  std::optional<double> bertscore_f1;
  double bleu = 0.0;
};

struct RecordMetrics {
  std::size_t units = 0;         // words (EN) or characters (JA)
  std::size_t marker_units = 0;
  std::size_t markers = 0;       // spans found in the generated text
  double bleu = 0.0;
  std::optional<double> bertscore_f1;
  std::size_t logprob_count = 0;
  std::optional<double> mean_logprob;
};

// Perplexity and BERTScore are left empty when the inputs lack
// log-probabilities or vectors.
MetricReport Evaluate(const std::vector<GenerationRecord>& records,
                      const MarkerLexicon& lex);
std::vector<RecordMetrics> EvaluatePerRecord(
    const std::vector<GenerationRecord>& records, const MarkerLexicon& lex);

}  // namespace bcprobe

#endif  // BCPROBE_NLGEVAL_HPP_
