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

#include "bcprobe/datasetgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>

#include "bcprobe/error.hpp"
#include "bcprobe/rng.hpp"

namespace bcprobe {

namespace {

using ojson = nlohmann::ordered_json;

// Token range of [char_start, char_end) within one utterance's tokens.
std::pair<std::size_t, std::size_t> CoveringTokens(
    const std::vector<Token>& tokens, const MarkerSpan& s) {
  std::size_t b = 0;
  while (b < tokens.size() && tokens[b].char_end <= s.char_start) ++b;
  std::size_t e = b;
  while (e < tokens.size() && tokens[e].char_begin < s.char_end) ++e;
  return {b, e};
}

}  // namespace

void MaskingPolicy::Validate() const {
  if (p_mask < 0 || p_random < 0 || p_keep < 0 ||
      std::abs(p_mask + p_random + p_keep - 1.0) > 1e-12) {
    throw Error(ErrorCode::kInvalidPolicy,
                "masking probabilities must be non-negative and sum to 1");
  }
}

std::string_view MaskOpName(MaskOp op) {
  switch (op) {
    case MaskOp::kMask:
      return "mask";
    case MaskOp::kRandom:
      return "random";
    case MaskOp::kKeep:
      return "keep";
  }
  return "keep";
}

std::string_view ContextName(ContextSetting c) {
  switch (c) {
    case ContextSetting::kNone:
      return "none";
    case ContextSetting::kOne:
      return "one";
    case ContextSetting::kFull:
      return "full";
  }
  return "none";
}

ContextSetting ParseContext(std::string_view name) {
  if (name == "none") return ContextSetting::kNone;
  if (name == "one") return ContextSetting::kOne;
  if (name == "full") return ContextSetting::kFull;
  throw Error(ErrorCode::kInvalidConfig,
              "unknown context setting '" + std::string(name) + "'");
}

std::vector<MaskedSpan> SpanTokenRanges(const AnnotatedDialogue& ad) {
  std::vector<MaskedSpan> out;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < ad.dialogue.utterances.size(); ++i) {
    const Utterance& u = ad.dialogue.utterances[i];
    const std::vector<Token> tokens = Tokenize(u.text, ad.dialogue.language);
    offset += 1;  // speaker token
    for (const MarkerSpan& s : ad.spans[i]) {
      auto [b, e] = CoveringTokens(tokens, s);
      if (b == e) continue;
      MaskedSpan ms{offset + b, offset + e, s.canonical, MaskOp::kKeep};
      if (!out.empty() && ms.token_begin < out.back().token_end) continue;
      out.push_back(std::move(ms));
    }
    offset += tokens.size();
  }
  return out;
}

std::vector<std::string> DefaultRandomPool(const AnnotatedCorpus& corpus,
                                           std::size_t size) {
  std::map<std::string, std::size_t> counts;
  for (const AnnotatedDialogue& ad : corpus.dialogues) {
    for (std::size_t i = 0; i < ad.dialogue.utterances.size(); ++i) {
      const std::vector<Token> tokens =
          Tokenize(ad.dialogue.utterances[i].text, ad.dialogue.language);
      for (const Token& t : tokens) {
        const bool in_span = std::any_of(
            ad.spans[i].begin(), ad.spans[i].end(), [&](const MarkerSpan& s) {
              return t.char_begin < s.char_end && s.char_start < t.char_end;
            });
        if (!in_span) ++counts[t.text];
      }
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(),
                                                          counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> pool;
  for (std::size_t i = 0; i < ranked.size() && i < size; ++i) {
    pool.push_back(ranked[i].first);
  }
  return pool;
}

std::vector<MaskedExample> BuildMaskingDataset(const AnnotatedCorpus& corpus,
                                               const MaskingPolicy& policy,
                                               std::uint64_t seed) {
  policy.Validate();
  if (policy.p_random > 0 && policy.random_pool.empty()) {
    throw Error(ErrorCode::kEmptyRandomPool,
                "p_random > 0 but the random token pool is empty");
  }
  const auto n = static_cast<std::int64_t>(corpus.dialogues.size());
  std::vector<MaskedExample> examples(corpus.dialogues.size());

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t di = 0; di < n; ++di) {
    const AnnotatedDialogue& ad = corpus.dialogues[di];
    const MergedSequence merged = MergeDialogue(ad.dialogue);
    MaskedExample& ex = examples[di];
    ex.dialogue_id = ad.dialogue.id;
    ex.input_tokens = merged.tokens;
    ex.label_tokens.assign(merged.tokens.size(), std::nullopt);
    ex.spans = SpanTokenRanges(ad);

    CounterRng rng = CounterRng::Substream(seed, ad.dialogue.id);
    for (MaskedSpan& s : ex.spans) {
      const double u = rng.NextDouble();
      if (u < policy.p_mask) {
        s.op = MaskOp::kMask;
      } else if (u < policy.p_mask + policy.p_random) {
        s.op = MaskOp::kRandom;
      } else {
        s.op = MaskOp::kKeep;
      }
      for (std::size_t t = s.token_begin; t < s.token_end; ++t) {
        ex.label_tokens[t] = merged.tokens[t];
        if (s.op == MaskOp::kMask) {
          ex.input_tokens[t] = policy.mask_token;
        } else if (s.op == MaskOp::kRandom) {
          ex.input_tokens[t] =
              policy.random_pool[rng.NextBelow(policy.random_pool.size())];
        }
      }
    }
  }
  return examples;
}

std::vector<MergedSequence> BuildNtpDataset(const AnnotatedCorpus& corpus) {
  std::vector<MergedSequence> out;
  out.reserve(corpus.dialogues.size());
  for (const AnnotatedDialogue& ad : corpus.dialogues) {
    out.push_back(MergeDialogue(ad.dialogue));
  }
  return out;
}

std::vector<TurnLabeledSequence> BuildTtpDataset(const AnnotatedCorpus& corpus) {
  std::vector<TurnLabeledSequence> out;
  out.reserve(corpus.dialogues.size());
  for (const AnnotatedDialogue& ad : corpus.dialogues) {
    const auto& utts = ad.dialogue.utterances;
    TurnLabeledSequence seq;
    seq.dialogue_id = ad.dialogue.id;
    for (std::size_t i = 0; i < utts.size(); ++i) {
      for (Token& t : Tokenize(utts[i].text, ad.dialogue.language)) {
        seq.tokens.push_back(std::move(t.text));
      }
      const bool last = i + 1 == utts.size();
      if ((last || utts[i + 1].speaker != utts[i].speaker) &&
          !seq.tokens.empty()) {
        seq.shift_after.push_back(seq.tokens.size() - 1);
      }
    }
    out.push_back(std::move(seq));
  }
  return out;
}

ContextWindow ExtractContext(const AnnotatedCorpus& corpus,
                             const MarkerSpan& span, ContextSetting setting) {
  for (const AnnotatedDialogue& ad : corpus.dialogues) {
    if (ad.dialogue.id != span.dialogue_id) continue;
    const auto& utts = ad.dialogue.utterances;
    for (std::size_t i = 0; i < utts.size(); ++i) {
      if (utts[i].turn_index != span.turn_index) continue;
      const auto& row = ad.spans[i];
      if (std::find(row.begin(), row.end(), span) == row.end()) break;

      std::size_t first = i;
      std::size_t last = i + 1;
      if (setting == ContextSetting::kOne) {
        first = i > 0 ? i - 1 : 0;
        last = std::min(i + 2, utts.size());
      } else if (setting == ContextSetting::kFull) {
        first = 0;
      }
      ContextWindow w;
      w.dialogue_id = ad.dialogue.id;
      w.setting = setting;
      w.utterances.assign(utts.begin() + first, utts.begin() + last);
      w.span_utterance = i - first;
      w.merged.dialogue_id = ad.dialogue.id;
      for (const Utterance& u : w.utterances) {
        AppendUtterance(u, ad.dialogue.language, w.merged);
      }
      const std::vector<Token> tokens = Tokenize(utts[i].text, ad.dialogue.language);
      auto [b, e] = CoveringTokens(tokens, span);
      const std::size_t base = w.merged.source_spans[w.span_utterance].token_begin;
      w.span_token_begin = base + b;
      w.span_token_end = base + e;
      return w;
    }
    break;
  }
  throw Error(ErrorCode::kSpanNotFound,
              "no span at dialogue '" + span.dialogue_id + "' turn " +
                  std::to_string(span.turn_index) + " chars " +
                  std::to_string(span.char_start) + ".." +
                  std::to_string(span.char_end));
}

void WriteMaskDataset(const std::vector<MaskedExample>& examples,
                      std::ostream& out) {
  for (const MaskedExample& ex : examples) {
    ojson rec;
    rec["dialogue_id"] = ex.dialogue_id;
    rec["input_tokens"] = ex.input_tokens;
    auto labels = ojson::array();
    for (const auto& l : ex.label_tokens) {
      labels.push_back(l ? ojson(*l) : ojson(nullptr));
    }
    rec["labels"] = std::move(labels);
    auto spans = ojson::array();
    for (const MaskedSpan& s : ex.spans) {
      ojson js;
      js["begin"] = s.token_begin;
      js["end"] = s.token_end;
      js["canonical"] = s.canonical;
      js["op"] = MaskOpName(s.op);
      spans.push_back(std::move(js));
    }
    rec["spans"] = std::move(spans);
    out << rec.dump() << '\n';
  }
}

void WriteNtpDataset(const std::vector<MergedSequence>& sequences,
                     std::ostream& out) {
  for (const MergedSequence& seq : sequences) {
    ojson rec;
    rec["dialogue_id"] = seq.dialogue_id;
    rec["tokens"] = seq.tokens;
    out << rec.dump() << '\n';
  }
}

void WriteTtpDataset(const std::vector<TurnLabeledSequence>& sequences,
                     std::ostream& out) {
  for (const TurnLabeledSequence& seq : sequences) {
    ojson rec;
    rec["dialogue_id"] = seq.dialogue_id;
    rec["tokens"] = seq.tokens;
    rec["shift_after"] = seq.shift_after;
    out << rec.dump() << '\n';
  }
}

void WriteContexts(const AnnotatedCorpus& corpus, ContextSetting setting,
                   std::ostream& out) {
  for (const AnnotatedDialogue& ad : corpus.dialogues) {
    for (const auto& row : ad.spans) {
      for (const MarkerSpan& s : row) {
        const ContextWindow w = ExtractContext(corpus, s, setting);
        ojson rec;
        rec["canonical"] = s.canonical;
        rec["dialogue_id"] = s.dialogue_id;
        rec["turn_index"] = s.turn_index;
        rec["char_start"] = s.char_start;
        rec["char_end"] = s.char_end;
        rec["context"] = ContextName(setting);
        rec["text"] = Detokenize(w.merged.tokens, w.merged.space_before);
        rec["tokens"] = w.merged.tokens;
        rec["span_begin"] = w.span_token_begin;
        rec["span_end"] = w.span_token_end;
        out << rec.dump() << '\n';
      }
    }
  }
}

}  // namespace bcprobe
