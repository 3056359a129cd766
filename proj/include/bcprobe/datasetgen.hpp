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

// Fine-tuning datasets (MASK, NTP, TTP) and context windows for embedding
// extraction.

#ifndef BCPROBE_DATASETGEN_HPP_
#define BCPROBE_DATASETGEN_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bcprobe/corpus.hpp"
#include "bcprobe/lexicon.hpp"

namespace bcprobe {

struct MaskingPolicy {
  double p_mask = 0.8;
  double p_random = 0.1;
  double p_keep = 0.1;
  std::string mask_token = "[MASK]";
  std::vector<std::string> random_pool;

  // Throws kInvalidPolicy unless all probabilities are >= 0 and sum to 1
  // within 1e-12.
  void Validate() const;
};

enum class MaskOp { kMask, kRandom, kKeep };
std::string_view MaskOpName(MaskOp op);

struct MaskedSpan {
  std::size_t token_begin = 0;  // into the merged sequence
  std::size_t token_end = 0;
  std::string canonical;
  MaskOp op = MaskOp::kKeep;

  bool operator==(const MaskedSpan&) const = default;
};

struct MaskedExample {
  std::string dialogue_id;
  std::vector<std::string> input_tokens;
  // Original token at every span position, nullopt elsewhere.
  std::vector<std::optional<std::string>> label_tokens;
  std::vector<MaskedSpan> spans;

  bool operator==(const MaskedExample&) const = default;
};

struct TurnLabeledSequence {
  std::string dialogue_id;
  std::vector<std::string> tokens;  // utterance tokens, no speaker tokens
  std::vector<std::size_t> shift_after;  // ascending

  bool operator==(const TurnLabeledSequence&) const = default;
};

enum class ContextSetting { kNone, kOne, kFull };
std::string_view ContextName(ContextSetting c);  // "none" / "one" / "full"
ContextSetting ParseContext(std::string_view name);

// Merged-sequence token ranges of every span of a dialogue, in utterance
// then offset order. A span covers every token it overlaps; a span whose
// range overlaps an earlier one is dropped.
std::vector<MaskedSpan> SpanTokenRanges(const AnnotatedDialogue& ad);

// The size most frequent tokens outside marker spans (speaker tokens
// excluded); ties broken lexicographically.
std::vector<std::string> DefaultRandomPool(const AnnotatedCorpus& corpus,
                                           std::size_t size = 1000);

// One example per dialogue. Each span gets a single draw from the
// dialogue's substream CounterRng::Substream(seed, dialogue_id).
std::vector<MaskedExample> BuildMaskingDataset(const AnnotatedCorpus& corpus,
                                               const MaskingPolicy& policy,
                                               std::uint64_t seed);

std::vector<MergedSequence> BuildNtpDataset(const AnnotatedCorpus& corpus);

// The end of the dialogue counts as a turn shift.
std::vector<TurnLabeledSequence> BuildTtpDataset(const AnnotatedCorpus& corpus);

struct ContextWindow {
  std::string dialogue_id;
  ContextSetting setting = ContextSetting::kNone;
  std::vector<Utterance> utterances;
  std::size_t span_utterance = 0;  // index into utterances
  MergedSequence merged;
  std::size_t span_token_begin = 0;  // into merged.tokens
  std::size_t span_token_end = 0;
};

// Throws kSpanNotFound if the span is not one of the corpus' spans.
ContextWindow ExtractContext(const AnnotatedCorpus& corpus,
                             const MarkerSpan& span, ContextSetting setting);

void WriteMaskDataset(const std::vector<MaskedExample>& examples,
                      std::ostream& out);
void WriteNtpDataset(const std::vector<MergedSequence>& sequences,
                     std::ostream& out);
void WriteTtpDataset(const std::vector<TurnLabeledSequence>& sequences,
                     std::ostream& out);
// One record per span: identifying fields plus the window's tokens and the
// span's token range within them.
void WriteContexts(const AnnotatedCorpus& corpus, ContextSetting setting,
                   std::ostream& out);

}  // namespace bcprobe

#endif  // BCPROBE_DATASETGEN_HPP_
