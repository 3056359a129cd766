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

// Two-party dialogue corpora: ingestion, speaker-merged sequences and
// dialogue-level train/eval splitting.

#ifndef BCPROBE_CORPUS_HPP_
#define BCPROBE_CORPUS_HPP_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "bcprobe/text.hpp"

namespace bcprobe {

enum class Speaker { kS1, kS2 };

std::string_view SpeakerName(Speaker s);   // "s1" / "s2"
std::string_view SpeakerToken(Speaker s);  // "<s1>" / "<s2>"

struct Utterance {
  std::string dialogue_id;
  std::int64_t turn_index = 0;
  Speaker speaker = Speaker::kS1;
  std::string text;  // canonical whitespace, never empty

  bool operator==(const Utterance&) const = default;
};

struct Dialogue {
  std::string id;
  Language language = Language::kEn;
  std::vector<Utterance> utterances;

  // Only one speaker present. Such fragments are kept, not rejected.
  bool IsMonologue() const;

  bool operator==(const Dialogue&) const = default;
};

// A surface token of one utterance. Offsets are code points into the
// utterance text; space_before records whether a single space separated it
// from the previous token of the same utterance.
struct Token {
  std::string text;
  std::size_t char_begin = 0;
  std::size_t char_end = 0;
  bool space_before = false;
};

// EN: whitespace split, with leading/trailing punctuation peeled off into
// one-character tokens ("inbox?" -> "inbox", "?"). JA: one token per
// non-space code point.
std::vector<Token> Tokenize(std::string_view text, Language lang);

// Inverse of Tokenize on canonical text.
std::string Detokenize(const std::vector<std::string>& tokens,
                       const std::vector<bool>& space_before);

struct SourceSpan {
  std::size_t token_begin = 0;  // first utterance token (after speaker token)
  std::size_t token_end = 0;    // exclusive
  std::int64_t turn_index = 0;
  Speaker speaker = Speaker::kS1;

  bool operator==(const SourceSpan&) const = default;
};

struct MergedSequence {
  std::string dialogue_id;
  std::vector<std::string> tokens;
  std::vector<bool> space_before;  // parallel to tokens
  std::vector<SourceSpan> source_spans;

  bool operator==(const MergedSequence&) const = default;
};

// Reads the line-delimited JSON corpus format. Blank lines are skipped.
// Dialogues keep first-appearance order; text is canonicalized.
std::vector<Dialogue> ParseCorpus(std::istream& in, Language lang);

// One JSON object per utterance, keys in the order dialogue_id, turn_index,
// speaker, text.
void SerializeCorpus(const std::vector<Dialogue>& dialogues, std::ostream& out);

MergedSequence MergeDialogue(const Dialogue& d);
// Appends one utterance (speaker token + tokens) to a merged sequence.
void AppendUtterance(const Utterance& u, Language lang, MergedSequence& seq);

// Per-utterance texts recovered from the merged tokens and source spans.
std::vector<std::string> UnmergeTexts(const MergedSequence& seq);

struct CorpusSplit {
  std::vector<Dialogue> train;
  std::vector<Dialogue> eval;
};

// Dialogue-level split. |train| = round(train_fraction * N); both halves
// keep input order.
CorpusSplit SplitCorpus(const std::vector<Dialogue>& dialogues,
                        double train_fraction, std::uint64_t seed);

}  // namespace bcprobe

#endif  // BCPROBE_CORPUS_HPP_
