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

// Backchannel/filler lexicons and boundary-aware span detection.

#ifndef BCPROBE_LEXICON_HPP_
#define BCPROBE_LEXICON_HPP_

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "bcprobe/corpus.hpp"
#include "bcprobe/text.hpp"

namespace bcprobe {

struct MarkerEntry {
  std::string canonical;
  std::vector<std::string> variants;  // includes canonical
  bool ambiguous = false;
  Language language = Language::kEn;
};

// Immutable after construction. Variants are unique across entries (EN
// compares case-folded).
class MarkerLexicon {
 public:
  // Validates and indexes the entries. Throws kEmptyEntry,
  // kDuplicateVariant or kLanguageMismatch.
  MarkerLexicon(Language language, std::vector<MarkerEntry> entries);

  Language language() const { return language_; }
  const std::vector<MarkerEntry>& entries() const { return entries_; }

  struct Pattern {
    std::u32string folded;
    std::size_t entry = 0;
  };
  const std::vector<Pattern>& patterns() const { return patterns_; }

 private:
  Language language_;
  std::vector<MarkerEntry> entries_;
  std::vector<Pattern> patterns_;
};

// Line-delimited JSON, one entry per line. The lexicon language is taken
// from the entries (all must agree); an empty stream yields an empty EN
// lexicon unless fallback says otherwise.
MarkerLexicon LoadLexicon(std::istream& in,
                          Language fallback = Language::kEn);
void WriteLexicon(const MarkerLexicon& lex, std::ostream& out);

// The bundled lexicons shipped in data/lexicon_{en,ja}.jsonl.
const MarkerLexicon& BuiltinLexicon(Language lang);

struct MarkerSpan {
  std::string dialogue_id;
  std::int64_t turn_index = 0;
  std::size_t char_start = 0;  // code points
  std::size_t char_end = 0;    // exclusive
  std::string canonical;
  std::string matched_variant;  // text[char_start, char_end) as written

  bool operator==(const MarkerSpan&) const = default;
};

// Span detection on raw text. EN matches case-insensitively and only at
// word boundaries; JA matches at any offset. Overlaps go to the longest
// candidate, then the leftmost. An ambiguous entry is kept only when it is
// the first word followed by a comma, or when only spaces and commas
// separate it from another kept span. Returned spans are sorted by offset
// and carry empty dialogue_id/turn_index.
std::vector<MarkerSpan> FindSpansInText(std::string_view text,
                                        const MarkerLexicon& lex);

// Throws kLanguageMismatch if the lexicon language differs from lang.
std::vector<MarkerSpan> FindSpans(const Utterance& u, Language lang,
                                  const MarkerLexicon& lex);

struct AnnotatedDialogue {
  Dialogue dialogue;
  std::vector<std::vector<MarkerSpan>> spans;  // per utterance
  std::vector<std::string> tagged;             // per utterance
};

struct AnnotatedCorpus {
  Language language = Language::kEn;
  std::vector<AnnotatedDialogue> dialogues;

  std::size_t SpanCount() const;
};

// Wraps every span in <ds> ... </ds>.
std::string TagText(std::string_view text, const std::vector<MarkerSpan>& spans);
std::string StripTags(std::string_view tagged);

AnnotatedCorpus AnnotateCorpus(const std::vector<Dialogue>& dialogues,
                               const MarkerLexicon& lex);

// One JSON object per utterance: the corpus fields plus "tagged" and
// "spans" (char_start, char_end, canonical, matched_variant).
void WriteAnnotated(const AnnotatedCorpus& corpus, std::ostream& out);
AnnotatedCorpus ReadAnnotated(std::istream& in, Language lang);

struct MarkerStat {
  std::string canonical;
  std::size_t count = 0;
  double share = 0.0;
};

// Sorted by count (descending), then canonical.
std::vector<MarkerStat> MarkerStats(const AnnotatedCorpus& corpus);

}  // namespace bcprobe

#endif  // BCPROBE_LEXICON_HPP_
