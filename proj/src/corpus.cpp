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

#include "bcprobe/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>

#include "bcprobe/error.hpp"
#include "bcprobe/rng.hpp"

namespace bcprobe {

namespace {

using nlohmann::json;

[[noreturn]] void Malformed(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kMalformedRecord,
              "line " + std::to_string(line_no) + ": " + what);
}

Speaker ParseSpeaker(const std::string& s, std::size_t line_no) {
  if (s == "s1") return Speaker::kS1;
  if (s == "s2") return Speaker::kS2;
  if (s.size() >= 2 && s[0] == 's' &&
      std::all_of(s.begin() + 1, s.end(), [](char c) {
        return c >= '0' && c <= '9';
      })) {
    throw Error(ErrorCode::kMoreThanTwoSpeakers,
                "line " + std::to_string(line_no) + ": speaker '" + s +
                    "' exceeds the two-party limit");
  }
  Malformed(line_no, "unknown speaker '" + s + "'");
}

}  // namespace

std::string_view SpeakerName(Speaker s) {
  return s == Speaker::kS1 ? "s1" : "s2";
}

std::string_view SpeakerToken(Speaker s) {
  return s == Speaker::kS1 ? "<s1>" : "<s2>";
}

bool Dialogue::IsMonologue() const {
  return std::none_of(utterances.begin(), utterances.end(),
                      [&](const Utterance& u) {
                        return u.speaker != utterances.front().speaker;
                      });
}

std::vector<Token> Tokenize(std::string_view utf8, Language lang) {
  const std::u32string cps = text::Decode(utf8);
  std::vector<Token> out;
  bool saw_space = false;
  auto emit = [&](std::size_t b, std::size_t e) {
    out.push_back({text::Encode(std::u32string_view(cps).substr(b, e - b)), b,
                   e, saw_space && !out.empty()});
    saw_space = false;
  };

  if (lang == Language::kJa) {
    for (std::size_t i = 0; i < cps.size(); ++i) {
      if (text::IsSpace(cps[i])) {
        saw_space = true;
        continue;
      }
      emit(i, i + 1);
    }
    return out;
  }

  std::size_t i = 0;
  while (i < cps.size()) {
    if (text::IsSpace(cps[i])) {
      saw_space = true;
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < cps.size() && !text::IsSpace(cps[end])) ++end;
    std::size_t core_b = i;
    std::size_t core_e = end;
    while (core_b < core_e && text::IsPunct(cps[core_b])) ++core_b;
    while (core_e > core_b && text::IsPunct(cps[core_e - 1])) --core_e;
    for (std::size_t p = i; p < core_b; ++p) emit(p, p + 1);
    if (core_b < core_e) emit(core_b, core_e);
    for (std::size_t p = core_e; p < end; ++p) {
      if (p >= core_b) emit(p, p + 1);
    }
    i = end;
  }
  return out;
}

std::string Detokenize(const std::vector<std::string>& tokens,
                       const std::vector<bool>& space_before) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0 && space_before[i]) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::vector<Dialogue> ParseCorpus(std::istream& in, Language lang) {
  std::vector<Dialogue> dialogues;
  std::map<std::string, std::size_t> index;
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
    if (!rec.is_object()) Malformed(line_no, "record is not an object");
    for (const char* key : {"dialogue_id", "turn_index", "speaker", "text"}) {
      if (!rec.contains(key)) Malformed(line_no, std::string("missing ") + key);
    }
    if (!rec["dialogue_id"].is_string() || !rec["speaker"].is_string() ||
        !rec["text"].is_string() || !rec["turn_index"].is_number_integer()) {
      Malformed(line_no, "field has wrong type");
    }
    Utterance u;
    u.dialogue_id = rec["dialogue_id"].get<std::string>();
    u.turn_index = rec["turn_index"].get<std::int64_t>();
    if (u.turn_index < 0) Malformed(line_no, "negative turn_index");
    u.speaker = ParseSpeaker(rec["speaker"].get<std::string>(), line_no);
    try {
      u.text = text::Canonicalize(rec["text"].get<std::string>());
    } catch (const Error& e) {
      Malformed(line_no, e.what());
    }
    if (u.text.empty()) Malformed(line_no, "empty text");

    auto [it, inserted] = index.try_emplace(u.dialogue_id, dialogues.size());
    if (inserted) dialogues.push_back({u.dialogue_id, lang, {}});
    Dialogue& d = dialogues[it->second];
    if (!d.utterances.empty() && u.turn_index <= d.utterances.back().turn_index) {
      throw Error(ErrorCode::kNonMonotoneTurnIndex,
                  "dialogue '" + d.id + "': turn_index " +
                      std::to_string(u.turn_index) + " at line " +
                      std::to_string(line_no) + " does not follow " +
                      std::to_string(d.utterances.back().turn_index));
    }
    d.utterances.push_back(std::move(u));
  }
  return dialogues;
}

void SerializeCorpus(const std::vector<Dialogue>& dialogues,
                     std::ostream& out) {
  for (const Dialogue& d : dialogues) {
    for (const Utterance& u : d.utterances) {
      nlohmann::ordered_json rec;
      rec["dialogue_id"] = u.dialogue_id;
      rec["turn_index"] = u.turn_index;
      rec["speaker"] = SpeakerName(u.speaker);
      rec["text"] = u.text;
      out << rec.dump() << '\n';
    }
  }
}

void AppendUtterance(const Utterance& u, Language lang, MergedSequence& seq) {
  // EN renders as "<s1> did you ... <s2> uh-huh"; JA stays unspaced.
  const bool spaced = lang == Language::kEn;
  seq.space_before.push_back(spaced && !seq.tokens.empty());
  seq.tokens.emplace_back(SpeakerToken(u.speaker));
  SourceSpan span;
  span.token_begin = seq.tokens.size();
  span.turn_index = u.turn_index;
  span.speaker = u.speaker;
  bool first = true;
  for (Token& t : Tokenize(u.text, lang)) {
    seq.tokens.push_back(std::move(t.text));
    seq.space_before.push_back(first ? spaced : t.space_before);
    first = false;
  }
  span.token_end = seq.tokens.size();
  seq.source_spans.push_back(span);
}

MergedSequence MergeDialogue(const Dialogue& d) {
  MergedSequence seq;
  seq.dialogue_id = d.id;
  for (const Utterance& u : d.utterances) AppendUtterance(u, d.language, seq);
  return seq;
}

std::vector<std::string> UnmergeTexts(const MergedSequence& seq) {
  std::vector<std::string> texts;
  texts.reserve(seq.source_spans.size());
  for (const SourceSpan& s : seq.source_spans) {
    std::vector<std::string> toks(seq.tokens.begin() + s.token_begin,
                                  seq.tokens.begin() + s.token_end);
    std::vector<bool> spaces(seq.space_before.begin() + s.token_begin,
                             seq.space_before.begin() + s.token_end);
    texts.push_back(Detokenize(toks, spaces));
  }
  return texts;
}

CorpusSplit SplitCorpus(const std::vector<Dialogue>& dialogues,
                        double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidFraction,
                "train_fraction must lie in (0, 1), got " +
                    std::to_string(train_fraction));
  }
  if (dialogues.empty()) {
    throw Error(ErrorCode::kInvalidFraction, "cannot split an empty corpus");
  }
  const std::size_t n = dialogues.size();
  const auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(n)));

  // Fisher-Yates over indices, drawing j in [0, i].
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  CounterRng rng = CounterRng::Substream(seed, "split");
  for (std::size_t i = n; i-- > 1;) {
    std::swap(order[i], order[rng.NextBelow(i + 1)]);
  }
  std::vector<bool> in_train(n, false);
  for (std::size_t i = 0; i < n_train; ++i) in_train[order[i]] = true;

  CorpusSplit split;
  for (std::size_t i = 0; i < n; ++i) {
    (in_train[i] ? split.train : split.eval).push_back(dialogues[i]);
  }
  return split;
}

}  // namespace bcprobe
