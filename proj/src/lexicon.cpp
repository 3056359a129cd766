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

#include "bcprobe/lexicon.hpp"

#include <algorithm>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "bcprobe/error.hpp"

namespace bcprobe {

namespace detail {
extern const char* const kBuiltinLexiconEn;
extern const char* const kBuiltinLexiconJa;
}  // namespace detail

namespace {

using nlohmann::json;

constexpr std::string_view kOpenTag = "<ds>";
constexpr std::string_view kCloseTag = "</ds>";

struct Candidate {
  std::size_t begin;
  std::size_t end;
  std::size_t entry;
};

bool OnlySpacesOrCommas(const std::u32string& cps, std::size_t b,
                        std::size_t e) {
  for (std::size_t i = b; i < e; ++i) {
    if (!text::IsSpace(cps[i]) && !text::IsComma(cps[i])) return false;
  }
  return true;
}

}  // namespace

MarkerLexicon::MarkerLexicon(Language language, std::vector<MarkerEntry> entries)
    : language_(language), entries_(std::move(entries)) {
  std::map<std::u32string, std::string> owner;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    MarkerEntry& e = entries_[i];
    if (e.language != language_) {
      throw Error(ErrorCode::kLanguageMismatch,
                  "entry '" + e.canonical + "' has language " +
                      std::string(LanguageName(e.language)));
    }
    if (e.canonical.empty()) {
      throw Error(ErrorCode::kEmptyEntry, "entry with empty canonical form");
    }
    if (std::find(e.variants.begin(), e.variants.end(), e.canonical) ==
        e.variants.end()) {
      e.variants.insert(e.variants.begin(), e.canonical);
    }
    for (const std::string& v : e.variants) {
      if (v.empty()) {
        throw Error(ErrorCode::kEmptyEntry,
                    "entry '" + e.canonical + "' has an empty variant");
      }
      std::u32string key = text::Decode(v);
      if (language_ == Language::kEn) key = text::FoldCase(key);
      auto [it, inserted] = owner.emplace(key, e.canonical);
      if (!inserted) {
        throw Error(ErrorCode::kDuplicateVariant,
                    "variant '" + v + "' appears in entries '" + it->second +
                        "' and '" + e.canonical + "'");
      }
      patterns_.push_back({std::move(key), i});
    }
  }
}

MarkerLexicon LoadLexicon(std::istream& in, Language fallback) {
  std::vector<MarkerEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "lexicon line " + std::to_string(line_no);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kMalformedRecord, where + ": " + e.what());
    }
    try {
      MarkerEntry e;
      e.canonical = rec.at("canonical").get<std::string>();
      e.variants = rec.at("variants").get<std::vector<std::string>>();
      e.ambiguous = rec.value("ambiguous", false);
      e.language = ParseLanguage(rec.at("language").get<std::string>());
      if (e.variants.empty()) {
        throw Error(ErrorCode::kEmptyEntry, where + ": no variants");
      }
      entries.push_back(std::move(e));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedRecord, where + ": " + e.what());
    }
  }
  const Language lang = entries.empty() ? fallback : entries.front().language;
  return MarkerLexicon(lang, std::move(entries));
}

void WriteLexicon(const MarkerLexicon& lex, std::ostream& out) {
  for (const MarkerEntry& e : lex.entries()) {
    nlohmann::ordered_json rec;
    rec["canonical"] = e.canonical;
    rec["variants"] = e.variants;
    rec["ambiguous"] = e.ambiguous;
    rec["language"] = LanguageName(e.language);
    out << rec.dump() << '\n';
  }
}

const MarkerLexicon& BuiltinLexicon(Language lang) {
  static const MarkerLexicon en = [] {
    std::istringstream in(detail::kBuiltinLexiconEn);
    return LoadLexicon(in, Language::kEn);
  }();
  static const MarkerLexicon ja = [] {
    std::istringstream in(detail::kBuiltinLexiconJa);
    return LoadLexicon(in, Language::kJa);
  }();
  return lang == Language::kEn ? en : ja;
}

std::vector<MarkerSpan> FindSpansInText(std::string_view utf8,
                                        const MarkerLexicon& lex) {
  const std::u32string cps = text::Decode(utf8);
  const bool en = lex.language() == Language::kEn;
  const std::u32string hay = en ? text::FoldCase(cps) : cps;

  std::vector<Candidate> cands;
  for (const auto& p : lex.patterns()) {
    for (std::size_t pos = hay.find(p.folded); pos != std::u32string::npos;
         pos = hay.find(p.folded, pos + 1)) {
      const std::size_t end = pos + p.folded.size();
      if (en) {
        const bool left_ok = pos == 0 || !text::IsAlnum(cps[pos - 1]);
        const bool right_ok = end == cps.size() || !text::IsAlnum(cps[end]);
        if (!left_ok || !right_ok) continue;
      }
      cands.push_back({pos, end, p.entry});
    }
  }

  // Longest first, then leftmost. (length, begin) is unique per candidate
  // because variants are unique, so entry order never matters.
  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) {
              const std::size_t la = a.end - a.begin;
              const std::size_t lb = b.end - b.begin;
              if (la != lb) return la > lb;
              return a.begin < b.begin;
            });
  std::vector<Candidate> chosen;
  for (const Candidate& c : cands) {
    const bool overlaps =
        std::any_of(chosen.begin(), chosen.end(), [&](const Candidate& o) {
          return c.begin < o.end && o.begin < c.end;
        });
    if (!overlaps) chosen.push_back(c);
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const Candidate& a, const Candidate& b) {
              return a.begin < b.begin;
            });

  std::size_t first_word = 0;
  while (first_word < cps.size() && text::IsSpace(cps[first_word])) {
    ++first_word;
  }
  std::vector<bool> keep(chosen.size(), false);
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    const Candidate& c = chosen[i];
    if (!lex.entries()[c.entry].ambiguous) {
      keep[i] = true;
    } else if (c.begin == first_word && c.end < cps.size() &&
               text::IsComma(cps[c.end])) {
      keep[i] = true;
    }
  }
  // Adjacency can chain ("okay, right, yeah"), so iterate to a fixed point.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      if (keep[i]) continue;
      const bool left = i > 0 && keep[i - 1] &&
                        OnlySpacesOrCommas(cps, chosen[i - 1].end, chosen[i].begin);
      const bool right = i + 1 < chosen.size() && keep[i + 1] &&
                         OnlySpacesOrCommas(cps, chosen[i].end, chosen[i + 1].begin);
      if (left || right) {
        keep[i] = true;
        changed = true;
      }
    }
  }

  std::vector<MarkerSpan> spans;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    if (!keep[i]) continue;
    const Candidate& c = chosen[i];
    MarkerSpan s;
    s.char_start = c.begin;
    s.char_end = c.end;
    s.canonical = lex.entries()[c.entry].canonical;
    s.matched_variant =
        text::Encode(std::u32string_view(cps).substr(c.begin, c.end - c.begin));
    spans.push_back(std::move(s));
  }
  return spans;
}

std::vector<MarkerSpan> FindSpans(const Utterance& u, Language lang,
                                  const MarkerLexicon& lex) {
  if (lang != lex.language()) {
    throw Error(ErrorCode::kLanguageMismatch,
                "utterance language " + std::string(LanguageName(lang)) +
                    " does not match lexicon language " +
                    std::string(LanguageName(lex.language())));
  }
  std::vector<MarkerSpan> spans = FindSpansInText(u.text, lex);
  for (MarkerSpan& s : spans) {
    s.dialogue_id = u.dialogue_id;
    s.turn_index = u.turn_index;
  }
  return spans;
}

std::size_t AnnotatedCorpus::SpanCount() const {
  std::size_t n = 0;
  for (const auto& d : dialogues) {
    for (const auto& s : d.spans) n += s.size();
  }
  return n;
}

std::string TagText(std::string_view utf8, const std::vector<MarkerSpan>& spans) {
  const std::u32string cps = text::Decode(utf8);
  std::string out;
  std::size_t pos = 0;
  for (const MarkerSpan& s : spans) {
    out += text::Encode(std::u32string_view(cps).substr(pos, s.char_start - pos));
    out += kOpenTag;
    out += text::Encode(
        std::u32string_view(cps).substr(s.char_start, s.char_end - s.char_start));
    out += kCloseTag;
    pos = s.char_end;
  }
  out += text::Encode(std::u32string_view(cps).substr(pos));
  return out;
}

std::string StripTags(std::string_view tagged) {
  std::string out;
  std::size_t i = 0;
  while (i < tagged.size()) {
    if (tagged.substr(i, kOpenTag.size()) == kOpenTag) {
      i += kOpenTag.size();
    } else if (tagged.substr(i, kCloseTag.size()) == kCloseTag) {
      i += kCloseTag.size();
    } else {
      out.push_back(tagged[i++]);
    }
  }
  return out;
}

AnnotatedCorpus AnnotateCorpus(const std::vector<Dialogue>& dialogues,
                               const MarkerLexicon& lex) {
  AnnotatedCorpus corpus;
  corpus.language = lex.language();
  corpus.dialogues.resize(dialogues.size());
  for (std::size_t i = 0; i < dialogues.size(); ++i) {
    AnnotatedDialogue& ad = corpus.dialogues[i];
    ad.dialogue = dialogues[i];
    for (const Utterance& u : ad.dialogue.utterances) {
      ad.spans.push_back(FindSpans(u, ad.dialogue.language, lex));
      ad.tagged.push_back(TagText(u.text, ad.spans.back()));
    }
  }
  return corpus;
}

void WriteAnnotated(const AnnotatedCorpus& corpus, std::ostream& out) {
  for (const AnnotatedDialogue& ad : corpus.dialogues) {
    for (std::size_t i = 0; i < ad.dialogue.utterances.size(); ++i) {
      const Utterance& u = ad.dialogue.utterances[i];
      nlohmann::ordered_json rec;
      rec["dialogue_id"] = u.dialogue_id;
      rec["turn_index"] = u.turn_index;
      rec["speaker"] = SpeakerName(u.speaker);
      rec["text"] = u.text;
      rec["tagged"] = ad.tagged[i];
      auto spans = nlohmann::ordered_json::array();
      for (const MarkerSpan& s : ad.spans[i]) {
        nlohmann::ordered_json js;
        js["char_start"] = s.char_start;
        js["char_end"] = s.char_end;
        js["canonical"] = s.canonical;
        js["matched_variant"] = s.matched_variant;
        spans.push_back(std::move(js));
      }
      rec["spans"] = std::move(spans);
      out << rec.dump() << '\n';
    }
  }
}

AnnotatedCorpus ReadAnnotated(std::istream& in, Language lang) {
  // Corpus fields go through ParseCorpus so the same validation applies;
  // spans are keyed by (dialogue_id, turn_index) and re-attached.
  std::stringstream corpus_lines;
  std::map<std::pair<std::string, std::int64_t>, std::vector<MarkerSpan>> by_key;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    corpus_lines << line << '\n';
    try {
      const json rec = json::parse(line);
      const auto id = rec.at("dialogue_id").get<std::string>();
      const auto turn = rec.at("turn_index").get<std::int64_t>();
      auto& row = by_key[{id, turn}];
      for (const json& js : rec.value("spans", json::array())) {
        MarkerSpan s;
        s.dialogue_id = id;
        s.turn_index = turn;
        s.char_start = js.at("char_start").get<std::size_t>();
        s.char_end = js.at("char_end").get<std::size_t>();
        s.canonical = js.at("canonical").get<std::string>();
        s.matched_variant = js.at("matched_variant").get<std::string>();
        row.push_back(std::move(s));
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedRecord,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
  }

  AnnotatedCorpus corpus;
  corpus.language = lang;
  for (Dialogue& d : ParseCorpus(corpus_lines, lang)) {
    AnnotatedDialogue ad;
    for (const Utterance& u : d.utterances) {
      std::vector<MarkerSpan> row = std::move(by_key[{u.dialogue_id, u.turn_index}]);
      const std::u32string cps = text::Decode(u.text);
      for (const MarkerSpan& s : row) {
        if (s.char_start >= s.char_end || s.char_end > cps.size() ||
            text::Encode(std::u32string_view(cps).substr(
                s.char_start, s.char_end - s.char_start)) != s.matched_variant) {
          throw Error(ErrorCode::kMalformedRecord,
                      "span does not match text in dialogue '" +
                          u.dialogue_id + "' turn " +
                          std::to_string(u.turn_index));
        }
      }
      ad.tagged.push_back(TagText(u.text, row));
      ad.spans.push_back(std::move(row));
    }
    ad.dialogue = std::move(d);
    corpus.dialogues.push_back(std::move(ad));
  }
  return corpus;
}

std::vector<MarkerStat> MarkerStats(const AnnotatedCorpus& corpus) {
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& ad : corpus.dialogues) {
    for (const auto& row : ad.spans) {
      for (const MarkerSpan& s : row) {
        ++counts[s.canonical];
        ++total;
      }
    }
  }
  std::vector<MarkerStat> stats;
  for (const auto& [canonical, count] : counts) {
    stats.push_back({canonical, count,
                     static_cast<double>(count) / static_cast<double>(total)});
  }
  std::stable_sort(stats.begin(), stats.end(),
                   [](const MarkerStat& a, const MarkerStat& b) {
                     return a.count > b.count;
                   });
  return stats;
}

}  // namespace bcprobe
