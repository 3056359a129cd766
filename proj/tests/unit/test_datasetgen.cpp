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

#include <doctest.h>

#include <random>
#include <sstream>

#include "bcprobe/datasetgen.hpp"
#include "bcprobe/error.hpp"
#include "oracles.hpp"

using namespace bcprobe;

namespace {

const MarkerLexicon& En() { return BuiltinLexicon(Language::kEn); }

AnnotatedCorpus Annotate(std::vector<Dialogue> ds, Language lang = Language::kEn) {
  return AnnotateCorpus(ds, BuiltinLexicon(lang));
}

Dialogue Make(const std::string& id, std::vector<std::pair<Speaker, std::string>> us) {
  Dialogue d{id, Language::kEn, {}};
  for (std::size_t i = 0; i < us.size(); ++i) {
    d.utterances.push_back({id, static_cast<std::int64_t>(i), us[i].first, us[i].second});
  }
  return d;
}

// n dialogues of four utterances, four spans each.
AnnotatedCorpus ManySpans(int n) {
  std::vector<Dialogue> ds;
  for (int i = 0; i < n; ++i) {
    ds.push_back(Make("d" + std::to_string(i),
                      {{Speaker::kS1, "uh I think the train"},
                       {Speaker::kS2, "oh yeah"},
                       {Speaker::kS1, "was late again"},
                       {Speaker::kS2, "no, idea uh"}}));
  }
  return Annotate(ds);
}

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kIoError;
}

}  // namespace

TEST_CASE("policy validation") {
  MaskingPolicy p;
  CHECK_NOTHROW(p.Validate());
  p.p_mask = 0.7;
  CHECK(CodeOf([&] { p.Validate(); }) == ErrorCode::kInvalidPolicy);
  p = {};
  p.p_keep = -0.1;
  p.p_mask = 0.9;
  p.p_random = 0.2;
  CHECK(CodeOf([&] { p.Validate(); }) == ErrorCode::kInvalidPolicy);
  MaskingPolicy q;  // p_random > 0 with no pool
  CHECK(CodeOf([&] { BuildMaskingDataset(ManySpans(1), q, 1); }) ==
        ErrorCode::kEmptyRandomPool);
}

TEST_CASE("span token ranges") {
  auto ac = Annotate({Make("a", {{Speaker::kS1, "well, uh-huh I see"},
                                 {Speaker::kS2, "oh yeah, right."}})});
  auto spans = SpanTokenRanges(ac.dialogues[0]);
  // <s1> well , uh-huh I see <s2> oh yeah , right .
  REQUIRE(spans.size() == 4);
  CHECK(spans[0].token_begin == 1);
  CHECK(spans[0].canonical == "well");
  CHECK(spans[1].token_begin == 3);
  CHECK(spans[2].token_begin == 7);
  CHECK(spans[2].token_end == 9);
  CHECK(spans[3].canonical == "right");
  CHECK(spans[3].token_begin == 10);
}

TEST_CASE("degenerate policies") {
  AnnotatedCorpus ac = ManySpans(3);
  MaskingPolicy all_mask{1.0, 0.0, 0.0, "[MASK]", {}};
  for (const MaskedExample& ex : BuildMaskingDataset(ac, all_mask, 9)) {
    for (const MaskedSpan& s : ex.spans) {
      CHECK(s.op == MaskOp::kMask);
      for (std::size_t t = s.token_begin; t < s.token_end; ++t) {
        CHECK(ex.input_tokens[t] == "[MASK]");
      }
    }
  }
  MaskingPolicy keep{0.0, 0.0, 1.0, "[MASK]", {}};
  auto kept = BuildMaskingDataset(ac, keep, 9);
  auto ntp = BuildNtpDataset(ac);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    CHECK(kept[i].input_tokens == ntp[i].tokens);
  }
}

TEST_CASE("masking statistics and reproducibility") {
  AnnotatedCorpus ac = ManySpans(2500);
  MaskingPolicy p;
  p.random_pool = DefaultRandomPool(ac);
  auto a = BuildMaskingDataset(ac, p, 2024);
  std::size_t total = 0, mask = 0, random = 0, keep = 0;
  for (const auto& ex : a) {
    for (const auto& s : ex.spans) {
      ++total;
      mask += s.op == MaskOp::kMask;
      random += s.op == MaskOp::kRandom;
      keep += s.op == MaskOp::kKeep;
    }
  }
  REQUIRE(total == 10000);
  CHECK(mask / 1e4 >= 0.79);
  CHECK(mask / 1e4 <= 0.81);
  CHECK(random / 1e4 >= 0.09);
  CHECK(random / 1e4 <= 0.11);
  CHECK(keep / 1e4 >= 0.09);
  CHECK(keep / 1e4 <= 0.11);
  std::ostringstream x, y;
  WriteMaskDataset(a, x);
  WriteMaskDataset(BuildMaskingDataset(ac, p, 2024), y);
  CHECK(x.str() == y.str());
}

TEST_CASE("masking invariants on random corpora") {
  std::mt19937_64 gen(3);
  const std::vector<std::string> words = {"uh", "yeah", "well,", "I", "think", "so",
                                          "oh yeah", "train", "um", "right."};
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Dialogue> ds;
    for (int d = 0; d < 4; ++d) {
      std::vector<std::pair<Speaker, std::string>> us;
      for (int u = 0; u < 5; ++u) {
        std::string t;
        for (int w = 0; w < 1 + static_cast<int>(gen() % 5); ++w) {
          t += (w ? " " : "") + words[gen() % words.size()];
        }
        us.push_back({gen() % 2 ? Speaker::kS1 : Speaker::kS2, t});
      }
      ds.push_back(Make("t" + std::to_string(trial) + "_" + std::to_string(d), us));
    }
    AnnotatedCorpus ac = Annotate(ds);
    MaskingPolicy p;
    p.random_pool = {"alpha", "beta"};
    auto out = BuildMaskingDataset(ac, p, trial);
    auto ntp = BuildNtpDataset(ac);
    REQUIRE(out.size() == ntp.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto& ex = out[i];
      CHECK(ex.input_tokens.size() == ntp[i].tokens.size());
      std::vector<bool> in_span(ex.input_tokens.size(), false);
      for (const auto& s : ex.spans) {
        for (std::size_t t = s.token_begin; t < s.token_end; ++t) in_span[t] = true;
      }
      for (std::size_t t = 0; t < in_span.size(); ++t) {
        if (in_span[t]) {
          REQUIRE(ex.label_tokens[t].has_value());
          CHECK(*ex.label_tokens[t] == ntp[i].tokens[t]);
        } else {
          CHECK_FALSE(ex.label_tokens[t].has_value());
          CHECK(ex.input_tokens[t] == ntp[i].tokens[t]);
        }
      }
    }
    // Order of dialogues never changes a dialogue's draws.
    std::vector<Dialogue> reversed(ds.rbegin(), ds.rend());
    auto rev = BuildMaskingDataset(Annotate(reversed), p, trial);
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(rev[out.size() - 1 - i] == out[i]);
    }
  }
}

TEST_CASE("random pool") {
  auto ac = Annotate({Make("a", {{Speaker::kS1, "b a uh c a"}, {Speaker::kS2, "b yeah"}})});
  CHECK(DefaultRandomPool(ac) == std::vector<std::string>{"a", "b", "c"});
  CHECK(DefaultRandomPool(ac, 2) == std::vector<std::string>{"a", "b"});
}

TEST_CASE("ntp dataset") {
  auto d = Make("a", {{Speaker::kS1, "did you check?"}, {Speaker::kS2, "uh-huh"}});
  auto single = BuildNtpDataset(Annotate({d}));
  REQUIRE(single.size() == 1);
  CHECK(single[0] == MergeDialogue(d));
  auto ac = ManySpans(7);
  auto seqs = BuildNtpDataset(ac);
  CHECK(seqs.size() == 7);
  std::size_t total = 0, expect = 0;
  for (auto& s : seqs) total += s.tokens.size();
  for (auto& ad : ac.dialogues) expect += MergeDialogue(ad.dialogue).tokens.size();
  CHECK(total == expect);
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    auto texts = UnmergeTexts(seqs[i]);
    for (std::size_t u = 0; u < texts.size(); ++u) {
      CHECK(texts[u] == ac.dialogues[i].dialogue.utterances[u].text);
    }
  }
}

TEST_CASE("ttp labels") {
  auto alt = BuildTtpDataset(Annotate({Make("a", {{Speaker::kS1, "a b"},
                                                  {Speaker::kS2, "c"},
                                                  {Speaker::kS1, "d e f"},
                                                  {Speaker::kS2, "g"}})}));
  CHECK(alt[0].shift_after == std::vector<std::size_t>{1, 2, 5, 6});
  auto ssp = BuildTtpDataset(Annotate({Make("b", {{Speaker::kS1, "a"},
                                                  {Speaker::kS1, "b c"},
                                                  {Speaker::kS2, "d"}})}));
  CHECK(ssp[0].shift_after == std::vector<std::size_t>{2, 3});

  // Direct scan oracle on a random 20-utterance speaker pattern.
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<Speaker, std::string>> us;
    std::vector<std::size_t> lengths;
    for (int i = 0; i < 20; ++i) {
      const std::size_t len = 1 + gen() % 4;
      std::string t;
      for (std::size_t w = 0; w < len; ++w) t += (w ? " w" : "w");
      us.push_back({gen() % 2 ? Speaker::kS1 : Speaker::kS2, t});
      lengths.push_back(len);
    }
    std::vector<std::size_t> want;
    std::size_t end = 0;
    std::size_t alternations = 0;
    for (int i = 0; i < 20; ++i) {
      end += lengths[i];
      if (i == 19 || us[i + 1].first != us[i].first) want.push_back(end - 1);
      if (i < 19 && us[i + 1].first != us[i].first) ++alternations;
    }
    auto got = BuildTtpDataset(Annotate({Make("r", us)}));
    CHECK(got[0].shift_after == want);
    CHECK(got[0].shift_after.size() == alternations + 1);
  }
}

TEST_CASE("context windows") {
  std::vector<std::pair<Speaker, std::string>> us;
  for (int i = 0; i < 8; ++i) {
    us.push_back({i % 2 ? Speaker::kS2 : Speaker::kS1, "line " + std::to_string(i) + " uh"});
  }
  auto ac = Annotate({Make("c", us)});
  const auto& rows = ac.dialogues[0].spans;
  auto none = ExtractContext(ac, rows[3][0], ContextSetting::kNone);
  CHECK(none.utterances.size() == 1);
  CHECK(none.merged.tokens[none.span_token_begin] == "uh");

  auto first = ExtractContext(ac, rows[0][0], ContextSetting::kOne);
  CHECK(first.utterances.size() == 2);
  CHECK(first.span_utterance == 0);
  auto mid = ExtractContext(ac, rows[4][0], ContextSetting::kOne);
  CHECK(mid.utterances.size() == 3);
  CHECK(mid.utterances[0].turn_index == 3);
  auto last = ExtractContext(ac, rows[7][0], ContextSetting::kOne);
  CHECK(last.utterances.size() == 2);

  auto full = ExtractContext(ac, rows[5][0], ContextSetting::kFull);
  REQUIRE(full.utterances.size() == 6);
  CHECK(full.utterances.back().turn_index == 5);
  // Full context is a prefix of the merged dialogue.
  auto merged = MergeDialogue(ac.dialogues[0].dialogue);
  const std::size_t cut = merged.source_spans[5].token_end;
  CHECK(std::vector<std::string>(merged.tokens.begin(), merged.tokens.begin() + cut) ==
        full.merged.tokens);
  CHECK(full.merged.tokens[full.span_token_begin] == "uh");

  MarkerSpan bogus = rows[2][0];
  bogus.char_start += 1;
  CHECK(CodeOf([&] { ExtractContext(ac, bogus, ContextSetting::kNone); }) ==
        ErrorCode::kSpanNotFound);
  bogus = rows[2][0];
  bogus.dialogue_id = "zzz";
  CHECK(CodeOf([&] { ExtractContext(ac, bogus, ContextSetting::kNone); }) ==
        ErrorCode::kSpanNotFound);
  CHECK(ParseContext("full") == ContextSetting::kFull);
  CHECK(CodeOf([] { ParseContext("two"); }) == ErrorCode::kInvalidConfig);
}
