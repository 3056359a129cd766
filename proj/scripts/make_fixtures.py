#!/usr/bin/env python3
# Copyright 2026 The bcprobe Authors.
# SPDX-License-Identifier: Apache-2.0
"""Regenerates the checked-in test fixtures under tests/fixtures.

Marker positions in the planted corpora are recorded while the text is
built, so the golden span files never depend on the matcher under test.
"""

import json
import pathlib
import random

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def dump_jsonl(name, rows):
    with open(OUT / name, "w", encoding="utf-8", newline="\n") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def utt(did, turn, spk, text):
    return {"dialogue_id": did, "turn_index": turn, "speaker": spk, "text": text}


class Builder:
    """Builds one utterance piece by piece, remembering planted spans."""

    def __init__(self):
        self.parts = []
        self.spans = []

    def length(self):
        return sum(len(p) for p in self.parts)

    def plain(self, s):
        self.parts.append(s)
        return self

    def marker(self, surface, canonical):
        start = self.length()
        self.parts.append(surface)
        self.spans.append((start, start + len(surface), canonical, surface))
        return self

    def text(self):
        return "".join(self.parts)


def duplicate_turn():
    rows = []
    for d, n in (("d1", 3), ("d2", 4), ("d3", 3)):
        for t in range(n):
            rows.append(utt(d, t, "s1" if t % 2 == 0 else "s2", f"line {t} of {d}"))
    # d2 repeats turn 2.
    rows[3 + 3]["turn_index"] = 2
    dump_jsonl("duplicate_turn.jsonl", rows)


def merge6():
    texts = ["did you check your inbox?", "uh-huh", "and?",
             "nothing from them yet.", "well, okay then", "see you tomorrow!"]
    spk = ["s1", "s2", "s1", "s1", "s2", "s1"]
    dump_jsonl("merge6.jsonl",
               [utt("m6", i, spk[i], t) for i, t in enumerate(texts)])


def planted8():
    builders = [
        Builder().plain("I was reading the maximum value"),
        Builder().marker("uh-huh", "uh-huh"),
        Builder().plain("then ").marker("um", "um").plain(" the train was late"),
        Builder().marker("Well", "well").plain(", I did well on the test"),
        Builder().plain("nowhere to go tonight"),
        Builder().marker("oh yeah", "oh yeah").plain(" that sofa"),
        Builder().plain("so the umbrella broke"),
        Builder().plain("we can try it ").marker("of course", "of course"),
    ]
    rows, spans = [], []
    for i, b in enumerate(builders):
        rows.append(utt("p8", i, "s1" if i % 2 == 0 else "s2", b.text()))
        for s in b.spans:
            spans.append({"dialogue_id": "p8", "turn_index": i,
                          "char_start": s[0], "char_end": s[1],
                          "canonical": s[2], "matched_variant": s[3]})
    assert len(spans) == 5
    dump_jsonl("planted8.jsonl", rows)
    dump_jsonl("planted8_spans.jsonl", spans)


EN_WORDS = ["I", "think", "the", "train", "was", "late", "today", "we",
            "could", "try", "again", "maybe", "tomorrow", "maximum", "value",
            "ohio", "umbrella", "nowhere", "sofa", "wellness", "nothing",
            "rightly", "yesterday", "bus", "station", "Huhne", "ukulele"]
EN_PLAIN = ["uh", "yeah", "uh-huh", "oh", "um", "yes", "oh yeah", "huh",
            "mmhmm", "of course", "Yeah", "UH"]
EN_AMBIG = ["well", "right", "okay", "no", "so"]

JA_WORDS = ["今日", "雨", "天気", "駅", "本", "読", "行", "明日", "電車",
            "会社", "先生", "時間", "映画", "料理", "大学"]
JA_PLAIN = [("うん", "うん"), ("うんうんうん", "うん"), ("はい", "はい"),
            ("はーい", "はい"), ("ああ", "あ"), ("えー", "え"), ("まあ", "ま"),
            ("なんか", "なんか"), ("あのー", "あの"), ("んー", "ん"),
            ("そうですね", "そうです"), ("ははは", "は"), ("いやいや", "いや"),
            ("へー", "へー"), ("そうか", "そうか")]
JA_AMBIG = [("そう", "そう"), ("そうそう", "そう"), ("ね", "ね"), ("ねー", "ね")]


def canonical_en(surface):
    return surface.lower()


def en_utterance(rng):
    b = Builder()
    mode = rng.randrange(5)
    words = lambda n: " ".join(rng.choice(EN_WORDS) for _ in range(n))
    if mode == 0:
        # Ambiguous opener followed by a comma.
        a = rng.choice(EN_AMBIG)
        a = a.capitalize() if rng.random() < 0.5 else a
        b.marker(a, a.lower()).plain(", ").plain(words(rng.randint(2, 5)))
    elif mode == 1:
        # Plain marker mid-utterance.
        m = rng.choice(EN_PLAIN)
        b.plain(words(rng.randint(1, 3)) + " ").marker(m, canonical_en(m))
        b.plain(" " + words(rng.randint(1, 3)) + ".")
    elif mode == 2:
        # Ambiguous entry chained to a plain marker by a comma.
        m = rng.choice(EN_PLAIN)
        a = rng.choice(EN_AMBIG)
        b.marker(m, canonical_en(m)).plain(", ").marker(a, a).plain(". ")
        b.plain(words(rng.randint(1, 4)))
    elif mode == 3:
        # Bare ambiguous entry mid-utterance: never a span.
        a = rng.choice(EN_AMBIG)
        b.plain(words(rng.randint(1, 3)) + " " + a + " " + words(rng.randint(1, 3)))
    else:
        b.plain(words(rng.randint(3, 7)))
    return b


def ja_utterance(rng):
    b = Builder()
    mode = rng.randrange(5)
    words = lambda n: "".join(rng.choice(JA_WORDS) for _ in range(n))
    if mode == 0:
        s, c = rng.choice(JA_PLAIN)
        b.marker(s, c).plain("、").plain(words(rng.randint(2, 4)) + "。")
    elif mode == 1:
        s, c = rng.choice(JA_PLAIN)
        b.plain(words(rng.randint(1, 3))).plain("、").marker(s, c).plain("、")
        b.plain(words(rng.randint(1, 3)))
    elif mode == 2:
        s, c = rng.choice(JA_PLAIN)
        a, ac = rng.choice(JA_AMBIG)
        b.marker(s, c).plain("、").marker(a, ac).plain("。").plain(words(2))
    elif mode == 3:
        a, _ = rng.choice(JA_AMBIG)
        b.plain(words(rng.randint(1, 3)) + a + words(rng.randint(1, 3)))
    else:
        b.plain(words(rng.randint(2, 6)) + "。")
    return b


def bilingual():
    rng = random.Random(20260101)
    golden = []
    for lang, make, prefix in (("en", en_utterance, "en"), ("ja", ja_utterance, "ja")):
        rows = []
        for d in range(5):
            did = f"{prefix}{d}"
            for t in range(5):
                b = make(rng)
                rows.append(utt(did, t, "s1" if (t + d) % 2 == 0 else "s2", b.text()))
                for s in b.spans:
                    golden.append({"language": lang, "dialogue_id": did,
                                   "turn_index": t, "char_start": s[0],
                                   "char_end": s[1], "canonical": s[2],
                                   "matched_variant": s[3]})
        dump_jsonl(f"bilingual_{lang}.jsonl", rows)
    dump_jsonl("bilingual_spans.jsonl", golden)


def fmt(x):
    return float(np.float32(x))


def embedding_file(name, model, fine_tuned, gen_marker, seed):
    rng = np.random.default_rng(seed)
    dim = 16
    lines = [json.dumps({"k": dim, "model": model, "fine_tuned": fine_tuned})]
    markers = [json.loads(l)["canonical"]
               for l in open(OUT.parent.parent / "data" / "lexicon_en.jsonl")]
    for mi, m in enumerate(markers):
        for j, rows in enumerate(gen_marker(rng, mi, dim)):
            rec = {"canonical": m, "dialogue_id": f"syn{mi}_{j}", "turn_index": j,
                   "context": "none",
                   "matrix": [[fmt(v) for v in row] for row in rows]}
            lines.append(json.dumps(rec))
    with open(OUT / name, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def separated(rng, mi, dim, n=40):
    k = 2 + mi % 4
    centers = rng.normal(size=(k, dim))
    centers *= 30.0 / np.linalg.norm(centers, axis=1, keepdims=True)
    out = []
    for j in range(n):
        c = centers[j % k]
        q = 1 + j % 3
        out.append(c + rng.normal(scale=0.5, size=(q, dim)))
    return out


def iid(rng, mi, dim, n=40):
    out = []
    for j in range(n):
        q = 1 + j % 3
        # Scale rows so the pooled vector is standard normal.
        out.append(rng.normal(size=(q, dim)) * np.sqrt(q))
    return out


def generations():
    recs = [
        {"context": "<s1> did you check? <s2>", "generated": "yeah I know uh maybe",
         "reference": "yeah I know uh maybe", "language": "en",
         "marker_logprobs": [{"surface": "yeah", "canonical": "yeah", "logprob": -0.5},
                             {"surface": "uh", "canonical": "uh", "logprob": -1.0}],
         "cand_vecs": [[1.0, 0.0], [0.0, 1.0]], "ref_vecs": [[1.0, 0.0], [0.0, 1.0]]},
        {"context": "<s1> and then? <s2>", "generated": "yeah we went home",
         "reference": "we went home early", "language": "en",
         "marker_logprobs": [{"surface": "yeah", "canonical": "yeah", "logprob": -1.5}],
         "cand_vecs": [[1.0, 0.0], [0.0, 1.0]], "ref_vecs": [[1.0, 0.0]]},
    ]
    dump_jsonl("generations_en.jsonl", recs)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    duplicate_turn()
    merge6()
    planted8()
    bilingual()
    embedding_file("embeddings_separated.jsonl", "synthetic-ft", True, separated, 11)
    embedding_file("embeddings_iid.jsonl", "synthetic-raw", False, iid, 12)
    generations()


if __name__ == "__main__":
    main()
