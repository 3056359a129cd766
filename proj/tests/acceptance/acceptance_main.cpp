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

// Acceptance suite. Each criterion prints one PASS/FAIL/SKIP line with its
// measured value and runtime; the exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bcprobe/cluster.hpp"
#include "bcprobe/datasetgen.hpp"
#include "bcprobe/embeddings.hpp"
#include "bcprobe/lexicon.hpp"
#include "bcprobe/nlgeval.hpp"
#include "bcprobe/pipeline.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace bcprobe;

namespace {

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status = Status::kFail;
  std::string detail;
};

Outcome Check(bool ok, std::string detail) {
  return {ok ? Status::kPass : Status::kFail, std::move(detail)};
}

std::string Fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const std::string kFixtures = BCPROBE_FIXTURES;

// --- criteria ---------------------------------------------------------------

Outcome SilhouetteOracle() {
  std::mt19937_64 gen(20260601);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + static_cast<int>(gen() % 99);
    const int d = 1 + static_cast<int>(gen() % 10);
    const int k = 2 + static_cast<int>(gen() % 4);
    oracle::Points p = oracle::Gaussian(gen, n, d);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = i < 2 ? i : static_cast<int>(gen() % k);
    const double got = SilhouetteScore(oracle::ToMatrix(p), labels);
    worst = std::max(worst, std::abs(got - oracle::Silhouette(p, labels)));
  }
  return Check(worst <= 1e-9, Fmt("max |diff| = %.3g over 50 instances", worst));
}

Outcome FourPoint() {
  Matrix m(4, 2);
  m << 0, 0, 0, 1, 10, 10, 10, 11;
  const double sc = SilhouetteScore(m, std::vector<int>{0, 0, 1, 1});
  return Check(std::abs(sc - 0.9293) <= 1e-4, Fmt("SC = %.6f", sc));
}

Outcome KMeansOptimum() {
  std::mt19937_64 gen(20260602);
  int optimal = 0;
  bool monotone = true;
  for (int t = 0; t < 100; ++t) {
    const int n = 3 + t % 6;
    oracle::Points p = oracle::Gaussian(gen, n, 2);
    Clustering c = KMeans(oracle::ToMatrix(p), 2, static_cast<std::uint64_t>(t));
    optimal += c.inertia <= oracle::BruteForceTwoMeans(p) + 1e-9;
    for (std::size_t i = 1; i < c.inertia_history.size(); ++i) {
      monotone = monotone && c.inertia_history[i] <= c.inertia_history[i - 1];
    }
  }
  return Check(optimal >= 95 && monotone,
               Fmt("%d/100 at the optimum, inertia %s", optimal,
                   monotone ? "non-increasing" : "INCREASED"));
}

Outcome SweepBlobs() {
  std::string ks;
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 gen(seed * 7919);
    // Draw offsets first, then place centres 10x the realized radius apart.
    oracle::Points offsets = oracle::Gaussian(gen, 90, 2);
    double radius = 0.0;
    for (auto& o : offsets) radius = std::max(radius, std::hypot(o[0], o[1]));
    const double side = 10.0 * radius;
    const double centers[3][2] = {{0, 0}, {side, 0}, {side / 2, side * std::sqrt(3.0) / 2}};
    Matrix m(90, 2);
    for (int i = 0; i < 90; ++i) {
      m(i, 0) = centers[i % 3][0] + offsets[i][0];
      m(i, 1) = centers[i % 3][1] + offsets[i][1];
    }
    const int k = SweepK(m, 2, 15, seed).best_k;
    ks += std::to_string(k);
    ok = ok && k == 3;
  }
  return Check(ok, "best_k per seed: " + ks);
}

Outcome PcaProperties() {
  std::mt19937_64 gen(20260603);
  // Full rank keeps the trace.
  Matrix full = oracle::ToMatrix(oracle::Gaussian(gen, 120, 20, 2.0));
  const double total = oracle::Variance(full);
  const double kept = oracle::Variance(FitPca(full, 100).Transform(full));
  const double rel = std::abs(kept - total) / total;
  // Collinear data is one-dimensional.
  Matrix line(3, 2);
  line << 1, 1, 2, 2, 3, 3;
  PcaModel one = FitPca(line, 1);
  Matrix y = one.Transform(line);
  Matrix back = (y * one.components.transpose()).rowwise() + one.mean.transpose();
  const double recon = (back - line).cwiseAbs().maxCoeff();
  const double line_var = std::abs(oracle::Variance(y) - oracle::Variance(line));
  const double second = FitPca(line, 100).variances(1);
  // Dominance over random 10-dim projections.
  Eigen::MatrixXd base = oracle::ToMatrix(oracle::Gaussian(gen, 200, 50));
  for (int j = 0; j < 50; ++j) base.col(j) *= 1.0 + 0.05 * j;
  Matrix sample = base;
  const double captured = oracle::Variance(FitPca(sample, 10).Transform(sample));
  int beaten = 0;
  for (int t = 0; t < 100; ++t) {
    beaten += oracle::Variance(base * oracle::RandomOrthonormal(gen, 50, 10)) > captured;
  }
  return Check(rel <= 1e-6 && recon <= 1e-12 && line_var <= 1e-12 &&
                   second <= 1e-15 && beaten == 0,
               Fmt("trace rel err %.2g, collinear recon %.2g, %d/100 projections beat PCA",
                   rel, recon, beaten));
}

Outcome MaskingStatistics() {
  std::vector<Dialogue> ds;
  for (int i = 0; i < 2500; ++i) {
    const std::string id = "m" + std::to_string(i);
    ds.push_back({id, Language::kEn,
                  {{id, 0, Speaker::kS1, "uh I think the train"},
                   {id, 1, Speaker::kS2, "oh yeah"},
                   {id, 2, Speaker::kS1, "was late again"},
                   {id, 3, Speaker::kS2, "no, idea uh"}}});
  }
  AnnotatedCorpus ac = AnnotateCorpus(ds, BuiltinLexicon(Language::kEn));
  MaskingPolicy p;
  p.random_pool = DefaultRandomPool(ac);
  auto run = BuildMaskingDataset(ac, p, 20260604);
  std::map<MaskOp, double> share;
  double spans = 0;
  for (auto& ex : run) {
    for (auto& s : ex.spans) {
      share[s.op] += 1;
      spans += 1;
    }
  }
  for (auto& [op, v] : share) v /= spans;
  std::ostringstream a, b;
  WriteMaskDataset(run, a);
  WriteMaskDataset(BuildMaskingDataset(ac, p, 20260604), b);
  const bool in_range = spans == 10000 && share[MaskOp::kMask] >= 0.79 &&
                        share[MaskOp::kMask] <= 0.81 && share[MaskOp::kRandom] >= 0.09 &&
                        share[MaskOp::kRandom] <= 0.11 && share[MaskOp::kKeep] >= 0.09 &&
                        share[MaskOp::kKeep] <= 0.11;
  return Check(in_range && a.str() == b.str(),
               Fmt("%.0f spans: mask %.4f random %.4f keep %.4f, rerun %s", spans,
                   share[MaskOp::kMask], share[MaskOp::kRandom], share[MaskOp::kKeep],
                   a.str() == b.str() ? "identical" : "DIFFERS"));
}

Outcome LexiconBehavior() {
  const MarkerLexicon& en = BuiltinLexicon(Language::kEn);
  const MarkerLexicon& ja = BuiltinLexicon(Language::kJa);
  std::vector<std::string> failed;
  if (!FindSpansInText("the maximum value", en).empty()) failed.push_back("maximum");
  auto well = FindSpansInText("well, I think so", en);
  if (well.size() != 1 || well[0].canonical != "well" || well[0].char_end != 4) {
    failed.push_back("well-opener");
  }
  if (!FindSpansInText("he did well yesterday", en).empty()) failed.push_back("bare well");
  auto un = FindSpansInText("うんうんうん", ja);
  if (un.size() != 1 || un[0].canonical != "うん" || un[0].char_end != 6) {
    failed.push_back("うんうんうん");
  }

  // Golden file over the 50-utterance bilingual fixture.
  std::map<std::string, std::vector<nlohmann::json>> golden;
  std::istringstream g(oracle::ReadFile(kFixtures + "/bilingual_spans.jsonl"));
  std::string line;
  while (std::getline(g, line)) {
    auto j = nlohmann::json::parse(line);
    golden[j["language"].get<std::string>()].push_back(j);
  }
  std::size_t utterances = 0, matched = 0, expected = 0;
  for (Language lang : {Language::kEn, Language::kJa}) {
    const std::string name(LanguageName(lang));
    std::istringstream in(oracle::ReadFile(kFixtures + "/bilingual_" + name + ".jsonl"));
    AnnotatedCorpus ac = AnnotateCorpus(ParseCorpus(in, lang), BuiltinLexicon(lang));
    std::vector<MarkerSpan> got;
    for (auto& ad : ac.dialogues) {
      utterances += ad.dialogue.utterances.size();
      for (auto& row : ad.spans) got.insert(got.end(), row.begin(), row.end());
    }
    const auto& want = golden[name];
    expected += want.size();
    if (got.size() != want.size()) continue;
    for (std::size_t i = 0; i < got.size(); ++i) {
      matched += got[i].dialogue_id == want[i]["dialogue_id"] &&
                 got[i].turn_index == want[i]["turn_index"].get<std::int64_t>() &&
                 got[i].char_start == want[i]["char_start"].get<std::size_t>() &&
                 got[i].char_end == want[i]["char_end"].get<std::size_t>() &&
                 got[i].canonical == want[i]["canonical"];
    }
  }
  if (utterances != 50 || matched != expected) failed.push_back("golden");
  std::string detail = Fmt("golden %zu/%zu spans over %zu utterances", matched, expected,
                           utterances);
  for (auto& f : failed) detail += "; failed: " + f;
  return Check(failed.empty(), detail);
}

Outcome NlgMetrics() {
  auto rec = [](std::string g, std::string r) {
    GenerationRecord x;
    x.generated = std::move(g);
    x.reference = std::move(r);
    return x;
  };
  auto vecs = [](std::vector<std::vector<double>> rows) {
    std::vector<Vector> out;
    for (auto& r : rows) out.push_back(Eigen::Map<Vector>(r.data(), r.size()));
    return out;
  };
  GenerationRecord same = rec("uh I see what you mean", "uh I see what you mean");
  same.candidate_vectors = vecs({{0.3, 0.4}, {1, 2}, {-1, 0.5}});
  same.reference_vectors = same.candidate_vectors;
  const double bleu_id = Bleu({same});
  const double bs_id = BertScoreF1(same);

  GenerationRecord zero = rec("uh", "uh");
  zero.marker_logprobs = std::vector<MarkerLogprob>{{"uh", "uh", 0.0}, {"uh", "uh", 0.0}};
  const double ppl1 = WeightedPerplexity({zero});

  GenerationRecord a = rec("yeah yeah", "x"), b = rec("uh", "x");
  a.marker_logprobs = std::vector<MarkerLogprob>{{"yeah", "yeah", -0.5},
                                                 {"yeah", "yeah", -1.5}};
  b.marker_logprobs = std::vector<MarkerLogprob>{{"uh", "uh", -1.0}};
  const double ppl_e = WeightedPerplexity({a, b});

  const double bleu_bp = Bleu({rec("a b c d", "a b c d e")});

  GenerationRecord greedy = rec("x", "y");
  greedy.candidate_vectors = vecs({{1, 0}, {0, 1}});
  greedy.reference_vectors = vecs({{1, 0}});
  const double f1 = BertScoreF1(greedy);

  const bool ok = bleu_id == 1.0 && bs_id == 1.0 && ppl1 == 1.0 &&
                  std::abs(ppl_e - std::exp(1.0)) <= 1e-9 &&
                  std::abs(bleu_bp - 0.7788) <= 1e-4 && std::abs(f1 - 2.0 / 3.0) <= 1e-9;
  return Check(ok, Fmt("BLEU id %.17g, F1 id %.17g, PPL %.17g / %.12f, BLEU %.6f, F1 %.12f",
                       bleu_id, bs_id, ppl1, ppl_e, bleu_bp, f1));
}

Outcome SyntheticPipeline() {
  const fs::path out = fs::temp_directory_path() /
                       ("bcprobe_acceptance_" + std::to_string(std::random_device{}()));
  std::map<std::string, std::map<std::string, double>> mean_sc;
  std::ostringstream log;
  for (const char* which : {"separated", "iid"}) {
    RunConfig cfg;
    cfg.embeddings = kFixtures + "/embeddings_" + std::string(which) + ".jsonl";
    cfg.seed = 20260605;
    cfg.out_dir = out / which;
    CmdCluster(cfg, log);
    std::ifstream in(cfg.out_dir / "best_k.csv");
    std::string line;
    std::getline(in, line);
    std::map<std::string, std::pair<double, int>> acc;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string c;
      // Marker names in this fixture contain no commas or quotes.
      while (std::getline(ss, c, ',')) cells.push_back(c);
      if (cells.size() != 8 || cells[7] != "ok") continue;
      acc[cells[3]].first += std::stod(cells[6]);
      acc[cells[3]].second += 1;
    }
    for (auto& [space, v] : acc) {
      mean_sc[which][space] = v.second == 15 ? v.first / 15 : std::nan("");
    }
  }
  fs::remove_all(out);
  bool ok = mean_sc["separated"].size() == 2 && mean_sc["iid"].size() == 2;
  std::string detail;
  for (const char* space : {"ori", "pca100"}) {
    const double sep = mean_sc["separated"][space];
    const double iid = mean_sc["iid"][space];
    ok = ok && sep > 0.9 && iid < 0.25;
    if (!detail.empty()) detail += "; ";
    detail += Fmt("%s: separated %.4f, iid %.4f", space, sep, iid);
  }
  return Check(ok, detail);
}

Outcome CorpusStatistics() {
  const char* en = std::getenv("BCPROBE_EN_CORPUS");
  const char* ja = std::getenv("BCPROBE_JA_CORPUS");
  if (!en && !ja) {
    return {Status::kSkip,
            "set BCPROBE_EN_CORPUS and/or BCPROBE_JA_CORPUS (comma-separated corpus files)"};
  }
  auto shares = [](const std::string& files, Language lang) {
    std::vector<Dialogue> all;
    std::stringstream list(files);
    std::string path;
    while (std::getline(list, path, ',')) {
      std::ifstream in(path);
      if (!in) throw std::runtime_error("cannot open " + path);
      auto ds = ParseCorpus(in, lang);
      all.insert(all.end(), ds.begin(), ds.end());
    }
    std::map<std::string, double> out;
    for (auto& s : MarkerStats(AnnotateCorpus(all, BuiltinLexicon(lang)))) {
      out[s.canonical] = s.share;
    }
    return out;
  };
  bool ok = true;
  std::string detail;
  if (en) {
    auto s = shares(en, Language::kEn);
    ok = ok && std::abs(s["uh"] - 0.2456) <= 0.005 && std::abs(s["yeah"] - 0.1736) <= 0.005;
    detail += Fmt("uh %.2f%%, yeah %.2f%% ", 100 * s["uh"], 100 * s["yeah"]);
  }
  if (ja) {
    auto s = shares(ja, Language::kJa);
    ok = ok && std::abs(s["うん"] - 0.2318) <= 0.005;
    detail += Fmt("うん %.2f%%", 100 * s["うん"]);
  }
  return Check(ok, detail);
}

struct Criterion {
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"silhouette matches the double-loop oracle", 5, SilhouetteOracle},
      {"four-point silhouette fixture", 1, FourPoint},
      {"k-means reaches the brute-force optimum", 10, KMeansOptimum},
      {"sweep recovers three blobs", 5, SweepBlobs},
      {"PCA variance, collinear and dominance properties", 5, PcaProperties},
      {"masking statistics and reproducibility", 2, MaskingStatistics},
      {"lexicon behaviour and bilingual golden file", 5, LexiconBehavior},
      {"NLG metric fixtures", 1, NlgMetrics},
      {"synthetic end-to-end clustering", 30, SyntheticPipeline},
      {"corpus marker shares (opt-in)", 600, CorpusStatistics},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Status::kFail, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.status == Status::kPass && secs > c.limit_s) {
      o.status = Status::kFail;
      o.detail += Fmt(" (over the %.0f s limit)", c.limit_s);
    }
    const char* tag = o.status == Status::kPass   ? "PASS"
                      : o.status == Status::kSkip ? "SKIP"
                                                  : "FAIL";
    failures += o.status == Status::kFail;
    std::printf("%s  %-50s %7.3f s  %s\n", tag, c.name, secs, o.detail.c_str());
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
