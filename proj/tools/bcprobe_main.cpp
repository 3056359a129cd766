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

// bcprobe: backchannel/filler dataset generation and representation
// analysis.
//
// Sample usage:
//   bcprobe annotate --corpus swb.jsonl --language en --out-dir out/
//   bcprobe gen-data --task mask --corpus swb.jsonl --seed 7 --out-dir out/
//   bcprobe cluster --embeddings emb.jsonl --seed 7 --space both --out-dir out/
//   bcprobe eval-nlg --generations gen.jsonl --language en --out-dir out/

#include <CLI11.hpp>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>

#include "bcprobe/error.hpp"
#include "bcprobe/pipeline.hpp"

namespace {

using bcprobe::RunConfig;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> language;
  std::optional<std::string> context;
  std::optional<std::string> space;
  std::optional<std::string> corpus;
  std::optional<std::string> lexicon;
  std::optional<std::string> embeddings;
  std::optional<std::string> generations;
  std::optional<int> k_min;
  std::optional<int> k_max;
  std::optional<std::size_t> pca_target;
  std::optional<int> restarts;
  std::optional<double> train_fraction;
  std::optional<double> p_mask;
  std::optional<double> p_random;
  std::optional<double> p_keep;
  std::string task = "mask";
};

RunConfig Resolve(const Overrides& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : bcprobe::LoadRunConfig(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.language) cfg.language = bcprobe::ParseLanguage(*o.language);
  if (o.context) cfg.context = bcprobe::ParseContext(*o.context);
  if (o.space) {
    cfg.space = *o.space == "ori"      ? bcprobe::SpaceSelection::kOri
                : *o.space == "pca100" ? bcprobe::SpaceSelection::kPca100
                                       : bcprobe::SpaceSelection::kBoth;
  }
  if (o.corpus) cfg.corpus = *o.corpus;
  if (o.lexicon) cfg.lexicon = *o.lexicon;
  if (o.embeddings) cfg.embeddings = *o.embeddings;
  if (o.generations) cfg.generations = *o.generations;
  if (o.k_min) cfg.k_min = *o.k_min;
  if (o.k_max) cfg.k_max = *o.k_max;
  if (o.pca_target) cfg.pca_target = *o.pca_target;
  if (o.restarts) cfg.restarts = *o.restarts;
  if (o.train_fraction) cfg.train_fraction = *o.train_fraction;
  if (o.p_mask) cfg.masking.p_mask = *o.p_mask;
  if (o.p_random) cfg.masking.p_random = *o.p_random;
  if (o.p_keep) cfg.masking.p_keep = *o.p_keep;
  return cfg;
}

void ReportError(std::string_view code, std::string_view message) {
  nlohmann::ordered_json j;
  j["error"] = code;
  j["message"] = message;
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Backchannel/filler dataset generation and representation analysis"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;

  app.add_option("--config", o.config, "JSON run config; flags override it");
  app.add_option("--seed", o.seed, "Seed for every stochastic stage");
  app.add_option("--out-dir", o.out_dir, "Output directory");
  app.add_option("--language", o.language, "en or ja")
      ->check(CLI::IsMember({"en", "ja", "EN", "JA"}));
  app.add_option("--context", o.context, "Context setting")
      ->check(CLI::IsMember({"none", "one", "full"}));
  app.add_option("--space", o.space, "Clustering space")
      ->check(CLI::IsMember({"ori", "pca100", "both"}));

  auto* annotate = app.add_subcommand("annotate", "Tag markers and count them");
  auto* gen = app.add_subcommand("gen-data", "Build a fine-tuning dataset");
  auto* cluster = app.add_subcommand("cluster", "Silhouette sweep per marker");
  auto* eval = app.add_subcommand("eval-nlg", "Score generated continuations");
  auto* export2d = app.add_subcommand("export-2d", "2-D PCA projection for plotting");

  for (auto* sub : {annotate, gen}) {
    sub->add_option("--corpus", o.corpus, "Corpus file (JSON lines)");
    sub->add_option("--lexicon", o.lexicon, "Lexicon: en, ja or a file");
  }
  gen->add_option("--task", o.task, "mask, ntp, ttp or context")
      ->check(CLI::IsMember({"mask", "ntp", "ttp", "context"}));
  gen->add_option("--train-fraction", o.train_fraction,
                  "Keep only this share of dialogues; the rest go to eval_corpus.jsonl");
  gen->add_option("--p-mask", o.p_mask, "Share of spans replaced by [MASK] (0.8)");
  gen->add_option("--p-random", o.p_random, "Share replaced by pool tokens (0.1)");
  gen->add_option("--p-keep", o.p_keep, "Share left intact (0.1)");
  for (auto* sub : {cluster, export2d}) {
    sub->add_option("--embeddings", o.embeddings, "Embedding interchange file");
  }
  cluster->add_option("--k-min", o.k_min, "Smallest k in the sweep (2)");
  cluster->add_option("--k-max", o.k_max, "Largest k in the sweep (15)");
  cluster->add_option("--pca-target", o.pca_target, "Dimension of the pca100 space (100)");
  cluster->add_option("--restarts", o.restarts, "k-means restarts per k (10)");
  eval->add_option("--generations", o.generations, "Generation records file");
  eval->add_option("--lexicon", o.lexicon, "Lexicon: en, ja or a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const RunConfig cfg = Resolve(o);
    if (annotate->parsed()) {
      const auto r = bcprobe::CmdAnnotate(cfg, std::cerr);
      std::cout << "annotated " << r.dialogues << " dialogues, " << r.utterances
                << " utterances, " << r.spans << " spans\n";
    } else if (gen->parsed()) {
      const auto r = bcprobe::CmdGenData(cfg, bcprobe::ParseDataTask(o.task), std::cerr);
      std::cout << o.task << ": " << r.records << " records -> "
                << r.output.string() << " (" << r.summary << ")\n";
    } else if (cluster->parsed()) {
      const auto r = bcprobe::CmdCluster(cfg, std::cerr);
      std::cout << "clustered " << r.markers << " markers, " << r.warnings
                << " warnings\n";
    } else if (eval->parsed()) {
      const auto r = bcprobe::CmdEvalNlg(cfg, std::cerr);
      std::cout << "diversity=" << r.diversity << " frequency=" << r.frequency
                << " bleu=" << r.bleu << "\n";
    } else if (export2d->parsed()) {
      const auto n = bcprobe::CmdExport2d(cfg, std::cerr);
      std::cout << "exported " << n << " points\n";
    }
  } catch (const bcprobe::Error& e) {
    ReportError(bcprobe::ErrorCodeName(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    ReportError("Internal", e.what());
    return 2;
  }
  return 0;
}
