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

#include "bcprobe/pipeline.hpp"

#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "bcprobe/csv.hpp"
#include "bcprobe/error.hpp"

namespace bcprobe {

namespace fs = std::filesystem;

namespace {

using nlohmann::json;

void RequireFile(const fs::path& path, std::string_view what) {
  if (path.empty()) {
    throw Error(ErrorCode::kInvalidConfig, std::string(what) + " path is required");
  }
  if (!fs::is_regular_file(path)) {
    throw Error(ErrorCode::kIoError,
                std::string(what) + " not found: " + path.string());
  }
}

std::uint64_t RequireSeed(const RunConfig& cfg, std::string_view stage) {
  if (!cfg.seed) {
    throw Error(ErrorCode::kInvalidConfig,
                "a seed is required for " + std::string(stage));
  }
  return *cfg.seed;
}

std::ifstream OpenIn(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return in;
}

std::ofstream OpenOut(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  const fs::path path = cfg.out_dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  return out;
}

std::vector<Dialogue> LoadCorpus(const RunConfig& cfg) {
  RequireFile(cfg.corpus, "corpus");
  std::ifstream in = OpenIn(cfg.corpus);
  return ParseCorpus(in, cfg.language);
}

std::string_view SpaceName(bool pca) { return pca ? "pca100" : "ori"; }

SpaceSelection ParseSpace(std::string_view s) {
  if (s == "ori") return SpaceSelection::kOri;
  if (s == "pca100") return SpaceSelection::kPca100;
  if (s == "both") return SpaceSelection::kBoth;
  throw Error(ErrorCode::kInvalidConfig, "unknown space '" + std::string(s) + "'");
}

template <typename T>
T Get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

RunConfig ParseRunConfig(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "config must be an object");
  static const std::set<std::string> kKeys = {
      "corpus",   "lexicon",    "language", "context",        "seed",
      "masking",  "k_min",      "k_max",    "pca_target",     "restarts",
      "out_dir",  "space",      "train_fraction", "embeddings", "generations"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) {
      throw Error(ErrorCode::kInvalidConfig, "unknown config field '" + key + "'");
    }
  }
  RunConfig cfg;
  if (j.contains("corpus")) cfg.corpus = Get<std::string>(j, "corpus");
  if (j.contains("lexicon")) cfg.lexicon = Get<std::string>(j, "lexicon");
  if (j.contains("language")) cfg.language = ParseLanguage(Get<std::string>(j, "language"));
  if (j.contains("context")) cfg.context = ParseContext(Get<std::string>(j, "context"));
  if (j.contains("seed")) cfg.seed = Get<std::uint64_t>(j, "seed");
  if (j.contains("masking")) {
    const json& m = j["masking"];
    static const std::set<std::string> kMaskKeys = {
        "p_mask", "p_random", "p_keep", "mask_token", "random_pool_size"};
    for (const auto& [key, value] : m.items()) {
      if (!kMaskKeys.count(key)) {
        throw Error(ErrorCode::kInvalidConfig, "unknown masking field '" + key + "'");
      }
    }
    if (m.contains("p_mask")) cfg.masking.p_mask = Get<double>(m, "p_mask");
    if (m.contains("p_random")) cfg.masking.p_random = Get<double>(m, "p_random");
    if (m.contains("p_keep")) cfg.masking.p_keep = Get<double>(m, "p_keep");
    if (m.contains("mask_token")) cfg.masking.mask_token = Get<std::string>(m, "mask_token");
    if (m.contains("random_pool_size")) {
      cfg.masking.random_pool_size = Get<std::size_t>(m, "random_pool_size");
    }
  }
  if (j.contains("k_min")) cfg.k_min = Get<int>(j, "k_min");
  if (j.contains("k_max")) cfg.k_max = Get<int>(j, "k_max");
  if (j.contains("pca_target")) cfg.pca_target = Get<std::size_t>(j, "pca_target");
  if (j.contains("restarts")) cfg.restarts = Get<int>(j, "restarts");
  if (j.contains("out_dir")) cfg.out_dir = Get<std::string>(j, "out_dir");
  if (j.contains("space")) cfg.space = ParseSpace(Get<std::string>(j, "space"));
  if (j.contains("train_fraction")) cfg.train_fraction = Get<double>(j, "train_fraction");
  if (j.contains("embeddings")) cfg.embeddings = Get<std::string>(j, "embeddings");
  if (j.contains("generations")) cfg.generations = Get<std::string>(j, "generations");
  return cfg;
}

RunConfig LoadRunConfig(const fs::path& path) {
  RequireFile(path, "config");
  std::ifstream in = OpenIn(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseRunConfig(ss.str());
}

MarkerLexicon ResolveLexicon(const RunConfig& cfg) {
  if (cfg.lexicon.empty()) return BuiltinLexicon(cfg.language);
  if (cfg.lexicon == "en" || cfg.lexicon == "ja") {
    const MarkerLexicon& lex = BuiltinLexicon(ParseLanguage(cfg.lexicon));
    if (lex.language() != cfg.language) {
      throw Error(ErrorCode::kLanguageMismatch,
                  "lexicon '" + cfg.lexicon + "' does not match language " +
                      std::string(LanguageName(cfg.language)));
    }
    return lex;
  }
  RequireFile(cfg.lexicon, "lexicon");
  std::ifstream in = OpenIn(cfg.lexicon);
  MarkerLexicon lex = LoadLexicon(in, cfg.language);
  if (lex.language() != cfg.language) {
    throw Error(ErrorCode::kLanguageMismatch,
                "lexicon file language does not match " +
                    std::string(LanguageName(cfg.language)));
  }
  return lex;
}

AnnotateResult CmdAnnotate(const RunConfig& cfg, std::ostream& log) {
  const MarkerLexicon lex = ResolveLexicon(cfg);
  const AnnotatedCorpus corpus = AnnotateCorpus(LoadCorpus(cfg), lex);
  {
    std::ofstream out = OpenOut(cfg, "annotated.jsonl");
    WriteAnnotated(corpus, out);
  }
  {
    std::ofstream out = OpenOut(cfg, "marker_stats.csv");
    csv::WriteRow(out, {"canonical", "count", "share"});
    for (const MarkerStat& s : MarkerStats(corpus)) {
      csv::WriteRow(out, {s.canonical, std::to_string(s.count), csv::Number(s.share)});
    }
  }
  AnnotateResult r;
  r.dialogues = corpus.dialogues.size();
  for (const auto& ad : corpus.dialogues) {
    r.utterances += ad.dialogue.utterances.size();
    if (ad.dialogue.IsMonologue()) {
      log << "warning: dialogue '" << ad.dialogue.id << "' has a single speaker\n";
    }
  }
  r.spans = corpus.SpanCount();
  return r;
}

DataTask ParseDataTask(std::string_view name) {
  if (name == "mask") return DataTask::kMask;
  if (name == "ntp") return DataTask::kNtp;
  if (name == "ttp") return DataTask::kTtp;
  if (name == "context") return DataTask::kContext;
  throw Error(ErrorCode::kInvalidConfig, "unknown task '" + std::string(name) + "'");
}

std::string_view DataTaskName(DataTask task) {
  switch (task) {
    case DataTask::kMask: return "mask";
    case DataTask::kNtp: return "ntp";
    case DataTask::kTtp: return "ttp";
    case DataTask::kContext: return "context";
  }
  return "mask";
}

GenDataResult CmdGenData(const RunConfig& cfg, DataTask task, std::ostream& log) {
  const MarkerLexicon lex = ResolveLexicon(cfg);
  std::vector<Dialogue> dialogues = LoadCorpus(cfg);
  if (cfg.train_fraction) {
    CorpusSplit split = SplitCorpus(dialogues, *cfg.train_fraction,
                                    RequireSeed(cfg, "the train/eval split"));
    std::ofstream out = OpenOut(cfg, "eval_corpus.jsonl");
    SerializeCorpus(split.eval, out);
    log << "split: " << split.train.size() << " train / " << split.eval.size()
        << " eval dialogues\n";
    dialogues = std::move(split.train);
  }
  const AnnotatedCorpus corpus = AnnotateCorpus(dialogues, lex);

  GenDataResult result;
  const std::string name = std::string(DataTaskName(task)) + ".jsonl";
  result.output = cfg.out_dir / name;
  std::ofstream out = OpenOut(cfg, name);
  std::ostringstream summary;
  switch (task) {
    case DataTask::kMask: {
      MaskingPolicy policy;
      policy.p_mask = cfg.masking.p_mask;
      policy.p_random = cfg.masking.p_random;
      policy.p_keep = cfg.masking.p_keep;
      policy.mask_token = cfg.masking.mask_token;
      policy.Validate();
      if (policy.p_random > 0) {
        policy.random_pool = DefaultRandomPool(corpus, cfg.masking.random_pool_size);
      }
      const auto examples =
          BuildMaskingDataset(corpus, policy, RequireSeed(cfg, "masking"));
      WriteMaskDataset(examples, out);
      std::map<MaskOp, std::size_t> ops;
      std::size_t spans = 0;
      for (const auto& ex : examples) {
        for (const auto& s : ex.spans) {
          ++ops[s.op];
          ++spans;
        }
      }
      result.records = examples.size();
      summary << "spans=" << spans << " mask=" << ops[MaskOp::kMask]
              << " random=" << ops[MaskOp::kRandom] << " keep=" << ops[MaskOp::kKeep];
      break;
    }
    case DataTask::kNtp: {
      const auto seqs = BuildNtpDataset(corpus);
      WriteNtpDataset(seqs, out);
      std::size_t tokens = 0;
      for (const auto& s : seqs) tokens += s.tokens.size();
      result.records = seqs.size();
      summary << "tokens=" << tokens;
      break;
    }
    case DataTask::kTtp: {
      const auto seqs = BuildTtpDataset(corpus);
      WriteTtpDataset(seqs, out);
      std::size_t shifts = 0;
      for (const auto& s : seqs) shifts += s.shift_after.size();
      result.records = seqs.size();
      summary << "shifts=" << shifts;
      break;
    }
    case DataTask::kContext: {
      const ContextSetting setting = cfg.context.value_or(ContextSetting::kNone);
      WriteContexts(corpus, setting, out);
      result.records = corpus.SpanCount();
      summary << "context=" << ContextName(setting);
      break;
    }
  }
  result.summary = summary.str();
  return result;
}

namespace {

struct MarkerOutcome {
  std::string canonical;
  std::size_t n = 0;
  std::optional<SilhouetteReport> report;
};

std::vector<std::string> OrderedMarkers(const PooledSet& set) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  for (const PointKey& k : set.keys) {
    if (seen.insert(k.canonical).second) order.push_back(k.canonical);
  }
  return order;
}

PooledSet SelectContext(const PooledSet& set, ContextSetting c) {
  PooledSet out;
  out.provenance = set.provenance;
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < set.keys.size(); ++i) {
    if (set.keys[i].context == c) {
      rows.push_back(static_cast<Eigen::Index>(i));
      out.keys.push_back(set.keys[i]);
    }
  }
  out.points.resize(static_cast<Eigen::Index>(rows.size()), set.points.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.points.row(static_cast<Eigen::Index>(i)) = set.points.row(rows[i]);
  }
  return out;
}

std::vector<ContextSetting> ContextsPresent(const PooledSet& set,
                                            const RunConfig& cfg) {
  std::vector<ContextSetting> out;
  for (ContextSetting c : {ContextSetting::kNone, ContextSetting::kOne,
                           ContextSetting::kFull}) {
    if (cfg.context && *cfg.context != c) continue;
    for (const PointKey& k : set.keys) {
      if (k.context == c) {
        out.push_back(c);
        break;
      }
    }
  }
  return out;
}

PooledSet LoadPooled(const RunConfig& cfg) {
  RequireFile(cfg.embeddings, "embeddings");
  std::ifstream in = OpenIn(cfg.embeddings);
  return PoolSet(ReadEmbeddings(in));
}

void Write2d(std::ostream& out, const PooledSet& standardized,
             ContextSetting context) {
  Matrix xy = Matrix::Zero(standardized.points.rows(), 2);
  if (standardized.size() >= 2) {
    const Matrix reduced = PcaReduce(standardized, 2).points;
    xy.leftCols(reduced.cols()) = reduced;
  }
  for (std::size_t i = 0; i < standardized.size(); ++i) {
    const PointKey& k = standardized.keys[i];
    const auto r = static_cast<Eigen::Index>(i);
    csv::WriteRow(out, {k.canonical, std::string(ContextName(context)),
                        k.dialogue_id, std::to_string(k.turn_index),
                        csv::Number(xy(r, 0)), csv::Number(xy(r, 1))});
  }
}

}  // namespace

ClusterResult CmdCluster(const RunConfig& cfg, std::ostream& log) {
  const std::uint64_t seed = RequireSeed(cfg, "clustering");
  const PooledSet all = LoadPooled(cfg);
  const std::string fine_tuned = all.provenance.fine_tuned ? "true" : "false";

  KMeansOptions options;
  options.restarts = cfg.restarts;

  std::ofstream sil = OpenOut(cfg, "silhouette.csv");
  std::ofstream best = OpenOut(cfg, "best_k.csv");
  std::ofstream pts = OpenOut(cfg, "points_2d.csv");
  csv::WriteRow(sil, {"marker", "context", "fine_tuned", "space", "k", "silhouette"});
  csv::WriteRow(best, {"marker", "context", "fine_tuned", "space", "n", "best_k",
                       "silhouette", "status"});
  csv::WriteRow(pts, {"marker", "context", "dialogue_id", "turn_index", "x", "y"});

  ClusterResult result;
  std::set<std::string> marker_names;
  for (ContextSetting context : ContextsPresent(all, cfg)) {
    const std::string ctx(ContextName(context));
    const PooledSet subset = SelectContext(all, context);
    const std::vector<std::string> markers = OrderedMarkers(subset);
    marker_names.insert(markers.begin(), markers.end());

    std::optional<PooledSet> standardized;
    if (subset.size() >= 2) {
      standardized = Standardize(subset);
      Write2d(pts, *standardized, context);
    }

    std::vector<bool> spaces;
    if (cfg.space != SpaceSelection::kPca100) spaces.push_back(false);
    if (cfg.space != SpaceSelection::kOri) spaces.push_back(true);
    for (bool pca : spaces) {
      const std::string space(SpaceName(pca));
      std::optional<PooledSet> space_set;
      if (standardized) {
        space_set = pca ? PcaReduce(*standardized, cfg.pca_target) : *standardized;
      }
      std::vector<std::pair<std::string, Vector>> reps;
      for (const std::string& marker : markers) {
        const std::size_t n =
            space_set ? space_set->Select(marker).size() : subset.Select(marker).size();
        if (!space_set || n < static_cast<std::size_t>(cfg.k_min) + 1) {
          csv::WriteRow(best, {marker, ctx, fine_tuned, space, std::to_string(n), "",
                               "", "too_few_records"});
          log << "warning: TooFewRecords: marker '" << marker << "' (" << ctx
              << ", " << space << ") has " << n << " embeddings; need "
              << cfg.k_min + 1 << "\n";
          ++result.warnings;
          continue;
        }
        const PooledSet points = space_set->Select(marker);
        const SilhouetteReport report =
            SweepK(points.points, cfg.k_min, cfg.k_max, seed, options);
        for (const auto& [k, sc] : report.per_k) {
          csv::WriteRow(sil, {marker, ctx, fine_tuned, space, std::to_string(k),
                              csv::Number(sc)});
        }
        csv::WriteRow(best, {marker, ctx, fine_tuned, space, std::to_string(n),
                             std::to_string(report.best_k),
                             csv::Number(report.best_sc), "ok"});
        reps.emplace_back(marker, MarkerRepresentative(report.best));
      }
      const DistanceMatrix dm = BuildDistanceMatrix(reps);
      std::ofstream out = OpenOut(cfg, "distance_" + space + "_" + ctx + ".csv");
      std::vector<std::string> header = {""};
      header.insert(header.end(), dm.labels.begin(), dm.labels.end());
      csv::WriteRow(out, header);
      for (std::size_t i = 0; i < dm.labels.size(); ++i) {
        std::vector<std::string> row = {dm.labels[i]};
        for (std::size_t j = 0; j < dm.labels.size(); ++j) {
          row.push_back(csv::Number(
              dm.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
        }
        csv::WriteRow(out, row);
      }
    }
  }
  result.markers = marker_names.size();
  return result;
}

MetricReport CmdEvalNlg(const RunConfig& cfg, std::ostream& log) {
  RequireFile(cfg.generations, "generations");
  const MarkerLexicon lex = ResolveLexicon(cfg);
  std::ifstream in = OpenIn(cfg.generations);
  const std::vector<GenerationRecord> records = ReadGenerations(in);
  const MetricReport report = Evaluate(records, lex);
  if (!report.weighted_perplexity) {
    log << "warning: no marker log-probabilities; perplexity omitted\n";
  }
  if (!report.bertscore_f1) {
    log << "warning: token vectors missing; BERTScore omitted\n";
  }
  {
    nlohmann::ordered_json j;
    j["diversity"] = report.diversity;
    j["frequency"] = report.frequency;
    j["weighted_perplexity"] = report.weighted_perplexity
                                   ? nlohmann::ordered_json(*report.weighted_perplexity)
                                   : nlohmann::ordered_json(nullptr);
    j["bertscore_f1"] = report.bertscore_f1
                            ? nlohmann::ordered_json(*report.bertscore_f1)
                            : nlohmann::ordered_json(nullptr);
    j["bleu"] = report.bleu;
    j["records"] = records.size();
    std::ofstream out = OpenOut(cfg, "metrics.json");
    out << j.dump(2) << '\n';
  }
  {
    std::ofstream out = OpenOut(cfg, "per_record.csv");
    csv::WriteRow(out, {"index", "language", "units", "marker_units", "markers",
                        "bleu", "bertscore_f1", "logprob_count", "mean_logprob"});
    const auto rows = EvaluatePerRecord(records, lex);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const RecordMetrics& m = rows[i];
      csv::WriteRow(out, {std::to_string(i),
                          std::string(LanguageName(records[i].language)),
                          std::to_string(m.units), std::to_string(m.marker_units),
                          std::to_string(m.markers), csv::Number(m.bleu),
                          m.bertscore_f1 ? csv::Number(*m.bertscore_f1) : "",
                          std::to_string(m.logprob_count),
                          m.mean_logprob ? csv::Number(*m.mean_logprob) : ""});
    }
  }
  return report;
}

std::size_t CmdExport2d(const RunConfig& cfg, std::ostream& log) {
  const PooledSet all = LoadPooled(cfg);
  std::ofstream pts = OpenOut(cfg, "points_2d.csv");
  csv::WriteRow(pts, {"marker", "context", "dialogue_id", "turn_index", "x", "y"});
  std::size_t rows = 0;
  for (ContextSetting context : ContextsPresent(all, cfg)) {
    const PooledSet subset = SelectContext(all, context);
    if (subset.size() < 2) {
      log << "warning: TooFewRecords: context '" << ContextName(context)
          << "' has fewer than 2 embeddings\n";
      continue;
    }
    Write2d(pts, Standardize(subset), context);
    rows += subset.size();
  }
  return rows;
}

}  // namespace bcprobe
