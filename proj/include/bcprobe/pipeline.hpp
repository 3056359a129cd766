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

// The command layer behind the bcprobe CLI: a declarative run config and
// one function per subcommand. Data goes to files under out_dir; progress
// and warnings go to the log stream.

#ifndef BCPROBE_PIPELINE_HPP_
#define BCPROBE_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "bcprobe/cluster.hpp"
#include "bcprobe/datasetgen.hpp"
#include "bcprobe/lexicon.hpp"
#include "bcprobe/nlgeval.hpp"

namespace bcprobe {

enum class SpaceSelection { kOri, kPca100, kBoth };

struct MaskingConfig {
  double p_mask = 0.8;
  double p_random = 0.1;
  double p_keep = 0.1;
  std::string mask_token = "[MASK]";
  std::size_t random_pool_size = 1000;
};

struct RunConfig {
  std::filesystem::path corpus;
  std::string lexicon;  // "en", "ja" or a path; empty means the builtin
  Language language = Language::kEn;
  std::optional<ContextSetting> context;
  std::optional<std::uint64_t> seed;
  MaskingConfig masking;
  int k_min = 2;
  int k_max = 15;
  std::size_t pca_target = 100;
  int restarts = 10;
  std::filesystem::path out_dir = ".";
  SpaceSelection space = SpaceSelection::kBoth;
  std::optional<double> train_fraction;
  std::filesystem::path embeddings;
  std::filesystem::path generations;
};

// Reads a JSON config. Unknown keys are rejected (kInvalidConfig).
RunConfig LoadRunConfig(const std::filesystem::path& path);
RunConfig ParseRunConfig(std::string_view json_text);

MarkerLexicon ResolveLexicon(const RunConfig& cfg);

struct AnnotateResult {
  std::size_t dialogues = 0;
  std::size_t utterances = 0;
  std::size_t spans = 0;
};
// Writes annotated.jsonl and marker_stats.csv.
AnnotateResult CmdAnnotate(const RunConfig& cfg, std::ostream& log);

enum class DataTask { kMask, kNtp, kTtp, kContext };
DataTask ParseDataTask(std::string_view name);
std::string_view DataTaskName(DataTask task);

struct GenDataResult {
  std::filesystem::path output;
  std::size_t records = 0;
  std::string summary;
};
// Writes <task>.jsonl. With train_fraction set, only the training split is
// used and the held-out dialogues go to eval_corpus.jsonl.
GenDataResult CmdGenData(const RunConfig& cfg, DataTask task, std::ostream& log);

struct ClusterResult {
  std::size_t markers = 0;
  std::size_t warnings = 0;
};
// Writes silhouette.csv, best_k.csv, distance_<space>_<context>.csv and
// points_2d.csv.
ClusterResult CmdCluster(const RunConfig& cfg, std::ostream& log);

// Writes metrics.json and per_record.csv.
MetricReport CmdEvalNlg(const RunConfig& cfg, std::ostream& log);

// Writes points_2d.csv.
std::size_t CmdExport2d(const RunConfig& cfg, std::ostream& log);

}  // namespace bcprobe

#endif  // BCPROBE_PIPELINE_HPP_
