// Copyright 2026 The corefpipe Authors.
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

// Multilingual training orchestration.
//
// Sentences are drawn with replacement: first a dataset with probability
// proportional to the square root of its sentence count, then a sentence of
// that dataset uniformly. The learning rate rises linearly during warmup and
// then follows a cosine decay to zero at the final step.

#ifndef COREFPIPE_TRAINING_H_
#define COREFPIPE_TRAINING_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corefpipe/conllu.h"
#include "corefpipe/coref_model.h"
#include "corefpipe/empty_node_model.h"
#include "corefpipe/empty_node_scorer.h"
#include "corefpipe/scorer.h"

namespace corefpipe {

enum class Stage { kEmptyNodes, kCoreference };

std::string StageName(Stage stage);
Stage ParseStage(std::string_view name);

struct TrainConfig {
  std::string name = "run";
  Stage stage = Stage::kCoreference;
  Variant variant = Variant::kTwoStage;
  std::vector<std::string> datasets;
  std::vector<std::string> excluded_languages;
  int epochs = 15;
  int batches_per_epoch = 10000;
  int batch_size = 8;
  double peak_lr = 6e-4;
  // Fraction of all steps spent warming up; negative selects the stage
  // default: one epoch for empty nodes, 10% of training for coreference.
  double warmup_fraction = -1;
  int max_len = 512;
  uint64_t seed = 42;
  std::string optimizer = "adafactor";
  std::string encoder = "toy-transformer";

  // Model shape.
  EncoderConfig encoder_config;
  int head_hidden = 64;
  int antecedent_dim = 64;
  double dropout = 0.1;
  int lookahead = 50;
  int inference_max_len = 2560;
  std::string tokenizer = "hash:4:4096";

  int total_steps() const { return epochs * batches_per_epoch; }
  int warmup_steps() const;

  std::string ToJson() const;
  // Throws DataError on malformed configs.
  static TrainConfig FromJson(std::string_view json);

  bool operator==(const TrainConfig &) const = default;
};

// An experiment trains an empty node model, a coreference model or both,
// then predicts and scores the dev data.
struct ExperimentConfig {
  std::string name;
  std::optional<TrainConfig> enode;
  std::optional<TrainConfig> coref;
  int ensemble_size = 1;  // models trained with consecutive seeds
  int ensemble_keep = 1;  // best models kept by dev score

  std::string ToJson() const;
  static ExperimentConfig FromJson(std::string_view json);
};

std::vector<std::string> PresetNames();
// Throws DataError listing the presets when `name` is unknown.
ExperimentConfig Preset(const std::string &name);

double LearningRate(int step, const TrainConfig &config);

class SamplingPlan {
 public:
  SamplingPlan(std::vector<std::string> ids, std::vector<double> probabilities);

  const std::vector<std::string> &ids() const { return ids_; }
  const std::vector<double> &probabilities() const { return probabilities_; }
  double Probability(const std::string &id) const;

  // Index of a dataset drawn from the plan.
  int Sample(std::mt19937_64 &rng) const;

 private:
  std::vector<std::string> ids_;
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
};

// Throws DataError on an empty list or a size below 1.
SamplingPlan BuildSampler(const std::vector<std::pair<std::string, int64_t>> &datasets);

// Removes the datasets of `language`. Throws DataError when none remain.
std::vector<std::string> ZeroShotFilter(const std::vector<std::string> &datasets,
                                        const std::string &language);

struct ModelScore {
  std::string id;
  uint64_t seed = 0;
  double score = 0;
};

// Indices of the `k` best models, ties broken by lower seed, in rank order.
std::vector<int> SelectBest(const std::vector<ModelScore> &models, int k);

// Data root from a flag, else from $COREFPIPE_DATA_ROOT. Throws DataError
// when neither is set.
std::filesystem::path ResolveDataRoot(const std::string &flag);

// Reads one split of every dataset. Throws DataError naming the expected
// dataset files when some are missing.
std::vector<Document> LoadCorpus(const std::filesystem::path &root,
                                 const std::vector<std::string> &datasets,
                                 const std::string &split);

// Per-step progress; returning false stops training early.
using StepCallback = std::function<bool(int step, double lr, double loss)>;

struct TrainOptions {
  // Run directory receiving log.tsv and checkpoints; empty for none.
  std::filesystem::path run_dir;
  // Overrides TrainConfig::total_steps() when positive, keeping the
  // schedule of the configured length.
  int max_steps = 0;
  StepCallback on_step;
};

std::unique_ptr<EmptyNodeModel> TrainEmptyNodeModel(
    const TrainConfig &config, const std::vector<Document> &train,
    const TrainOptions &options = {});

std::unique_ptr<CorefModel> TrainCorefModel(const TrainConfig &config,
                                            const std::vector<Document> &train,
                                            const TrainOptions &options = {});

// Model configs derived from a training config and its data.
EmptyNodeModelConfig MakeEmptyNodeConfig(const TrainConfig &config,
                                         const std::vector<Document> &train);
CorefModelConfig MakeCorefConfig(const TrainConfig &config,
                                 const std::vector<Document> &train);

// Removes empty nodes and coreference from gold documents, giving the
// input of the two-stage pipeline.
std::vector<Document> PipelineInput(const std::vector<Document> &gold);

struct ExperimentResult {
  std::filesystem::path run_dir;
  std::vector<ScoreReport> reports;  // dev, head match, no singletons
  double conll = 0;                  // average over datasets
  std::optional<EnodeScores> enode;  // dev empty nodes, when trained
  std::vector<ModelScore> members;
  std::vector<int> selected;
  double seconds = 0;
};

struct ExperimentOptions {
  std::filesystem::path runs_root = "runs";
  int max_steps = 0;  // per stage, see TrainOptions
  int threads = 1;
  bool quiet = false;
};

ExperimentResult RunExperiment(const ExperimentConfig &config,
                               const std::filesystem::path &data_root,
                               const ExperimentOptions &options = {});

}  // namespace corefpipe

#endif  // COREFPIPE_TRAINING_H_
