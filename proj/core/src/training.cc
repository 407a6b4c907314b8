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

#include "corefpipe/training.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <numeric>
#include <set>

#include "corefpipe/checkpoint.h"
#include "corefpipe/datasets.h"
#include "corefpipe/errors.h"
#include "corefpipe/one_stage.h"
#include "corefpipe/optimizer.h"
#include "corefpipe/pipeline.h"
#include "corefpipe/synthetic.h"
#include "json_util.h"

namespace corefpipe {

namespace fs = std::filesystem;
using nlohmann::json;

std::string StageName(Stage stage) {
  return stage == Stage::kEmptyNodes ? "enode" : "coref";
}

Stage ParseStage(std::string_view name) {
  if (name == "enode") return Stage::kEmptyNodes;
  if (name == "coref") return Stage::kCoreference;
  throw DataError("unknown stage '" + std::string(name) + "' (enode, coref)");
}

int TrainConfig::warmup_steps() const {
  double fraction = warmup_fraction;
  if (fraction < 0) {
    fraction = stage == Stage::kEmptyNodes ? 1.0 / std::max(epochs, 1) : 0.1;
  }
  return static_cast<int>(std::lround(fraction * total_steps()));
}

namespace {

json TrainToJson(const TrainConfig &c) {
  return {{"name", c.name},
          {"stage", StageName(c.stage)},
          {"variant", VariantName(c.variant)},
          {"datasets", c.datasets},
          {"excluded_languages", c.excluded_languages},
          {"epochs", c.epochs},
          {"batches_per_epoch", c.batches_per_epoch},
          {"batch_size", c.batch_size},
          {"peak_lr", c.peak_lr},
          {"warmup_fraction", c.warmup_fraction},
          {"max_len", c.max_len},
          {"seed", c.seed},
          {"optimizer", c.optimizer},
          {"encoder", c.encoder},
          {"encoder_config", internal::EncoderToJson(c.encoder_config)},
          {"head_hidden", c.head_hidden},
          {"antecedent_dim", c.antecedent_dim},
          {"dropout", c.dropout},
          {"lookahead", c.lookahead},
          {"inference_max_len", c.inference_max_len},
          {"tokenizer", c.tokenizer}};
}

TrainConfig TrainFromJson(const json &j) {
  using internal::Read;
  TrainConfig c;
  std::string stage = StageName(c.stage), variant = VariantName(c.variant);
  Read(j, "name", c.name);
  Read(j, "stage", stage);
  Read(j, "variant", variant);
  Read(j, "datasets", c.datasets);
  Read(j, "excluded_languages", c.excluded_languages);
  Read(j, "epochs", c.epochs);
  Read(j, "batches_per_epoch", c.batches_per_epoch);
  Read(j, "batch_size", c.batch_size);
  Read(j, "peak_lr", c.peak_lr);
  Read(j, "warmup_fraction", c.warmup_fraction);
  Read(j, "max_len", c.max_len);
  Read(j, "seed", c.seed);
  Read(j, "optimizer", c.optimizer);
  Read(j, "encoder", c.encoder);
  if (j.contains("encoder_config")) {
    c.encoder_config = internal::EncoderFromJson(j["encoder_config"]);
  }
  Read(j, "head_hidden", c.head_hidden);
  Read(j, "antecedent_dim", c.antecedent_dim);
  Read(j, "dropout", c.dropout);
  Read(j, "lookahead", c.lookahead);
  Read(j, "inference_max_len", c.inference_max_len);
  Read(j, "tokenizer", c.tokenizer);
  c.stage = ParseStage(stage);
  try {
    c.variant = ParseVariant(variant);
  } catch (const Error &e) {
    throw DataError(e.what());
  }
  if (c.epochs < 1 || c.batches_per_epoch < 1 || c.batch_size < 1) {
    throw DataError("epochs, batches_per_epoch and batch_size must be positive");
  }
  if (c.peak_lr < 0 || c.warmup_fraction > 1) {
    throw DataError("peak_lr must be non-negative and warmup_fraction at most 1");
  }
  if (c.encoder != "toy-transformer") {
    throw DataError("unsupported encoder '" + c.encoder +
                    "'; this build provides 'toy-transformer'");
  }
  return c;
}

// Runs `parse` turning every configuration error into a DataError.
template <typename F>
auto ParseConfig(std::string_view text, F parse) {
  try {
    return parse(internal::ParseJson(text, "training config"));
  } catch (const DataError &) {
    throw;
  } catch (const Error &e) {
    throw DataError(e.what());
  }
}

}  // namespace

std::string TrainConfig::ToJson() const { return TrainToJson(*this).dump(2); }

TrainConfig TrainConfig::FromJson(std::string_view text) {
  return ParseConfig(text, [](const json &j) { return TrainFromJson(j); });
}

std::string ExperimentConfig::ToJson() const {
  json j = {{"name", name},
            {"ensemble_size", ensemble_size},
            {"ensemble_keep", ensemble_keep}};
  if (enode) j["enode"] = TrainToJson(*enode);
  if (coref) j["coref"] = TrainToJson(*coref);
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::FromJson(std::string_view text) {
  return ParseConfig(text, [](const json &j) {
    ExperimentConfig c;
    internal::Read(j, "name", c.name);
    internal::Read(j, "ensemble_size", c.ensemble_size);
    internal::Read(j, "ensemble_keep", c.ensemble_keep);
    if (j.contains("enode")) c.enode = TrainFromJson(j["enode"]);
    if (j.contains("coref")) c.coref = TrainFromJson(j["coref"]);
    // A bare training config is an experiment of one stage.
    if (!c.enode && !c.coref && j.contains("stage")) {
      TrainConfig t = TrainFromJson(j);
      (t.stage == Stage::kEmptyNodes ? c.enode : c.coref) = t;
      if (c.name.empty()) c.name = t.name;
    }
    if (!c.enode && !c.coref) throw DataError("experiment trains nothing");
    if (c.enode && c.enode->stage != Stage::kEmptyNodes) {
      throw DataError("'enode' config must have stage 'enode'");
    }
    if (c.coref && c.coref->stage != Stage::kCoreference) {
      throw DataError("'coref' config must have stage 'coref'");
    }
    if (c.ensemble_size < 1 || c.ensemble_keep < 1 ||
        c.ensemble_keep > c.ensemble_size) {
      throw DataError("need 1 <= ensemble_keep <= ensemble_size");
    }
    if (c.name.empty()) c.name = "experiment";
    return c;
  });
}

namespace {

std::vector<std::string> SharedTaskIds() {
  std::vector<std::string> ids;
  for (const DatasetInfo &d : SharedTaskDatasets()) ids.push_back(d.id);
  return ids;
}

// Stage 1 recipe: Adam, 20 epochs of 5000 batches of 64 sentences, peak
// 1e-5 reached after the first epoch.
TrainConfig EnodeRecipe(int batch_size) {
  TrainConfig c;
  c.name = "enode";
  c.stage = Stage::kEmptyNodes;
  c.datasets = SharedTaskIds();
  c.epochs = 20;
  c.batches_per_epoch = 5000;
  c.batch_size = batch_size;
  c.peak_lr = 1e-5;
  c.optimizer = "adam";
  c.dropout = 0.5;
  return c;
}

// Stage 2 recipe: AdaFactor, 15 epochs of 10k batches, 10% warmup.
TrainConfig CorefRecipe(Variant variant, int batch_size, double lr) {
  TrainConfig c;
  c.name = "coref";
  c.variant = variant;
  c.datasets = SharedTaskIds();
  c.epochs = 15;
  c.batches_per_epoch = 10000;
  c.batch_size = batch_size;
  c.peak_lr = lr;
  c.optimizer = "adafactor";
  return c;
}

TrainConfig ToyConfig(Stage stage, Variant variant) {
  TrainConfig c;
  c.name = StageName(stage);
  c.stage = stage;
  c.variant = variant;
  c.datasets = SyntheticDatasets();
  if (stage == Stage::kEmptyNodes) c.datasets = {"xa_syn", "xb_syn"};
  c.epochs = 5;
  c.batches_per_epoch = 100;
  // The toy encoder has no pretraining, so it needs far larger batches than
  // the pretrained recipes to learn links within 500 steps.
  const bool enode = stage == Stage::kEmptyNodes;
  c.batch_size = enode ? 32 : 128;
  c.peak_lr = enode ? 1e-2 : 2e-2;
  c.warmup_fraction = 0.1;
  c.max_len = 128;
  c.inference_max_len = 256;
  // Without right context the current sentence ends the window, which is
  // the only cue a from-scratch encoder has for where the queries are.
  c.lookahead = 0;
  c.optimizer = "adam";
  c.seed = 1;
  c.encoder_config.hidden = 32;
  c.encoder_config.layers = 2;
  c.encoder_config.heads = 4;
  c.encoder_config.ffn = 64;
  c.encoder_config.max_distance = 32;
  c.encoder_config.dropout = 0.0;
  c.head_hidden = 64;
  c.antecedent_dim = 32;
  c.dropout = enode ? 0.1 : 0.0;
  c.tokenizer = "hash:4:4096";
  return c;
}

}  // namespace

std::vector<std::string> PresetNames() {
  return {"toy-two-stage", "toy-one-stage", "enode-baseline", "enode-improved",
          "base",          "large",         "xl",             "xxl",
          "one-stage-xxl", "ensemble-xxl"};
}

ExperimentConfig Preset(const std::string &name) {
  ExperimentConfig e;
  e.name = name;
  if (name == "toy-two-stage") {
    e.enode = ToyConfig(Stage::kEmptyNodes, Variant::kTwoStage);
    e.coref = ToyConfig(Stage::kCoreference, Variant::kTwoStage);
  } else if (name == "toy-one-stage") {
    e.coref = ToyConfig(Stage::kCoreference, Variant::kOneStage);
  } else if (name == "enode-baseline") {
    e.enode = EnodeRecipe(64);
  } else if (name == "enode-improved") {
    e.enode = EnodeRecipe(384);
  } else if (name == "base" || name == "large") {
    e.enode = EnodeRecipe(64);
    e.coref = CorefRecipe(Variant::kTwoStage, 8, 6e-4);
  } else if (name == "xl" || name == "xxl") {
    e.enode = EnodeRecipe(64);
    e.coref = CorefRecipe(Variant::kTwoStage, 6, 5e-4);
  } else if (name == "one-stage-xxl") {
    e.coref = CorefRecipe(Variant::kOneStage, 6, 5e-4);
  } else if (name == "ensemble-xxl") {
    e.enode = EnodeRecipe(64);
    e.coref = CorefRecipe(Variant::kTwoStage, 6, 5e-4);
    e.ensemble_size = 10;
    e.ensemble_keep = 7;
  } else {
    std::string list;
    for (const std::string &p : PresetNames()) list += "\n  " + p;
    throw DataError("unknown preset '" + name + "'; available presets:" + list);
  }
  return e;
}

double LearningRate(int step, const TrainConfig &config) {
  const int total = config.total_steps();
  const int warmup = config.warmup_steps();
  step = std::clamp(step, 0, total);
  if (step < warmup) return config.peak_lr * step / warmup;
  const int decay = total - warmup;
  if (decay <= 0) return config.peak_lr;
  const double progress = static_cast<double>(step - warmup) / decay;
  return config.peak_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

SamplingPlan::SamplingPlan(std::vector<std::string> ids,
                           std::vector<double> probabilities)
    : ids_(std::move(ids)), probabilities_(std::move(probabilities)) {
  double sum = 0;
  for (double p : probabilities_) cumulative_.push_back(sum += p);
}

double SamplingPlan::Probability(const std::string &id) const {
  auto it = std::find(ids_.begin(), ids_.end(), id);
  return it == ids_.end() ? 0.0 : probabilities_[it - ids_.begin()];
}

int SamplingPlan::Sample(std::mt19937_64 &rng) const {
  const double u =
      std::uniform_real_distribution<double>(0.0, cumulative_.back())(rng);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min<int>(it - cumulative_.begin(), cumulative_.size() - 1);
}

SamplingPlan BuildSampler(
    const std::vector<std::pair<std::string, int64_t>> &datasets) {
  if (datasets.empty()) throw DataError("no datasets to sample from");
  std::vector<std::string> ids;
  std::vector<double> weights;
  double total = 0;
  for (const auto &[id, size] : datasets) {
    if (size < 1) {
      throw DataError("dataset '" + id + "' has no training sentences");
    }
    ids.push_back(id);
    weights.push_back(std::sqrt(static_cast<double>(size)));
    total += weights.back();
  }
  for (double &w : weights) w /= total;
  return SamplingPlan(std::move(ids), std::move(weights));
}

std::vector<std::string> ZeroShotFilter(const std::vector<std::string> &datasets,
                                        const std::string &language) {
  std::vector<std::string> kept;
  for (const std::string &id : datasets) {
    if (LanguageOf(id) != language) kept.push_back(id);
  }
  if (kept.empty()) {
    throw DataError("excluding language '" + language + "' leaves no datasets");
  }
  return kept;
}

std::vector<int> SelectBest(const std::vector<ModelScore> &models, int k) {
  std::vector<int> order(models.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (models[a].score != models[b].score) return models[a].score > models[b].score;
    return models[a].seed < models[b].seed;
  });
  order.resize(std::clamp<size_t>(k, 0, order.size()));
  return order;
}

fs::path ResolveDataRoot(const std::string &flag) {
  if (!flag.empty()) return flag;
  if (const char *env = std::getenv("COREFPIPE_DATA_ROOT"); env && *env) {
    return env;
  }
  throw DataError(
      "no data root: pass --data-root or set COREFPIPE_DATA_ROOT "
      "(`corefpipe prep --synthetic DIR` creates a bundled corpus)");
}

std::vector<Document> LoadCorpus(const fs::path &root,
                                 const std::vector<std::string> &datasets,
                                 const std::string &split) {
  std::vector<std::string> missing;
  for (const std::string &id : datasets) {
    if (!fs::is_regular_file(DatasetFile(root, id, split))) missing.push_back(id);
  }
  if (!missing.empty()) {
    std::string message = "missing " + split + " data under " + root.string() +
                          "; expected dataset directories:";
    for (const std::string &id : missing) {
      message += "\n  " + DatasetFile(root, id, split).string();
    }
    throw DataError(message);
  }
  std::vector<Document> docs;
  for (const std::string &id : datasets) {
    const fs::path path = DatasetFile(root, id, split);
    std::vector<Document> part;
    try {
      part = ParseConllu(ReadFile(path), id);
    } catch (const ParseError &e) {
      throw ParseError(path.string() + ": " + e.what(), e.line());
    }
    for (Document &doc : part) docs.push_back(std::move(doc));
  }
  return docs;
}

EmptyNodeModelConfig MakeEmptyNodeConfig(const TrainConfig &config,
                                         const std::vector<Document> &train) {
  EmptyNodeModelConfig c;
  c.encoder = config.encoder_config;
  c.tokenizer = config.tokenizer;
  c.encoder.vocab_size = HashTokenizer::FromReference(c.tokenizer).vocab_size();
  c.candidate_hidden = config.head_hidden;
  c.candidate_dim = config.encoder_config.hidden;
  c.head_hidden = config.head_hidden;
  c.word_order_dim = config.antecedent_dim;
  c.dropout = config.dropout;
  c.max_len = config.max_len;
  c.vocab = EmptyNodeVocabulary::Build(train);
  return c;
}

CorefModelConfig MakeCorefConfig(const TrainConfig &config,
                                 const std::vector<Document> &train) {
  CorefModelConfig c;
  c.variant = config.variant;
  c.encoder = config.encoder_config;
  c.tokenizer = config.tokenizer;
  c.encoder.vocab_size = HashTokenizer::FromReference(c.tokenizer).vocab_size();
  c.tag_hidden = config.head_hidden;
  c.antecedent_hidden = config.head_hidden;
  c.antecedent_dim = config.antecedent_dim;
  c.dropout = config.dropout;
  c.train_max_len = config.max_len;
  c.inference_max_len = config.inference_max_len;
  c.lookahead = config.lookahead;
  if (config.variant == Variant::kOneStage) {
    std::set<std::string> deprels;
    for (const Document &doc : train) {
      for (const LinkMention &m : OneStageView(doc).mentions) {
        if (m.zero()) deprels.insert(m.deprel);
      }
    }
    c.deprels.assign(deprels.begin(), deprels.end());
  }
  return c;
}

std::vector<Document> PipelineInput(const std::vector<Document> &gold) {
  std::vector<Document> input;
  for (const Document &doc : gold) {
    Document surface = StripEmptyNodes(doc).doc;
    surface.entities.clear();
    for (Sentence &s : surface.sentences) {
      for (Token &t : s.tokens) t.entity_misc_index = -1;
    }
    input.push_back(std::move(surface));
  }
  return input;
}

namespace {

// Applies the configured language exclusions.
std::vector<std::string> TrainingDatasets(const TrainConfig &config) {
  std::vector<std::string> ids = config.datasets;
  for (const std::string &language : config.excluded_languages) {
    ids = ZeroShotFilter(ids, language);
  }
  return ids;
}

// Documents of the configured datasets left after the language
// exclusions. An empty dataset list admits every dataset of `train`.
std::vector<Document> TrainingDocuments(const TrainConfig &config,
                                        const std::vector<Document> &train) {
  std::vector<std::string> ids = config.datasets;
  if (ids.empty()) {
    for (const Document &doc : train) {
      if (std::find(ids.begin(), ids.end(), doc.dataset_id) == ids.end()) {
        ids.push_back(doc.dataset_id);
      }
    }
  }
  if (!ids.empty()) {
    for (const std::string &language : config.excluded_languages) {
      ids = ZeroShotFilter(ids, language);
    }
  }
  std::vector<Document> kept;
  for (const Document &doc : train) {
    if (std::find(ids.begin(), ids.end(), doc.dataset_id) != ids.end()) {
      kept.push_back(doc);
    }
  }
  return kept;
}

// Examples grouped by dataset, in the order of first appearance.
template <typename Example>
struct GroupedExamples {
  std::vector<std::string> ids;
  std::vector<std::vector<Example>> examples;

  std::vector<Example> &For(const std::string &id) {
    auto it = std::find(ids.begin(), ids.end(), id);
    if (it != ids.end()) return examples[it - ids.begin()];
    ids.push_back(id);
    return examples.emplace_back();
  }
};

class TrainLog {
 public:
  TrainLog(const fs::path &run_dir, Stage stage) : stage_(StageName(stage)) {
    if (run_dir.empty()) return;
    fs::create_directories(run_dir);
    const fs::path path = run_dir / "log.tsv";
    const bool fresh = !fs::exists(path);
    out_.open(path, std::ios::app);
    if (!out_) throw DataError("cannot write " + path.string());
    if (fresh) out_ << "stage\tstep\tlr\tloss\n";
  }

  void Write(int step, double lr, double loss) {
    if (!out_.is_open()) return;
    char line[128];
    std::snprintf(line, sizeof(line), "%s\t%d\t%.6g\t%.6f\n", stage_.c_str(),
                  step, lr, loss);
    out_ << line;
  }

 private:
  std::string stage_;
  std::ofstream out_;
};

// Shared optimization loop: every step draws `batch_size` examples, sums
// their gradients, averages them and applies one optimizer update with the
// learning rate of the next step.
template <typename Model, typename Example>
void Optimize(const TrainConfig &config, Model &model,
              GroupedExamples<Example> &data, const TrainOptions &options) {
  std::vector<std::pair<std::string, int64_t>> sizes;
  std::vector<int> groups;
  for (size_t i = 0; i < data.ids.size(); ++i) {
    if (data.examples[i].empty()) continue;
    sizes.emplace_back(data.ids[i], data.examples[i].size());
    groups.push_back(i);
  }
  const SamplingPlan plan = BuildSampler(sizes);
  std::unique_ptr<Optimizer> optimizer = MakeOptimizer(config.optimizer);
  std::mt19937_64 rng(config.seed * 0x9E3779B97F4A7C15ULL + 0x5EED);
  TrainLog log(options.run_dir, config.stage);

  int steps = config.total_steps();
  if (options.max_steps > 0) steps = std::min(steps, options.max_steps);
  nn::ParameterStore &params = model.params();
  for (int step = 0; step < steps; ++step) {
    params.ZeroGrad();
    double batch_loss = 0;
    for (int b = 0; b < config.batch_size; ++b) {
      const auto &pool = data.examples[groups[plan.Sample(rng)]];
      const Example &example =
          pool[std::uniform_int_distribution<size_t>(0, pool.size() - 1)(rng)];
      nn::Tape tape(/*with_gradients=*/true, /*training=*/true, &rng);
      nn::Var loss = model.Loss(tape, example);
      if (!std::isfinite(loss.scalar())) {
        throw ModelError("non-finite loss at step " + std::to_string(step + 1));
      }
      tape.Backward(loss);
      batch_loss += loss.scalar();
    }
    const double scale = 1.0 / config.batch_size;
    for (nn::Parameter *p : params.All()) p->grad *= scale;
    const double lr = LearningRate(step + 1, config);
    optimizer->Step(params, lr);
    batch_loss *= scale;
    log.Write(step + 1, lr, batch_loss);
    if (options.on_step && !options.on_step(step + 1, lr, batch_loss)) break;
  }
}

bool HasEmptyNodes(const Document &doc) {
  for (const Sentence &s : doc.sentences) {
    for (const Token &t : s.tokens) {
      if (t.is_empty) return true;
    }
  }
  return false;
}

}  // namespace

std::unique_ptr<EmptyNodeModel> TrainEmptyNodeModel(
    const TrainConfig &config, const std::vector<Document> &train,
    const TrainOptions &options) {
  // Only datasets annotated with empty nodes take part.
  const std::vector<Document> selected = TrainingDocuments(config, train);
  std::set<std::string> annotated;
  for (const Document &doc : selected) {
    if (HasEmptyNodes(doc)) annotated.insert(doc.dataset_id);
  }
  std::vector<Document> docs;
  for (const Document &doc : selected) {
    if (annotated.count(doc.dataset_id)) docs.push_back(doc);
  }
  if (docs.empty()) throw DataError("no training data with empty nodes");

  auto model = std::make_unique<EmptyNodeModel>(MakeEmptyNodeConfig(config, docs),
                                                config.seed);
  GroupedExamples<EmptyNodeExample> data;
  for (const Document &doc : docs) {
    auto &pool = data.For(doc.dataset_id);
    for (EmptyNodeExample &e : model->BuildExamples(doc)) pool.push_back(std::move(e));
  }
  Optimize(config, *model, data, options);
  if (!options.run_dir.empty()) model->Save(options.run_dir / "checkpoints" / "enode");
  return model;
}

std::unique_ptr<CorefModel> TrainCorefModel(const TrainConfig &config,
                                            const std::vector<Document> &train,
                                            const TrainOptions &options) {
  const std::vector<Document> docs = TrainingDocuments(config, train);
  if (docs.empty()) throw DataError("no coreference training data");
  auto model = std::make_unique<CorefModel>(MakeCorefConfig(config, docs),
                                            config.seed);
  GroupedExamples<CorefExample> data;
  for (const Document &doc : docs) {
    const LinkDocument view = config.variant == Variant::kOneStage
                                  ? OneStageView(doc)
                                  : TwoStageView(doc);
    auto &pool = data.For(doc.dataset_id);
    for (CorefExample &e : model->BuildExamples(view, config.max_len)) {
      pool.push_back(std::move(e));
    }
  }
  Optimize(config, *model, data, options);
  if (!options.run_dir.empty()) {
    model->Save(options.run_dir / "checkpoints" /
                ("coref-" + std::to_string(config.seed)));
  }
  return model;
}

namespace {

double AverageConll(const std::vector<ScoreReport> &reports) {
  if (reports.empty()) return 0;
  double sum = 0;
  for (const ScoreReport &r : reports) sum += r.conll;
  return sum / reports.size();
}

std::vector<Document> OfDatasets(const std::vector<Document> &docs,
                                 const std::vector<std::string> &ids) {
  std::vector<Document> kept;
  for (const Document &doc : docs) {
    if (std::find(ids.begin(), ids.end(), doc.dataset_id) != ids.end()) {
      kept.push_back(doc);
    }
  }
  return kept;
}

}  // namespace

ExperimentResult RunExperiment(const ExperimentConfig &config,
                               const fs::path &data_root,
                               const ExperimentOptions &options) {
  const auto started = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.run_dir = options.runs_root / config.name;
  fs::create_directories(result.run_dir / "checkpoints");
  WriteFile(result.run_dir / "config.json", config.ToJson() + "\n");
  fs::remove(result.run_dir / "log.tsv");

  // Resolve datasets and load everything up front so that missing data is
  // reported before any training.
  std::vector<std::string> enode_ids, coref_ids, all_ids;
  if (config.enode) enode_ids = TrainingDatasets(*config.enode);
  if (config.coref) coref_ids = TrainingDatasets(*config.coref);
  for (const auto *ids : {&enode_ids, &coref_ids}) {
    for (const std::string &id : *ids) {
      if (std::find(all_ids.begin(), all_ids.end(), id) == all_ids.end()) {
        all_ids.push_back(id);
      }
    }
  }
  const std::vector<Document> train = LoadCorpus(data_root, all_ids, "train");
  // Held-out languages of a zero-shot run are evaluated too.
  const TrainConfig &main = config.coref ? *config.coref : *config.enode;
  std::vector<std::string> dev_ids = main.datasets;
  if (config.enode && config.coref) {
    for (const std::string &id : config.enode->datasets) {
      if (std::find(dev_ids.begin(), dev_ids.end(), id) == dev_ids.end()) {
        dev_ids.push_back(id);
      }
    }
  }
  const std::vector<Document> dev = LoadCorpus(data_root, dev_ids, "dev");
  const std::vector<Document> dev_input = PipelineInput(dev);
  // Empty nodes are predicted for the datasets annotated with them.
  std::set<std::string> annotated;
  for (const Document &doc : dev) {
    if (HasEmptyNodes(doc)) annotated.insert(doc.dataset_id);
  }
  std::vector<Document> enode_dev;
  for (const Document &doc : dev) {
    if (annotated.count(doc.dataset_id)) enode_dev.push_back(doc);
  }

  auto progress = [&](const std::string &what, int total) -> StepCallback {
    if (options.quiet) return nullptr;
    return [what, total](int step, double lr, double loss) {
      if (step % 50 == 0 || step == total) {
        std::fprintf(stderr, "[%s] step %d/%d lr %.3g loss %.4f\n", what.c_str(),
                     step, total, lr, loss);
      }
      return true;
    };
  };
  auto steps_of = [&](const TrainConfig &c) {
    return options.max_steps > 0 ? std::min(options.max_steps, c.total_steps())
                                 : c.total_steps();
  };

  std::string scores = "model\tseed\tscore\n";
  std::unique_ptr<EmptyNodeModel> enode;
  if (config.enode) {
    TrainOptions train_options{result.run_dir, options.max_steps,
                               progress("enode", steps_of(*config.enode))};
    enode = TrainEmptyNodeModel(*config.enode, OfDatasets(train, enode_ids),
                                train_options);
    std::vector<Document> predicted;
    for (const Document &doc : PipelineInput(enode_dev)) {
      predicted.push_back(enode->PredictDocument(doc));
    }
    result.enode = ScoreEmptyNodes(enode_dev, predicted);
    WriteFile(result.run_dir / "enode_dev.tsv", EnodeTable(*result.enode));
    if (!config.coref) {
      result.members.push_back(
          {"enode", config.enode->seed, result.enode->scores[kDep].f1});
    }
  }

  std::vector<std::unique_ptr<CorefModel>> members;
  if (config.coref) {
    const std::vector<Document> coref_train = OfDatasets(train, coref_ids);
    DecodeOptions decode;
    decode.threads = options.threads;
    decode.empty_node_datasets = annotated;
    for (int m = 0; m < config.ensemble_size; ++m) {
      TrainConfig member = *config.coref;
      member.seed += m;
      TrainOptions train_options{result.run_dir, options.max_steps,
                                 progress("coref", steps_of(member))};
      members.push_back(TrainCorefModel(member, coref_train, train_options));
      const CorefModel *single[] = {members.back().get()};
      const auto predicted = PredictDocuments(enode.get(), single, dev_input, decode);
      const double conll =
          AverageConll(ScoreByDataset(dev, predicted, MatchMode::kHead, false));
      result.members.push_back(
          {"coref-" + std::to_string(member.seed), member.seed, conll});
    }
    result.selected = SelectBest(result.members, config.ensemble_keep);
    std::vector<const CorefModel *> chosen;
    for (int i : result.selected) chosen.push_back(members[i].get());
    const auto predicted = PredictDocuments(enode.get(), chosen, dev_input, decode);
    result.reports = ScoreByDataset(dev, predicted, MatchMode::kHead, false);
    result.conll = AverageConll(result.reports);
    WriteFile(result.run_dir / "dev_report.tsv", ReportTable(result.reports));
    WriteFile(result.run_dir / "dev_predictions.conllu", SerializeConllu(predicted));
  }

  char line[256];
  for (const ModelScore &m : result.members) {
    std::snprintf(line, sizeof(line), "%s\t%llu\t%.4f\n", m.id.c_str(),
                  static_cast<unsigned long long>(m.seed), m.score);
    scores += line;
  }
  if (config.coref && config.ensemble_keep > 1) {
    std::snprintf(line, sizeof(line), "ensemble\t-\t%.4f\n", result.conll);
    scores += line;
  }
  WriteFile(result.run_dir / "dev_scores.tsv", scores);
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                 started)
                       .count();
  return result;
}

}  // namespace corefpipe
