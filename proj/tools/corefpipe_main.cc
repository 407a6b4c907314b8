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

// corefpipe command-line tool.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 model error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "corefpipe/checkpoint.h"
#include "corefpipe/conllu.h"
#include "corefpipe/datasets.h"
#include "corefpipe/empty_node_scorer.h"
#include "corefpipe/errors.h"
#include "corefpipe/pipeline.h"
#include "corefpipe/scorer.h"
#include "corefpipe/synthetic.h"
#include "corefpipe/training.h"

namespace fs = std::filesystem;
using namespace corefpipe;

namespace {

constexpr int kUsage = 1;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flags understood by every command.
struct CommonFlags {
  std::string config;
  std::string data_root;
  std::optional<uint64_t> seed;
  int max_len = 0;
  std::string device = "cpu";
  double threshold = 0.5;

  void Add(CLI::App *app) {
    app->add_option("--config", config, "JSON configuration file");
    app->add_option("--data-root", data_root,
                    "Dataset root, overrides $COREFPIPE_DATA_ROOT");
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--max-len", max_len,
                    "Segment length in subwords (0: model or config default)");
    app->add_option("--device", device, "Compute device; only 'cpu' is available")
        ->capture_default_str();
    app->add_option("--threshold", threshold,
                    "Empty node existence probability threshold")
        ->capture_default_str();
  }

  void Check() const {
    if (device != "cpu") {
      throw UsageError("device '" + device + "' is not available; use --device cpu");
    }
    if (threshold < 0 || threshold > 1) {
      throw UsageError("--threshold must lie in [0, 1]");
    }
    if (max_len < 0) throw UsageError("--max-len must be non-negative");
  }
};

// Dataset id of a CorefUD file named "<id>-corefud-<split>.conllu".
std::string DatasetOfPath(const fs::path &path) {
  const std::string stem = path.stem().string();
  const auto cut = stem.find("-corefud");
  return cut == std::string::npos ? "" : stem.substr(0, cut);
}

std::vector<Document> ReadDocuments(const fs::path &path, std::string dataset) {
  if (dataset.empty()) dataset = DatasetOfPath(path);
  try {
    return ParseConllu(ReadFile(path), dataset);
  } catch (const ParseError &e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

ExperimentConfig LoadExperiment(const std::string &config_path,
                                const std::string &preset) {
  if (!config_path.empty()) {
    return ExperimentConfig::FromJson(ReadFile(config_path));
  }
  const auto names = PresetNames();
  if (std::find(names.begin(), names.end(), preset) == names.end()) {
    std::string list;
    for (const std::string &p : names) list += "\n  " + p;
    throw UsageError("unknown preset '" + preset + "'; available presets:" + list);
  }
  return Preset(preset);
}

void ApplyOverrides(TrainConfig &config, const CommonFlags &flags) {
  if (flags.seed) config.seed = *flags.seed;
  if (flags.max_len > 0) config.max_len = flags.max_len;
}

// ---------------------------------------------------------------- prep

struct PrepFlags {
  std::string synthetic_dir;
  int dev_documents = SyntheticCorpusOptions{}.dev_documents;
  std::string input, output, dataset;
  bool surface = false;
  std::vector<std::string> stats_inputs;
};

int RunPrepSynthetic(const CommonFlags &common, const PrepFlags &flags) {
  SyntheticCorpusOptions options;
  options.seed = common.seed.value_or(1);
  options.dev_documents = flags.dev_documents;
  WriteSyntheticCorpus(flags.synthetic_dir, options);
  for (const std::string &id : SyntheticDatasets()) {
    std::printf("%s\n%s\n", DatasetFile(flags.synthetic_dir, id, "train").c_str(),
                DatasetFile(flags.synthetic_dir, id, "dev").c_str());
  }
  return 0;
}

int RunPrepStrip(const PrepFlags &flags) {
  std::vector<Document> docs = ReadDocuments(flags.input, flags.dataset);
  std::vector<Document> out;
  if (flags.surface) {
    out = PipelineInput(docs);
  } else {
    for (const Document &doc : docs) out.push_back(StripEmptyNodes(doc).doc);
  }
  WriteFile(flags.output, SerializeConllu(out));
  return 0;
}

int RunPrepStats(const PrepFlags &flags) {
  std::printf("file\tdocuments\tsentences\twords\tempty_nodes\tmentions\tentities\n");
  for (const std::string &path : flags.stats_inputs) {
    long sentences = 0, words = 0, empties = 0, mentions = 0, entities = 0;
    const auto docs = ReadDocuments(path, flags.dataset);
    for (const Document &doc : docs) {
      sentences += doc.sentences.size();
      for (const Sentence &s : doc.sentences) {
        for (const Token &t : s.tokens) (t.is_empty ? empties : words)++;
      }
      entities += doc.entities.size();
      for (const Entity &e : doc.entities) mentions += e.mentions.size();
    }
    std::printf("%s\t%zu\t%ld\t%ld\t%ld\t%ld\t%ld\n", path.c_str(), docs.size(),
                sentences, words, empties, mentions, entities);
  }
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainFlags {
  std::string stage = "coref";
  std::string preset = "toy-two-stage";
  std::string output;
  int steps = 0;
};

int RunTrain(const CommonFlags &common, const TrainFlags &flags) {
  ExperimentConfig experiment = LoadExperiment(common.config, flags.preset);
  std::optional<TrainConfig> config;
  if (flags.stage == "enode") {
    config = experiment.enode;
  } else if (flags.stage == "coref" || flags.stage == "one_stage") {
    config = experiment.coref;
    if (!config && flags.stage == "one_stage") config = Preset("toy-one-stage").coref;
    if (config && flags.stage == "one_stage") config->variant = Variant::kOneStage;
  } else {
    throw UsageError("unknown stage '" + flags.stage + "' (enode, coref, one_stage)");
  }
  if (!config) {
    throw DataError("configuration '" + experiment.name + "' has no " + flags.stage +
                    " stage");
  }
  ApplyOverrides(*config, common);
  const fs::path root = ResolveDataRoot(common.data_root);
  std::vector<std::string> ids = config->datasets;
  for (const std::string &language : config->excluded_languages) {
    ids = ZeroShotFilter(ids, language);
  }
  const auto train = LoadCorpus(root, ids, "train");

  TrainOptions options;
  options.run_dir = flags.output.empty() ? fs::path("runs") / experiment.name
                                         : fs::path(flags.output);
  options.max_steps = flags.steps;
  const int total = flags.steps > 0 ? std::min(flags.steps, config->total_steps())
                                    : config->total_steps();
  options.on_step = [total](int step, double lr, double loss) {
    if (step % 50 == 0 || step == total) {
      std::fprintf(stderr, "step %d/%d lr %.3g loss %.4f\n", step, total, lr, loss);
    }
    return true;
  };
  fs::create_directories(options.run_dir / "checkpoints");
  WriteFile(options.run_dir / "config.json", config->ToJson() + "\n");
  if (config->stage == Stage::kEmptyNodes) {
    TrainEmptyNodeModel(*config, train, options);
    std::printf("%s\n", (options.run_dir / "checkpoints" / "enode").c_str());
  } else {
    TrainCorefModel(*config, train, options);
    std::printf("%s\n", (options.run_dir / "checkpoints" /
                         ("coref-" + std::to_string(config->seed)))
                            .c_str());
  }
  return 0;
}

// ---------------------------------------------------------------- predict

struct PredictFlags {
  std::string input, output, dataset, enode;
  std::vector<std::string> coref;
  std::vector<double> scores;
  int keep = 0;
  int threads = 1;
  bool force_none = false;
  bool enode_all = false;
};

std::vector<Document> Predict(const CommonFlags &common, const PredictFlags &flags,
                              const std::vector<std::string> &coref_paths) {
  // All checkpoints are loaded and checked before any input is processed.
  std::unique_ptr<EmptyNodeModel> enode;
  if (!flags.enode.empty()) enode = EmptyNodeModel::Load(flags.enode);
  std::vector<std::unique_ptr<CorefModel>> models;
  std::vector<const CorefModel *> members;
  for (const std::string &path : coref_paths) {
    models.push_back(CorefModel::Load(path));
    members.push_back(models.back().get());
  }
  const auto docs = ReadDocuments(flags.input, flags.dataset);
  DecodeOptions options;
  options.max_len = common.max_len;
  options.threshold = common.threshold;
  options.force_none = flags.force_none;
  options.threads = flags.threads;
  options.empty_nodes_everywhere = flags.enode_all;
  if (members.empty()) {
    if (!enode) throw UsageError("give --coref and/or --enode checkpoints");
    std::vector<Document> out;
    for (const Document &doc : docs) out.push_back(enode->PredictDocument(doc, common.threshold));
    return out;
  }
  return PredictDocuments(enode.get(), members, docs, options);
}

int RunPredict(const CommonFlags &common, const PredictFlags &flags) {
  if (fs::exists(flags.output) && fs::equivalent(flags.input, flags.output)) {
    throw UsageError("--output must differ from --input");
  }
  WriteFile(flags.output, SerializeConllu(Predict(common, flags, flags.coref)));
  return 0;
}

int RunEnsemble(const CommonFlags &common, const PredictFlags &flags) {
  std::vector<std::string> chosen = flags.coref;
  if (!flags.scores.empty()) {
    if (flags.scores.size() != flags.coref.size()) {
      throw UsageError("give one --score per --coref checkpoint");
    }
    std::vector<ModelScore> scored;
    for (size_t i = 0; i < flags.coref.size(); ++i) {
      scored.push_back({flags.coref[i], i, flags.scores[i]});
    }
    const int keep = flags.keep > 0 ? flags.keep : flags.coref.size();
    chosen.clear();
    for (int i : SelectBest(scored, keep)) {
      chosen.push_back(flags.coref[i]);
      std::fprintf(stderr, "selected %s (%.2f)\n", flags.coref[i].c_str(),
                   flags.scores[i]);
    }
  } else if (flags.keep > 0 && flags.keep < static_cast<int>(chosen.size())) {
    throw UsageError("--keep needs --score values to rank the models");
  }
  WriteFile(flags.output, SerializeConllu(Predict(common, flags, chosen)));
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateFlags {
  std::string gold, pred, dataset;
  std::string match = "head";
  bool singletons = false;
  bool empty_nodes = false;
  std::string external_scorer;
};

std::string ShellQuote(const std::string &arg) {
  std::string quoted = "'";
  for (char c : arg) {
    if (c == '\'') {
      quoted += "'\\''";
    } else {
      quoted += c;
    }
  }
  return quoted + "'";
}

// Runs `scorer GOLD PRED` and returns its standard output.
std::string RunExternalScorer(const EvaluateFlags &flags) {
  const std::string command = ShellQuote(flags.external_scorer) + " " +
                              ShellQuote(flags.gold) + " " + ShellQuote(flags.pred);
  FILE *pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) throw DataError("cannot run " + flags.external_scorer);
  std::string output;
  char buffer[4096];
  while (size_t n = std::fread(buffer, 1, sizeof(buffer), pipe)) output.append(buffer, n);
  const int status = pclose(pipe);
  if (status != 0) {
    throw DataError("external scorer " + flags.external_scorer + " failed with status " +
                    std::to_string(status));
  }
  return output;
}

int RunEvaluate(const EvaluateFlags &flags) {
  const auto gold = ReadDocuments(flags.gold, flags.dataset);
  const auto pred = ReadDocuments(flags.pred, flags.dataset);
  if (flags.empty_nodes) {
    std::fputs(EnodeTable(ScoreEmptyNodes(gold, pred)).c_str(), stdout);
    return 0;
  }
  MatchMode mode;
  try {
    mode = ParseMatchMode(flags.match);
  } catch (const Error &e) {
    throw UsageError(e.what());
  }
  std::fputs(ReportTable(ScoreByDataset(gold, pred, mode, flags.singletons)).c_str(),
             stdout);
  if (!flags.external_scorer.empty()) {
    const std::string external = RunExternalScorer(flags);
    std::printf("\n# external scorer\n%s", external.c_str());
    if (!external.empty() && external.back() != '\n') std::printf("\n");
    // The CorefUD scorer prints "CoNLL score: <value>" for the whole file.
    std::smatch match;
    static const std::regex kConll(R"(conll[ _-]?score:?\s*([0-9]+(\.[0-9]+)?))",
                                   std::regex::icase);
    if (std::regex_search(external, match, kConll)) {
      const double theirs = std::stod(match[1]);
      const double ours = Score(gold, pred, mode, flags.singletons).conll;
      std::printf("conll_internal\t%.2f\nconll_external\t%.2f\nconll_diff\t%+.2f\n", ours,
                  theirs, ours - theirs);
    } else {
      std::printf("conll_diff\tunavailable (no CoNLL score in external output)\n");
    }
  }
  return 0;
}

// ---------------------------------------------------------------- zshot

struct ZshotFlags {
  std::string preset = "xxl";
  std::string out_dir = "zshot";
  std::vector<std::string> languages;
};

int RunZshot(const CommonFlags &common, const ZshotFlags &flags) {
  const ExperimentConfig base = LoadExperiment(common.config, flags.preset);
  std::vector<std::string> datasets = base.coref ? base.coref->datasets
                                                 : base.enode->datasets;
  std::vector<std::string> languages = flags.languages;
  if (languages.empty()) {
    std::set<std::string> seen;
    for (const std::string &id : datasets) {
      if (seen.insert(LanguageOf(id)).second) languages.push_back(LanguageOf(id));
    }
  }
  fs::create_directories(flags.out_dir);
  std::printf("language\tremoved\tremaining\tconfig\n");
  for (const std::string &language : languages) {
    ExperimentConfig config = base;
    config.name = base.name + "-zshot-" + language;
    for (auto *stage : {&config.enode, &config.coref}) {
      if (!*stage) continue;
      (*stage)->excluded_languages.push_back(language);
      if (common.seed) (*stage)->seed = *common.seed;
      // Validates that something remains.
      ZeroShotFilter((*stage)->datasets, language);
    }
    const auto kept = ZeroShotFilter(datasets, language);
    const fs::path path = fs::path(flags.out_dir) / (config.name + ".json");
    WriteFile(path, config.ToJson() + "\n");
    std::printf("%s\t%zu\t%zu\t%s\n", language.c_str(), datasets.size() - kept.size(),
                kept.size(), path.c_str());
  }
  return 0;
}

// ---------------------------------------------------------------- experiment

struct ExperimentFlags {
  std::string preset;
  std::string runs = "runs";
  int max_steps = 0;
  int threads = 1;
  bool quiet = false;
};

int RunExperimentCommand(const CommonFlags &common, const ExperimentFlags &flags) {
  if (flags.preset.empty() && common.config.empty()) {
    std::string list;
    for (const std::string &p : PresetNames()) list += "\n  " + p;
    throw UsageError("give a preset or --config; available presets:" + list);
  }
  ExperimentConfig config = LoadExperiment(common.config, flags.preset);
  for (auto *stage : {&config.enode, &config.coref}) {
    if (*stage) ApplyOverrides(**stage, common);
  }
  const fs::path root = ResolveDataRoot(common.data_root);
  ExperimentOptions options;
  options.runs_root = flags.runs;
  options.max_steps = flags.max_steps;
  options.threads = flags.threads;
  options.quiet = flags.quiet;
  const ExperimentResult result = RunExperiment(config, root, options);
  if (result.enode) std::fputs(EnodeTable(*result.enode).c_str(), stdout);
  if (!result.reports.empty()) {
    std::fputs(ReportTable(result.reports).c_str(), stdout);
    std::printf("dev_conll_head\t%.2f\n", result.conll);
  }
  std::printf("run_dir\t%s\nseconds\t%.1f\n", result.run_dir.c_str(), result.seconds);
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"corefpipe: multilingual coreference resolution with empty nodes"};
  app.require_subcommand(1);
  CommonFlags common;

  // prep
  PrepFlags prep;
  CLI::App *prep_cmd = app.add_subcommand("prep", "Prepare data: synthetic corpus, strip, stats");
  prep_cmd->require_subcommand(1);
  common.Add(prep_cmd);
  CLI::App *synthetic_cmd =
      prep_cmd->add_subcommand("synthetic", "Write the bundled synthetic corpus");
  synthetic_cmd->add_option("dir", prep.synthetic_dir, "Output data root")->required();
  synthetic_cmd->add_option("--dev-documents", prep.dev_documents,
                            "Dev documents per dataset")
      ->capture_default_str();
  common.Add(synthetic_cmd);
  CLI::App *strip_cmd =
      prep_cmd->add_subcommand("strip", "Remove empty nodes from a CoNLL-U file");
  strip_cmd->add_option("input", prep.input, "Input CoNLL-U")->required()->check(CLI::ExistingFile);
  strip_cmd->add_option("output", prep.output, "Output CoNLL-U")->required();
  strip_cmd->add_flag("--surface", prep.surface,
                      "Also remove coreference, giving pipeline input");
  strip_cmd->add_option("--dataset", prep.dataset, "Dataset id of the input");
  common.Add(strip_cmd);
  CLI::App *stats_cmd = prep_cmd->add_subcommand("stats", "Corpus statistics");
  stats_cmd->add_option("inputs", prep.stats_inputs, "CoNLL-U files")
      ->required()
      ->check(CLI::ExistingFile);
  stats_cmd->add_option("--dataset", prep.dataset, "Dataset id of the inputs");
  common.Add(stats_cmd);

  // train
  TrainFlags train;
  CLI::App *train_cmd = app.add_subcommand("train", "Train one model");
  train_cmd->add_option("--stage", train.stage, "enode, coref or one_stage")
      ->capture_default_str();
  train_cmd->add_option("--preset", train.preset,
                        "Preset providing the stage config when --config is absent")
      ->capture_default_str();
  train_cmd->add_option("--output", train.output, "Run directory (default runs/<name>)");
  train_cmd->add_option("--steps", train.steps, "Stop after this many steps (0: all)");
  common.Add(train_cmd);

  // predict and ensemble
  PredictFlags predict;
  CLI::App *predict_cmd = app.add_subcommand(
      "predict", "Predict empty nodes and coreference of a CoNLL-U file");
  CLI::App *ensemble_cmd = app.add_subcommand(
      "ensemble", "Predict with the best k of several coreference models");
  for (CLI::App *cmd : {predict_cmd, ensemble_cmd}) {
    cmd->add_option("--input", predict.input, "Input CoNLL-U")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--output", predict.output, "Output CoNLL-U")->required();
    cmd->add_option("--enode", predict.enode, "Empty node model checkpoint");
    cmd->add_option("--coref", predict.coref,
                    "Coreference checkpoint; repeat to ensemble");
    cmd->add_option("--dataset", predict.dataset,
                    "Dataset id (default: from a <id>-corefud-*.conllu file name)");
    cmd->add_option("--threads", predict.threads, "Worker threads")->capture_default_str();
    cmd->add_flag("--force-none", predict.force_none,
                  "One-stage models: predict no zero mentions");
    cmd->add_flag("--enode-all", predict.enode_all,
                  "Predict empty nodes for every dataset, not only those the "
                  "empty node model was trained on");
    common.Add(cmd);
  }
  ensemble_cmd->add_option("--score", predict.scores,
                           "Dev score of each --coref checkpoint, in order");
  ensemble_cmd->add_option("--keep", predict.keep, "Number of best models to keep");

  // evaluate
  EvaluateFlags evaluate;
  CLI::App *evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against gold data");
  evaluate_cmd->add_option("--gold", evaluate.gold, "Gold CoNLL-U")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--pred", evaluate.pred, "Predicted CoNLL-U")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--match", evaluate.match, "exact, head or partial")
      ->capture_default_str();
  evaluate_cmd->add_flag("--singletons", evaluate.singletons, "Score singleton entities");
  evaluate_cmd->add_flag("--empty-nodes", evaluate.empty_nodes,
                         "Report intrinsic empty node metrics instead");
  evaluate_cmd->add_option("--dataset", evaluate.dataset, "Dataset id of both files");
  evaluate_cmd->add_option("--external-scorer", evaluate.external_scorer,
                           "Also run this scorer as 'SCORER GOLD PRED' and report the "
                           "difference of CoNLL scores");
  common.Add(evaluate_cmd);

  // zshot
  ZshotFlags zshot;
  CLI::App *zshot_cmd =
      app.add_subcommand("zshot", "Write zero-shot configs excluding one language each");
  zshot_cmd->add_option("--preset", zshot.preset, "Base preset when --config is absent")
      ->capture_default_str();
  zshot_cmd->add_option("--out-dir", zshot.out_dir, "Directory for the configs")
      ->capture_default_str();
  zshot_cmd->add_option("--languages", zshot.languages,
                        "Languages to hold out (default: all in the config)")
      ->delimiter(',');
  common.Add(zshot_cmd);

  // experiment
  ExperimentFlags experiment;
  CLI::App *experiment_cmd = app.add_subcommand(
      "experiment", "Train, predict and score the dev data of a preset");
  experiment_cmd->add_option("preset", experiment.preset, "Preset name");
  experiment_cmd->add_option("--runs", experiment.runs, "Root of run directories")
      ->capture_default_str();
  experiment_cmd->add_option("--max-steps", experiment.max_steps,
                             "Stop each stage after this many steps (0: all)");
  experiment_cmd->add_option("--threads", experiment.threads, "Prediction threads")
      ->capture_default_str();
  experiment_cmd->add_flag("--quiet", experiment.quiet, "No progress output");
  common.Add(experiment_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? 0 : kUsage;
  }

  try {
    common.Check();
    if (*prep_cmd) {
      if (*synthetic_cmd) return RunPrepSynthetic(common, prep);
      if (*strip_cmd) return RunPrepStrip(prep);
      return RunPrepStats(prep);
    }
    if (*train_cmd) return RunTrain(common, train);
    if (*predict_cmd) return RunPredict(common, predict);
    if (*ensemble_cmd) return RunEnsemble(common, predict);
    if (*evaluate_cmd) return RunEvaluate(evaluate);
    if (*zshot_cmd) return RunZshot(common, zshot);
    if (*experiment_cmd) return RunExperimentCommand(common, experiment);
  } catch (const UsageError &e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const ModelError &e) {
    std::fprintf(stderr, "model error: %s\n", e.what());
    return 3;
  } catch (const Error &e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const std::filesystem::filesystem_error &e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  }
  return kUsage;
}
