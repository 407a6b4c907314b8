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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

#include "corefpipe/datasets.h"
#include "corefpipe/errors.h"
#include "corefpipe/optimizer.h"
#include "corefpipe/synthetic.h"

namespace corefpipe {
namespace {

TrainConfig ScheduleConfig(int epochs, int batches, double warmup) {
  TrainConfig c;
  c.epochs = epochs;
  c.batches_per_epoch = batches;
  c.peak_lr = 3e-4;
  c.warmup_fraction = warmup;
  return c;
}

// A tiny coreference recipe for trajectory checks.
TrainConfig TinyCorefConfig() {
  TrainConfig c = *Preset("toy-two-stage").coref;
  c.epochs = 1;
  c.batches_per_epoch = 50;
  c.batch_size = 2;
  c.encoder_config.hidden = 8;
  c.encoder_config.heads = 2;
  c.encoder_config.ffn = 16;
  c.encoder_config.layers = 1;
  c.head_hidden = 8;
  c.antecedent_dim = 8;
  c.max_len = 48;
  c.dropout = 0.1;
  return c;
}

TEST(SamplerTest, SquareRootProportions) {
  SamplingPlan plan = BuildSampler({{"a", 100}, {"b", 400}});
  EXPECT_DOUBLE_EQ(plan.Probability("a"), 1.0 / 3);
  EXPECT_DOUBLE_EQ(plan.Probability("b"), 2.0 / 3);
  EXPECT_DOUBLE_EQ(BuildSampler({{"only", 7}}).Probability("only"), 1.0);
}

TEST(SamplerTest, EmpiricalFrequenciesFollowPlan) {
  SamplingPlan plan = BuildSampler({{"a", 50}, {"b", 200}, {"c", 1000}, {"d", 1}});
  std::mt19937_64 rng(99);
  std::vector<int> counts(4, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[plan.Sample(rng)];
  double sum = 0;
  for (int i = 0; i < 4; ++i) {
    sum += plan.probabilities()[i];
    EXPECT_NEAR(counts[i] / double(draws), plan.probabilities()[i], 0.01) << i;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(SamplerTest, WeightsAreMonotoneInSize) {
  SamplingPlan plan = BuildSampler({{"a", 3}, {"b", 30}, {"c", 300}});
  EXPECT_LT(plan.Probability("a"), plan.Probability("b"));
  EXPECT_LT(plan.Probability("b"), plan.Probability("c"));
}

TEST(SamplerTest, RejectsBadInput) {
  EXPECT_THROW(BuildSampler({}), DataError);
  EXPECT_THROW(BuildSampler({{"a", 0}}), DataError);
}

TEST(ScheduleTest, WarmupThenCosine) {
  TrainConfig c = ScheduleConfig(10, 100, 0.1);
  ASSERT_EQ(c.warmup_steps(), 100);
  EXPECT_EQ(LearningRate(0, c), 0.0);
  EXPECT_DOUBLE_EQ(LearningRate(50, c), c.peak_lr / 2);
  EXPECT_DOUBLE_EQ(LearningRate(100, c), c.peak_lr);
  EXPECT_NEAR(LearningRate(550, c), c.peak_lr / 2, 1e-12);
  EXPECT_NEAR(LearningRate(1000, c), 0.0, 1e-18);
}

TEST(ScheduleTest, ContinuousAndNonNegative) {
  TrainConfig c = ScheduleConfig(3, 333, 0.07);
  const int warmup = c.warmup_steps();
  const double slope = c.peak_lr / warmup;
  EXPECT_NEAR(LearningRate(warmup - 1, c), LearningRate(warmup, c), 1.01 * slope);
  EXPECT_NEAR(LearningRate(warmup + 1, c), LearningRate(warmup, c), 1.01 * slope);
  for (int step = 0; step <= c.total_steps(); ++step) {
    EXPECT_GE(LearningRate(step, c), 0.0);
    EXPECT_LE(LearningRate(step, c), c.peak_lr);
  }
}

TEST(ScheduleTest, StageDefaultWarmup) {
  TrainConfig enode = ScheduleConfig(20, 5000, -1);
  enode.stage = Stage::kEmptyNodes;
  EXPECT_EQ(enode.warmup_steps(), 5000);
  TrainConfig coref = ScheduleConfig(15, 10000, -1);
  coref.stage = Stage::kCoreference;
  EXPECT_EQ(coref.warmup_steps(), 15000);
}

TEST(ZeroShotTest, RemovesOneLanguage) {
  std::vector<std::string> all;
  for (const DatasetInfo &d : SharedTaskDatasets()) all.push_back(d.id);
  ASSERT_EQ(all.size(), 27u);
  auto without_fr = ZeroShotFilter(all, "fr");
  EXPECT_EQ(without_fr.size(), 24u);
  for (const std::string &id : without_fr) EXPECT_NE(LanguageOf(id), "fr");
  EXPECT_EQ(ZeroShotFilter(all, "cs").size(), 24u);
  EXPECT_EQ(ZeroShotFilter(all, "la").size(), 26u);
  EXPECT_EQ(ZeroShotFilter(all, "zz"), all);
  EXPECT_EQ(ZeroShotFilter({"cs_pdt", "cs_pcedt", "en_gum"}, "cs"),
            (std::vector<std::string>{"en_gum"}));
  EXPECT_THROW(ZeroShotFilter({"cs_pdt"}, "cs"), DataError);
}

TEST(ZeroShotTest, EveryLanguageOfTheTable) {
  std::vector<std::string> all;
  std::map<std::string, int> per_language;
  for (const DatasetInfo &d : SharedTaskDatasets()) {
    all.push_back(d.id);
    ++per_language[d.language];
  }
  EXPECT_EQ(per_language.size(), 19u);
  for (const auto &[language, count] : per_language) {
    auto kept = ZeroShotFilter(all, language);
    EXPECT_EQ(all.size() - kept.size(), static_cast<size_t>(count)) << language;
    for (const std::string &id : kept) EXPECT_NE(LanguageOf(id), language);
  }
}

TEST(SelectBestTest, Examples) {
  std::vector<ModelScore> models = {{"m1", 1, 3}, {"m2", 2, 1}, {"m3", 3, 2}};
  EXPECT_EQ(SelectBest(models, 2), (std::vector<int>{0, 2}));
  EXPECT_EQ(SelectBest(models, 3).size(), 3u);
  EXPECT_EQ(SelectBest(models, 10).size(), 3u);
  std::vector<ModelScore> tied = {{"a", 5, 70}, {"b", 2, 70}, {"c", 9, 70}};
  EXPECT_EQ(SelectBest(tied, 1), (std::vector<int>{1}));
  EXPECT_EQ(SelectBest(tied, 3), (std::vector<int>{1, 0, 2}));
}

TEST(PresetTest, FullScaleRecipes) {
  struct Row {
    const char *name;
    int batch;
    double lr;
  };
  for (Row row : {Row{"base", 8, 6e-4}, Row{"large", 8, 6e-4}, Row{"xl", 6, 5e-4},
                  Row{"xxl", 6, 5e-4}}) {
    ExperimentConfig e = Preset(row.name);
    ASSERT_TRUE(e.coref.has_value()) << row.name;
    EXPECT_EQ(e.coref->batch_size, row.batch) << row.name;
    EXPECT_DOUBLE_EQ(e.coref->peak_lr, row.lr) << row.name;
    EXPECT_EQ(e.coref->epochs, 15);
    EXPECT_EQ(e.coref->batches_per_epoch, 10000);
    EXPECT_EQ(e.coref->warmup_steps(), 15000);
  }
  ExperimentConfig baseline = Preset("enode-baseline");
  ASSERT_TRUE(baseline.enode.has_value());
  EXPECT_EQ(baseline.enode->epochs, 20);
  EXPECT_EQ(baseline.enode->batches_per_epoch, 5000);
  EXPECT_EQ(baseline.enode->batch_size, 64);
  EXPECT_DOUBLE_EQ(baseline.enode->peak_lr, 1e-5);
  EXPECT_EQ(baseline.enode->warmup_steps(), 5000);
  ExperimentConfig improved = Preset("enode-improved");
  EXPECT_EQ(improved.enode->batch_size, 384);
  // The improved recipe differs only in batch size.
  TrainConfig same = *improved.enode;
  same.batch_size = 64;
  same.name = baseline.enode->name;
  EXPECT_EQ(same, *baseline.enode);
  ExperimentConfig ensemble = Preset("ensemble-xxl");
  EXPECT_EQ(ensemble.ensemble_size, 10);
  EXPECT_EQ(ensemble.ensemble_keep, 7);
  EXPECT_EQ(Preset("one-stage-xxl").coref->variant, Variant::kOneStage);
}

TEST(PresetTest, UnknownPresetListsNames) {
  try {
    Preset("gigantic");
    FAIL() << "expected DataError";
  } catch (const DataError &e) {
    for (const std::string &name : PresetNames()) {
      EXPECT_NE(std::string(e.what()).find(name), std::string::npos) << name;
    }
  }
}

TEST(ConfigTest, JsonRoundTrip) {
  for (const std::string &name : PresetNames()) {
    ExperimentConfig e = Preset(name);
    ExperimentConfig back = ExperimentConfig::FromJson(e.ToJson());
    EXPECT_EQ(back.ToJson(), e.ToJson()) << name;
    if (e.coref) {
      EXPECT_EQ(*back.coref, *e.coref);
    }
    if (e.enode) {
      EXPECT_EQ(*back.enode, *e.enode);
    }
  }
  EXPECT_THROW(TrainConfig::FromJson("{\"epochs\": \"many\"}"), DataError);
  EXPECT_THROW(TrainConfig::FromJson("[1, 2"), DataError);
}

TEST(OptimizerTest, FirstStepsFollowTheirRules) {
  for (const char *name : {"sgd", "adam", "adafactor"}) {
    nn::ParameterStore store;
    nn::Parameter &p = store.Add("p", nn::Matrix::Constant(1, 3, 1.0));
    p.grad << 2.0, -0.5, 0.0;
    auto optimizer = MakeOptimizer(name);
    optimizer->Step(store, 0.1);
    if (std::string(name) == "sgd") {
      EXPECT_NEAR(p.value(0, 0), 0.8, 1e-12);
      EXPECT_NEAR(p.value(0, 1), 1.05, 1e-12);
    } else {
      // Both normalize the first gradient elementwise.
      EXPECT_NEAR(p.value(0, 0), 0.9, 1e-6) << name;
      EXPECT_NEAR(p.value(0, 1), 1.1, 1e-6) << name;
    }
    EXPECT_NEAR(p.value(0, 2), 1.0, 1e-6) << name;
  }
  EXPECT_THROW(MakeOptimizer("lion"), DataError);
}

TEST(OptimizerTest, AllMinimizeAQuadratic) {
  for (const char *name : {"sgd", "adam", "adafactor"}) {
    nn::ParameterStore store;
    nn::Parameter &p = store.Add("p", nn::Matrix::Constant(2, 2, 3.0));
    auto optimizer = MakeOptimizer(name);
    for (int step = 0; step < 400; ++step) {
      p.grad = 2 * p.value;  // gradient of the squared norm
      optimizer->Step(store, 0.05 * (1.0 - step / 400.0));
    }
    EXPECT_LT(p.value.norm(), 0.5) << name;
  }
}

TEST(TrainingTest, LossTrajectoryIsDeterministic) {
  auto train = GenerateSynthetic("xa_syn", 6, 1);
  auto more = GenerateSynthetic("xc_syn", 4, 1);
  train.insert(train.end(), more.begin(), more.end());
  auto run = [&]() {
    std::vector<double> losses;
    TrainOptions options;
    options.on_step = [&](int, double, double loss) {
      losses.push_back(loss);
      return true;
    };
    TrainCorefModel(TinyCorefConfig(), train, options);
    return losses;
  };
  std::vector<double> first = run();
  ASSERT_EQ(first.size(), 50u);
  EXPECT_EQ(first, run());
  for (double loss : first) EXPECT_TRUE(std::isfinite(loss));
}

TEST(TrainingTest, LossDecreasesOnTinyData) {
  auto train = GenerateSynthetic("xc_syn", 4, 1);
  TrainConfig c = TinyCorefConfig();
  c.epochs = 4;
  c.peak_lr = 1e-2;
  c.dropout = 0;
  std::vector<double> losses;
  TrainOptions options;
  options.on_step = [&](int, double, double loss) {
    losses.push_back(loss);
    return true;
  };
  TrainCorefModel(c, train, options);
  ASSERT_EQ(losses.size(), 200u);
  double early = 0, late = 0;
  for (int i = 0; i < 20; ++i) {
    early += losses[i];
    late += losses[losses.size() - 1 - i];
  }
  EXPECT_LT(late, 0.5 * early);
}

TEST(TrainingTest, CallbackCanStopAndMaxStepsTruncates) {
  auto train = GenerateSynthetic("xc_syn", 2, 1);
  int calls = 0;
  TrainOptions options;
  options.on_step = [&](int step, double, double) {
    ++calls;
    return step < 5;
  };
  TrainCorefModel(TinyCorefConfig(), train, options);
  EXPECT_EQ(calls, 5);
  calls = 0;
  options.on_step = [&](int, double, double) { return ++calls > 0; };
  options.max_steps = 7;
  TrainCorefModel(TinyCorefConfig(), train, options);
  EXPECT_EQ(calls, 7);
}

TEST(TrainingTest, EmptyNodeStageTrainsOnlyAnnotatedDatasets) {
  auto train = GenerateSynthetic("xa_syn", 3, 1);
  auto plain = GenerateSynthetic("xc_syn", 3, 1);
  train.insert(train.end(), plain.begin(), plain.end());
  TrainConfig c = *Preset("toy-two-stage").enode;
  c.datasets = {"xa_syn", "xc_syn"};
  c.epochs = 1;
  c.batches_per_epoch = 2;
  c.batch_size = 2;
  auto model = TrainEmptyNodeModel(c, train);
  EXPECT_EQ(model->vocab().datasets.count("xa_syn"), 1u);
  EXPECT_EQ(model->vocab().datasets.count("xc_syn"), 0u);
}

TEST(TrainingTest, ZeroShotConfigExcludesLanguage) {
  auto train = GenerateSynthetic("xa_syn", 2, 1);
  auto other = GenerateSynthetic("xc_syn", 2, 1);
  train.insert(train.end(), other.begin(), other.end());
  TrainConfig c = TinyCorefConfig();
  c.batches_per_epoch = 1;
  c.datasets = {"xa_syn", "xc_syn"};
  c.excluded_languages = {"xa"};
  EXPECT_NO_THROW(TrainCorefModel(c, train));
  c.excluded_languages = {"xa", "xc"};
  EXPECT_THROW(TrainCorefModel(c, train), DataError);
}

TEST(DataRootTest, FlagThenEnvironment) {
  EXPECT_EQ(ResolveDataRoot("/some/where"), "/some/where");
  setenv("COREFPIPE_DATA_ROOT", "/from/env", 1);
  EXPECT_EQ(ResolveDataRoot(""), "/from/env");
  unsetenv("COREFPIPE_DATA_ROOT");
  EXPECT_THROW(ResolveDataRoot(""), DataError);
}

TEST(DataRootTest, MissingFilesAreNamed) {
  try {
    LoadCorpus("/nonexistent", {"xa_syn"}, "train");
    FAIL() << "expected DataError";
  } catch (const DataError &e) {
    EXPECT_NE(std::string(e.what()).find("xa_syn-corefud-train.conllu"),
              std::string::npos);
  }
}

TEST(PipelineInputTest, StripsNodesAndEntities) {
  auto gold = GenerateSynthetic("xa_syn", 3, 1);
  for (const Document &doc : PipelineInput(gold)) {
    EXPECT_TRUE(doc.entities.empty());
    for (const Sentence &s : doc.sentences) {
      for (const Token &t : s.tokens) EXPECT_FALSE(t.is_empty);
    }
  }
}

}  // namespace
}  // namespace corefpipe
