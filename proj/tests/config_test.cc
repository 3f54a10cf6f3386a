// Copyright 2026 The SSGC Authors.
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


#include "ssgc/config.h"

#include <gtest/gtest.h>

#include <set>
#include <string>

#include "ssgc/error.h"
#include "ssgc/pipeline.h"

namespace ssgc {
namespace {

TEST(Config, PipelineDefaultsRoundTrip) {
  const PipelineConfig cfg = PipelineConfig::Default();
  const Json j = ToJson(cfg);
  PipelineConfig back;
  FromJson(j, &back);
  EXPECT_EQ(ToJson(back), j);
  EXPECT_EQ(ToJson(back).dump(), j.dump());
}

TEST(Config, EditedValuesSurvive) {
  PipelineConfig cfg = PipelineConfig::Default();
  cfg.corpus_seed = 99;
  cfg.split.dev = 7;
  cfg.coherence.gcn.hidden = 17;
  cfg.coherence.dgi.batch_size = 3;
  cfg.coherence.perturb.decay_start = 0.5;
  cfg.taggers.coref.mention_loss_weight = 0.25;
  cfg.taggers.shared_encoder = true;
  cfg.schedule.max_epochs = 2;
  cfg.finetune.task = TaggerTask::kSrl;
  cfg.finetune.baseline = RewardBaseline::kMovingAverage;
  cfg.finetune.hill_climbing = false;
  cfg.synth.nouns = {"kettle", "drum"};
  PipelineConfig back = PipelineConfig::Default();
  FromJson(ToJson(cfg), &back);
  EXPECT_EQ(ToJson(back), ToJson(cfg));
  EXPECT_EQ(back.finetune.task, TaggerTask::kSrl);
  EXPECT_EQ(back.synth.nouns.size(), 2u);
}

TEST(Config, PartialObjectKeepsDefaults) {
  PipelineConfig cfg = PipelineConfig::Default();
  FromJson(Json::parse(R"({"finetune": {"lr": 0.001}})"), &cfg);
  EXPECT_DOUBLE_EQ(cfg.finetune.lr, 0.001);
  EXPECT_EQ(cfg.finetune.epochs, FinetuneConfig().epochs);
  EXPECT_EQ(cfg.schedule.max_epochs, PipelineConfig::Default().schedule.max_epochs);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  PipelineConfig cfg;
  EXPECT_THROW(FromJson(Json::parse(R"({"finetun": {}})"), &cfg), ConfigError);
  EXPECT_THROW(FromJson(Json::parse(R"({"finetune": {"learning_rate": 1}})"), &cfg), ConfigError);
  EXPECT_THROW(FromJson(Json::parse(R"({"finetune": {"lr": "fast"}})"), &cfg), ConfigError);
  EXPECT_THROW(FromJson(Json::parse(R"({"finetune": {"task": "multi"}})"), &cfg), ConfigError);
  EXPECT_THROW(FromJson(Json::parse(R"({"finetune": {"baseline": "mean"}})"), &cfg), ConfigError);
  EXPECT_THROW(FromJson(Json::parse(R"({"synth": {"min_sentences": 0}})"), &cfg), ConfigError);
  EXPECT_THROW(FromJson(Json::parse(R"({"taggers": {"coref": {"top_span_ratio": -1}}})"), &cfg),
               ConfigError);
  EXPECT_THROW(FromJson(Json::parse("[1, 2]"), &cfg), ConfigError);
}

TEST(Pipeline, SplitMustFitTheCorpus) {
  PipelineConfig cfg = PipelineConfig::Default();
  cfg.synth.count = cfg.split.total() - 1;
  EXPECT_THROW(ValidatePipelineConfig(cfg), ConfigError);
  cfg = PipelineConfig::Default();
  cfg.split.unlabeled = 0;
  EXPECT_THROW(ValidatePipelineConfig(cfg), ConfigError);
}

TEST(Pipeline, DataSlicesAreDisjointAndUnlabeledIsStripped) {
  PipelineConfig cfg = PipelineConfig::Default();
  cfg.split = {3, 2, 4, 5};
  cfg.synth.count = 14;
  PipelineData d = MakePipelineData(cfg);
  ASSERT_EQ(d.train.size(), 3u);
  ASSERT_EQ(d.dev.size(), 2u);
  ASSERT_EQ(d.coherence.size(), 4u);
  ASSERT_EQ(d.unlabeled.size(), 5u);
  std::set<std::string> ids;
  for (auto *part : {&d.train, &d.dev, &d.coherence, &d.unlabeled})
    for (const Document &doc : *part) ids.insert(doc.id);
  EXPECT_EQ(ids.size(), 14u);
  for (const Document &doc : d.unlabeled) {
    EXPECT_TRUE(doc.clusters.empty());
    EXPECT_FALSE(doc.frames.empty());
    for (const Frame &f : doc.frames) EXPECT_TRUE(f.args.empty());
  }
}

}  // namespace
}  // namespace ssgc
