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

#include "ssgc/rl.h"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fixtures.h"
#include "gradcheck.h"
#include "ssgc/error.h"
#include "ssgc/ssg.h"

namespace ssgc {
namespace {

TaggerConfig TinyTaggers(double ratio = 0.4) {
  TaggerConfig c;
  c.encoder.token_dim = 6;
  c.encoder.context_hidden = 4;
  c.coref.mention_hidden = 6;
  c.coref.pair_hidden = 6;
  c.coref.top_span_ratio = ratio;
  c.srl.hidden = 6;
  return c;
}

struct World {
  std::vector<Document> docs;
  Taggers taggers;
  ParamStore store;

  explicit World(std::vector<Document> d, TaggerConfig cfg = TinyTaggers(), uint64_t seed = 1)
      : docs(std::move(d)), taggers(cfg, Vocabulary::Build(docs)) {
    Rng rng = MakeRng(seed);
    taggers.InitParams(store, rng);
  }
};

CoherenceModel SmallCoherence(const std::vector<Document> &docs, uint64_t seed) {
  EncoderConfig ec;
  ec.token_dim = 8;
  ec.context_hidden = 6;
  TokenEncoder enc("encoder", ec, Vocabulary::Build(docs));
  ParamStore params;
  Rng rng = MakeRng(seed);
  enc.InitParams(params, rng);
  CoherenceConfig cfg;
  cfg.gcn.hidden = 12;
  cfg.gcn.type_dim = 6;
  cfg.epochs = 2;
  cfg.dgi.epochs = 1;
  return TrainCoherence(docs, enc, params, cfg, seed).model;
}

TEST(Episode, FigureOneCorefHasFourActions) {
  World s({testing::NadineDocument()});
  Rng rng = MakeRng(2);
  Episode e = SampleEpisode(s.taggers, s.store, s.store, s.docs[0], TaggerTask::kCoref, rng);
  ASSERT_EQ(e.mentions.size(), 4u);
  EXPECT_EQ(e.actions.size(), 4u);
  double total = 0.0;
  for (const Action &a : e.actions) {
    EXPECT_EQ(a.task, TaggerTask::kCoref);
    EXPECT_TRUE(std::isfinite(a.log_prob));
    EXPECT_LE(a.log_prob, 0.0);
    total += a.log_prob;
  }
  EXPECT_LE(total, 0.0);
  EXPECT_NO_THROW(Validate(e.predicted));
}

TEST(Episode, GreedyReproducesPrediction) {
  auto docs = SynthesizeCorpus(SynthConfig::Default(), 3);
  docs.resize(6);
  World s(docs, TinyTaggers(1.0));
  // Sharper distributions so that greedy choices are not uniform ties.
  for (double &v : s.store.get("srl/w_out").data) v *= 100.0;
  for (const Document &d : s.docs) {
    const Document expect = s.taggers.Predict(s.store, d);
    for (TaggerTask task : {TaggerTask::kCoref, TaggerTask::kSrl}) {
      Rng rng = MakeRng(4);
      Episode e = SampleEpisode(s.taggers, s.store, s.store, d, task, rng, /*greedy=*/true);
      EXPECT_EQ(e.predicted, expect) << TaggerTaskName(task);
    }
  }
}

TEST(Episode, SrlActionsSkipPredicates) {
  World s({testing::NadineDocument()});
  Rng rng = MakeRng(5);
  Episode e = SampleEpisode(s.taggers, s.store, s.store, s.docs[0], TaggerTask::kSrl, rng);
  // (4 - 1) + (6 - 1) (predicate, token) pairs; 8 distinct tokens.
  EXPECT_EQ(ActionCount(e, false), 8);
  EXPECT_EQ(ActionCount(e, true), 8);
  for (const Action &a : e.actions) {
    EXPECT_EQ(a.task, TaggerTask::kSrl);
    EXPECT_NE(a.token, 1);
    EXPECT_NE(a.token, 5);
    EXPECT_LE(a.log_prob, 0.0);
  }
  EXPECT_NO_THROW(Validate(e.predicted));
}

TEST(Episode, PerTokenCountMergesPredicates) {
  Document d;
  d.id = "two";
  d.sentences = {{"Kim", "saw", "Lee", "leave"}};
  d.frames = {{{1, 1}, {{"ARG0", {0, 0}}}}, {{3, 3}, {{"ARG0", {2, 2}}}}};
  World s({d});
  Rng rng = MakeRng(6);
  Episode e = SampleEpisode(s.taggers, s.store, s.store, d, TaggerTask::kSrl, rng);
  EXPECT_EQ(ActionCount(e, false), 6);
  EXPECT_EQ(ActionCount(e, true), 4);
}

TEST(Episode, OneTaskPerEpisode) {
  auto docs = SynthesizeCorpus(SynthConfig::Default(), 7);
  docs.resize(5);
  TaggerConfig cfg = TinyTaggers();
  cfg.shared_encoder = true;
  World s(docs, cfg);
  Rng rng = MakeRng(7);
  for (const Document &d : docs) {
    for (TaggerTask task : {TaggerTask::kCoref, TaggerTask::kSrl}) {
      Episode e = SampleEpisode(s.taggers, s.store, s.store, d, task, rng);
      for (const Action &a : e.actions) EXPECT_EQ(a.task, task);
    }
  }
  EXPECT_THROW(SampleEpisode(s.taggers, s.store, s.store, docs[0], TaggerTask::kMulti, rng),
               ConfigError);
}

TEST(Episode, FrozenCounterpartSuppliesOtherHalf) {
  World s({testing::NadineDocument()});
  ParamStore frozen = s.store.CopyValues();
  for (double &v : s.store.get("srl/b_out").data) v = 0.0;
  s.store.get("srl/b_out").data[0] = 100.0;  // the policy's own SRL would tag all O
  Rng rng = MakeRng(8);
  Episode e = SampleEpisode(s.taggers, s.store, frozen, s.docs[0], TaggerTask::kCoref, rng);
  EXPECT_EQ(e.predicted.frames, s.taggers.srl().Predict(frozen, s.docs[0]).decoded);
}

TEST(Episode, DescribeCorefAction) {
  World s({testing::NadineDocument()});
  Rng rng = MakeRng(9);
  Episode e = SampleEpisode(s.taggers, s.store, s.store, s.docs[0], TaggerTask::kCoref, rng);
  EXPECT_EQ(DescribeAction(e, e.actions[0], s.docs[0]).find("→ε") != std::string::npos, true);
}

// ---------------------------------------------------------------------------

TEST(Reinforce, SurrogateGradCheck) {
  World s({testing::NadineDocument()}, TinyTaggers(0.5), 10);
  for (const char *n : {"coref/encoder/emb", "srl/encoder/emb"}) {
    for (double &v : s.store.get(n).data) v *= 50.0;
  }
  for (double &v : s.store.get("srl/w_out").data) v *= 30.0;
  for (TaggerTask task : {TaggerTask::kCoref, TaggerTask::kSrl}) {
    Rng rng = MakeRng(11);
    Episode e = SampleEpisode(s.taggers, s.store, s.store, s.docs[0], task, rng);
    auto r = testing::GradCheck(
        s.store, [&](Tape &t) { return ReinforceSurrogate(t, s.taggers, s.store, s.docs[0], e, 0.7); },
        s.store.names_with_prefix(task == TaggerTask::kCoref ? "coref/" : "srl/"),
        task == TaggerTask::kCoref ? 1e-6 : 1e-5, 25);
    EXPECT_LT(r.max_rel_error, 1e-4) << TaggerTaskName(task) << " " << r.worst;
  }
}

TEST(Reinforce, UniformCreditScalesOneGradient) {
  World s({testing::NadineDocument()});
  Rng rng = MakeRng(12);
  Episode e = SampleEpisode(s.taggers, s.store, s.store, s.docs[0], TaggerTask::kCoref, rng);
  Tape t1, t2;
  Gradients g1 = t1.Backward(ReinforceSurrogate(t1, s.taggers, s.store, s.docs[0], e, 1.0));
  Gradients g2 = t2.Backward(ReinforceSurrogate(t2, s.taggers, s.store, s.docs[0], e, -0.3));
  for (const auto &[name, g] : g1.all()) {
    for (size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g2.at(name).data[i], -0.3 * g.data[i], 1e-12);
  }
}

TEST(Reinforce, RewardAtBaselineLeavesParameters) {
  auto docs = SynthesizeCorpus(SynthConfig::Default(), 13);
  docs.resize(4);
  World s(docs);
  const ParamStore before = s.store.CopyValues();
  FinetuneConfig cfg;
  cfg.baseline = RewardBaseline::kMovingAverage;
  BaselineState baseline{true, 0.5};
  for (int step = 0; step < 5; ++step) {
    std::vector<const Document *> ds;
    std::vector<Episode> eps;
    for (const Document &d : docs) {
      Rng rng = MakeRng(13, step);
      ds.push_back(&d);
      eps.push_back(SampleEpisode(s.taggers, s.store, s.store, d, TaggerTask::kCoref, rng));
    }
    UpdateStats st = ApplyReinforce(s.taggers, s.store, ds, eps, std::vector<double>(4, 0.5), cfg,
                                    baseline);
    EXPECT_FALSE(st.stepped);
    for (double c : st.coefficients) EXPECT_EQ(c, 0.0);
  }
  for (const auto &name : before.names()) EXPECT_EQ(s.store.get(name), before.get(name)) << name;
}

TEST(Reinforce, MovingAverageCentersFirstBatch) {
  auto docs = SynthesizeCorpus(SynthConfig::Default(), 14);
  docs.resize(3);
  World s(docs);
  FinetuneConfig cfg;
  cfg.baseline = RewardBaseline::kMovingAverage;
  BaselineState baseline;
  std::vector<const Document *> ds;
  std::vector<Episode> eps;
  Rng rng = MakeRng(14);
  for (const Document &d : docs) {
    ds.push_back(&d);
    eps.push_back(SampleEpisode(s.taggers, s.store, s.store, d, TaggerTask::kCoref, rng));
  }
  UpdateStats st = ApplyReinforce(s.taggers, s.store, ds, eps, {0.2, 0.5, 0.8}, cfg, baseline);
  EXPECT_NEAR(st.coefficients[0] + st.coefficients[1] + st.coefficients[2], 0.0, 1e-12);
  EXPECT_NEAR(baseline.value, 0.5, 1e-12);
  st = ApplyReinforce(s.taggers, s.store, ds,
                      {SampleEpisode(s.taggers, s.store, s.store, docs[0], TaggerTask::kCoref, rng),
                       SampleEpisode(s.taggers, s.store, s.store, docs[1], TaggerTask::kCoref, rng),
                       SampleEpisode(s.taggers, s.store, s.store, docs[2], TaggerTask::kCoref, rng)},
                      {1.0, 1.0, 1.0}, cfg, baseline);
  EXPECT_NEAR(st.coefficients[0], 0.5, 1e-12);
  EXPECT_NEAR(baseline.value, 0.9 * 0.5 + 0.1 * 1.0, 1e-12);
}

TEST(Reinforce, NoBaselineUsesRawReward) {
  World s({testing::NadineDocument()});
  Rng rng = MakeRng(15);
  Episode e = SampleEpisode(s.taggers, s.store, s.store, s.docs[0], TaggerTask::kCoref, rng);
  BaselineState b;
  UpdateStats st = ApplyReinforce(s.taggers, s.store, {&s.docs[0]}, {e}, {0.7}, FinetuneConfig{}, b);
  EXPECT_EQ(st.coefficients, (std::vector<double>{0.7}));
  EXPECT_TRUE(st.stepped);
  EXPECT_DOUBLE_EQ(st.mean_reward, 0.7);
}

TEST(Reinforce, BernoulliBandit) {
  ParamStore store;
  store.Add("logits", Tensor::Zeros(1, 2));
  Rng rng = MakeRng(16);
  for (int step = 0; step < 500; ++step) {
    Tape tape;
    Var lp = tape.LogSoftmaxRows(tape.Param(store, "logits"));
    const Tensor &v = tape.value(lp);
    const int a = SampleIndex(rng, {std::exp(v.data[0]), std::exp(v.data[1])});
    const double reward = a == 1 ? 1.0 : 0.0;
    AdamStep(store, tape.Backward(PolicyGradientLoss(tape, {tape.Pick(lp, 0, a)}, reward)),
             3e-4 * 100, 0.0);
  }
  const Tensor &l = store.get("logits");
  const double p1 = 1.0 / (1.0 + std::exp(l.data[0] - l.data[1]));
  EXPECT_GT(p1, 0.99);
}

TEST(Reinforce, PolicyGradientLossGradCheck) {
  ParamStore store;
  Rng rng = MakeRng(17);
  store.Add("logits", Tensor::Gaussian(2, 3, 1.0, rng));
  auto r = testing::GradCheck(store, [&](Tape &t) {
    Var lp = t.LogSoftmaxRows(t.Param(store, "logits"));
    return PolicyGradientLoss(t, {t.Pick(lp, 0, 2), t.Pick(lp, 1, 0)}, 0.8);
  });
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
}

// ---------------------------------------------------------------------------

TEST(Finetune, HillClimbingNeverRegresses) {
  auto docs = SynthesizeCorpus(SynthConfig::Default(), 18);
  std::vector<Document> dev(docs.begin(), docs.begin() + 8);
  std::vector<Document> unlabeled;
  for (size_t i = 8; i < 24; ++i) unlabeled.push_back(StripAnnotations(docs[i]));
  World s(docs, TinyTaggers(0.3));
  CoherenceModel coherence = SmallCoherence(std::vector<Document>(docs.begin() + 24, docs.begin() + 40), 18);
  FinetuneConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 4;
  cfg.lr = 1e-2;
  FinetuneResult r = Finetune(s.taggers, s.store, unlabeled, dev, coherence, cfg, 3);
  ASSERT_EQ(r.trace.size(), 8u);
  double incumbent = r.baseline_metric;
  for (const auto &row : r.trace) {
    EXPECT_EQ(row.accepted, row.dev_metric > incumbent);
    if (row.accepted) incumbent = row.dev_metric;
    EXPECT_GT(row.mean_reward, 0.0);
    EXPECT_LT(row.mean_reward, 1.0);
  }
  EXPECT_EQ(incumbent, r.best_metric);
  EXPECT_GE(r.best_metric, r.baseline_metric);
  EXPECT_DOUBLE_EQ(DevMetric(s.taggers, s.store, dev, TaggerTask::kCoref), r.best_metric);

  std::ostringstream csv;
  WriteTraceCsv(r, csv);
  EXPECT_EQ(csv.str().rfind("batch,mean_reward,dev_metric,accepted\n", 0), 0u);
}

TEST(Finetune, Errors) {
  World s({testing::NadineDocument()});
  CoherenceModel coherence;
  FinetuneConfig cfg;
  EXPECT_THROW(Finetune(s.taggers, s.store, {}, s.docs, coherence, cfg, 1), ValidationError);
  cfg.task = TaggerTask::kMulti;
  EXPECT_THROW(ValidateFinetuneConfig(cfg), ConfigError);
  cfg = FinetuneConfig{};
  cfg.lr = 0.0;
  EXPECT_THROW(ValidateFinetuneConfig(cfg), ConfigError);
  EXPECT_EQ(ParseRewardBaseline(RewardBaselineName(RewardBaseline::kMovingAverage)),
            RewardBaseline::kMovingAverage);
  EXPECT_THROW(ParseRewardBaseline("critic"), ConfigError);
}

TEST(ScoreUnlabeled, IsTheComposition) {
  auto docs = SynthesizeCorpus(SynthConfig::Default(), 19);
  docs.resize(10);
  World s(docs);
  CoherenceModel coherence = SmallCoherence(docs, 19);
  Document nadine = testing::NadineDocument();
  for (const Document &d : {docs[0], docs[1], nadine}) {
    const double v = ScoreUnlabeled(s.taggers, s.store, d, coherence);
    const Document pred = s.taggers.Predict(s.store, d);
    EXPECT_EQ(v, coherence.Score(BuildSsg(pred), pred));
    EXPECT_EQ(v, ScoreUnlabeled(s.taggers, s.store, d, coherence));
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

}  // namespace
}  // namespace ssgc
