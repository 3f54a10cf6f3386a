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

#ifndef SSGC_RL_H_
#define SSGC_RL_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "ssgc/coherence.h"
#include "ssgc/corpus.h"
#include "ssgc/optim.h"
#include "ssgc/rng.h"
#include "ssgc/taggers.h"

namespace ssgc {

enum class RewardBaseline { kNone, kMovingAverage };

RewardBaseline ParseRewardBaseline(const std::string &name);
std::string RewardBaselineName(RewardBaseline b);

struct FinetuneConfig {
  double lr = 3e-4;
  int epochs = 10;
  int batch_size = 8;
  TaggerTask task = TaggerTask::kCoref;
  RewardBaseline baseline = RewardBaseline::kNone;
  double baseline_momentum = 0.9;
  // Kept at zero so that a zero coefficient leaves parameters untouched.
  double weight_decay = 0.0;
  // Off keeps every update (ablation only).
  bool hill_climbing = true;
};

// Task must be coref or srl; lr > 0; epochs, batch_size >= 1.
void ValidateFinetuneConfig(const FinetuneConfig &cfg);

// One sampled decision. Coreference: the antecedent column `choice` (0 is the
// empty antecedent) of kept mention `mention`. SRL: label `label` for document
// token `token` under frame `frame`.
struct Action {
  TaggerTask task = TaggerTask::kCoref;
  int mention = -1;
  int choice = 0;
  int frame = -1;
  int token = -1;
  int label = -1;
  double log_prob = 0.0;
};

struct Episode {
  Document predicted;
  std::vector<Action> actions;
  // Coreference only: kept mentions and their candidate lists.
  std::vector<Span> mentions;
  std::vector<std::vector<int>> antecedents;
};

// Samples the task's decisions from `policy`; the other task's annotations
// come from argmax decoding under `frozen`. With `greedy` every decision is
// the argmax (constrained Viterbi for SRL), reproducing Taggers::Predict.
// SRL predicate tokens are fixed to O and are not actions.
Episode SampleEpisode(const Taggers &taggers, const ParamStore &policy, const ParamStore &frozen,
                      const Document &doc, TaggerTask task, Rng &rng, bool greedy = false);

// "She→Nadine" style description; SRL actions print "token:label".
std::string DescribeAction(const Episode &e, const Action &a, const Document &doc);

// Actions counted per (predicate, token) pair, or once per token when
// `per_token` (the log-probability total is the same either way).
int ActionCount(const Episode &e, bool per_token);

// -coefficient * sum of `log_probs` (each 1x1 or a matrix to be summed).
Var PolicyGradientLoss(Tape &tape, const std::vector<Var> &log_probs, double coefficient);

// -coefficient * sum of the episode's action log-probabilities under the
// current `store`.
Var ReinforceSurrogate(Tape &tape, const Taggers &taggers, const ParamStore &store,
                       const Document &doc, const Episode &e, double coefficient);

struct BaselineState {
  bool initialized = false;
  double value = 0.0;
};

struct UpdateStats {
  double mean_reward = 0.0;
  std::vector<double> rewards;
  // Reward minus baseline, shared by every action of the episode.
  std::vector<double> coefficients;
  bool stepped = false;
};

// One Adam step on the batch mean of the surrogates, given the rewards.
UpdateStats ApplyReinforce(const Taggers &taggers, ParamStore &store,
                           const std::vector<const Document *> &docs,
                           const std::vector<Episode> &episodes,
                           const std::vector<double> &rewards, const FinetuneConfig &cfg,
                           BaselineState &baseline);

// Rewards each episode with the coherence score of its predicted graph.
UpdateStats ReinforceUpdate(const Taggers &taggers, ParamStore &store,
                            const std::vector<const Document *> &docs,
                            const std::vector<Episode> &episodes,
                            const CoherenceModel &coherence, const FinetuneConfig &cfg,
                            BaselineState &baseline);

double EpisodeReward(const Episode &e, const CoherenceModel &coherence);

struct FinetuneTraceRow {
  int batch = 0;
  double mean_reward = 0.0;
  double dev_metric = 0.0;
  bool accepted = false;
};

struct FinetuneResult {
  double baseline_metric = 0.0;
  double best_metric = 0.0;
  std::vector<FinetuneTraceRow> trace;
};

// Policy-gradient fine-tuning of one task with hill climbing: after every
// batch the dev metric is measured and the update is kept only on a strict
// improvement, otherwise parameters and optimizer state are reset to the
// incumbent. `store` ends at the incumbent.
FinetuneResult Finetune(const Taggers &taggers, ParamStore &store,
                        const std::vector<Document> &unlabeled, const std::vector<Document> &dev,
                        const CoherenceModel &coherence, const FinetuneConfig &cfg,
                        uint64_t seed);

void WriteTraceCsv(const FinetuneResult &result, std::ostream &out);

// Coherence score of the graph built from the taggers' predictions.
double ScoreUnlabeled(const Taggers &taggers, const ParamStore &store, const Document &doc,
                      const CoherenceModel &coherence);

}  // namespace ssgc

#endif  // SSGC_RL_H_
