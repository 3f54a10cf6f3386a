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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>

#include "ssgc/error.h"
#include "ssgc/ssg.h"

namespace ssgc {

RewardBaseline ParseRewardBaseline(const std::string &name) {
  if (name == "none") return RewardBaseline::kNone;
  if (name == "moving-average") return RewardBaseline::kMovingAverage;
  throw ConfigError("unknown baseline '" + name + "' (expected none or moving-average)");
}

std::string RewardBaselineName(RewardBaseline b) {
  return b == RewardBaseline::kNone ? "none" : "moving-average";
}

void ValidateFinetuneConfig(const FinetuneConfig &cfg) {
  if (cfg.task == TaggerTask::kMulti) {
    throw ConfigError("fine-tuning runs one task at a time (coref or srl)");
  }
  if (!(cfg.lr > 0)) throw ConfigError("finetune lr must be > 0");
  if (cfg.epochs < 1 || cfg.batch_size < 1) {
    throw ConfigError("finetune epochs and batch_size must be >= 1");
  }
  if (!(cfg.baseline_momentum >= 0 && cfg.baseline_momentum < 1)) {
    throw ConfigError("finetune baseline_momentum must be in [0, 1)");
  }
  if (cfg.weight_decay < 0) throw ConfigError("finetune weight_decay must be >= 0");
}

namespace {

int Draw(Rng &rng, const std::vector<double> &p, bool greedy) {
  if (greedy) return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
  const int k = SampleIndex(rng, p);
  return k < 0 ? 0 : k;
}

}  // namespace

Episode SampleEpisode(const Taggers &taggers, const ParamStore &policy, const ParamStore &frozen,
                      const Document &doc, TaggerTask task, Rng &rng, bool greedy) {
  if (task == TaggerTask::kMulti) throw ConfigError("an episode samples a single task");
  Episode e;
  e.predicted = Document{doc.id, doc.sentences, {}, {}};
  if (task == TaggerTask::kCoref) {
    Tape tape;
    CorefForward fwd = taggers.coref().Forward(tape, policy, doc);
    e.mentions = fwd.mentions;
    e.antecedents = fwd.antecedents;
    std::vector<int> chosen;
    for (size_t i = 0; i < fwd.mentions.size(); ++i) {
      const Tensor &lp = tape.value(fwd.log_probs[i]);
      std::vector<double> p(lp.data.begin(), lp.data.end());
      for (double &v : p) v = std::exp(v);
      const int c = Draw(rng, p, greedy);
      e.actions.push_back({TaggerTask::kCoref, static_cast<int>(i), c, -1, -1, -1, lp.data[c]});
      chosen.push_back(c == 0 ? -1 : fwd.antecedents[i][c - 1]);
    }
    e.predicted.clusters = ClustersFromAntecedents(fwd.mentions, chosen);
    e.predicted.frames = taggers.srl().Predict(frozen, doc).decoded;
  } else {
    const SrlModel &srl = taggers.srl();
    Tape tape;
    std::vector<SrlFrameForward> fwd = srl.Forward(tape, policy, doc, Predicates(doc));
    SrlPrediction pred = srl.Decode(tape, fwd);
    for (size_t f = 0; f < fwd.size(); ++f) {
      SrlFramePrediction &fp = pred.frames[f];
      const Tensor &lp = tape.value(fwd[f].log_probs);
      for (int t = 0; t < lp.rows(); ++t) {
        const int token = fp.sentence.start + t;
        if (fp.predicate.contains(token)) continue;
        std::vector<double> p(lp.cols());
        for (int l = 0; l < lp.cols(); ++l) p[l] = fp.probs.at(t, l);
        if (!greedy) fp.tags[t] = Draw(rng, p, false);
        e.actions.push_back({TaggerTask::kSrl, -1, 0, static_cast<int>(f), token, fp.tags[t],
                             lp.at(t, fp.tags[t])});
      }
      e.predicted.frames.push_back(srl.ToFrame(fp));
    }
    e.predicted.clusters = taggers.coref().Predict(frozen, doc).clusters;
  }
  Canonicalize(e.predicted);
  Validate(e.predicted);
  return e;
}

std::string DescribeAction(const Episode &e, const Action &a, const Document &doc) {
  const std::vector<std::string> words = doc.tokens();
  auto text = [&](const Span &s) {
    std::string out;
    for (int t = s.start; t <= s.end; ++t) out += (t > s.start ? " " : "") + words[t];
    return out;
  };
  if (a.task == TaggerTask::kCoref) {
    const std::string target =
        a.choice == 0 ? "ε" : text(e.mentions[e.antecedents[a.mention][a.choice - 1]]);
    return text(e.mentions[a.mention]) + "→" + target;
  }
  return words[a.token] + ":" + BioLabels().label(a.label);
}

int ActionCount(const Episode &e, bool per_token) {
  if (!per_token) return static_cast<int>(e.actions.size());
  std::set<std::pair<int, int>> seen;  // (task, token or mention)
  for (const Action &a : e.actions) {
    seen.insert({static_cast<int>(a.task), a.task == TaggerTask::kSrl ? a.token : a.mention});
  }
  return static_cast<int>(seen.size());
}

Var PolicyGradientLoss(Tape &tape, const std::vector<Var> &log_probs, double coefficient) {
  Var total = tape.Constant(Tensor::Zeros(1, 1));
  for (Var lp : log_probs) total = tape.Add(total, tape.Sum(lp));
  return tape.Scale(total, -coefficient);
}

Var ReinforceSurrogate(Tape &tape, const Taggers &taggers, const ParamStore &store,
                       const Document &doc, const Episode &e, double coefficient) {
  std::vector<Var> terms;
  if (e.actions.empty()) return PolicyGradientLoss(tape, terms, coefficient);
  if (e.actions.front().task == TaggerTask::kCoref) {
    CorefForward fwd = taggers.coref().Forward(tape, store, doc);
    if (fwd.mentions != e.mentions) {
      throw ValidationError("episode for '" + doc.id + "' no longer matches the pruned mentions");
    }
    for (const Action &a : e.actions) terms.push_back(tape.Pick(fwd.log_probs[a.mention], 0, a.choice));
  } else {
    std::vector<SrlFrameForward> fwd = taggers.srl().Forward(tape, store, doc, Predicates(doc));
    std::vector<Tensor> masks;
    for (const auto &f : fwd) masks.push_back(Tensor::ZerosLike(tape.value(f.log_probs)));
    for (const Action &a : e.actions) {
      masks[a.frame].at(a.token - fwd[a.frame].sentence.start, a.label) += 1.0;
    }
    // Masked sums: one term per frame holding all of its token actions.
    for (size_t f = 0; f < fwd.size(); ++f) {
      terms.push_back(tape.Mul(fwd[f].log_probs, tape.Constant(std::move(masks[f]))));
    }
  }
  return PolicyGradientLoss(tape, terms, coefficient);
}

double EpisodeReward(const Episode &e, const CoherenceModel &coherence) {
  return coherence.Score(BuildSsg(e.predicted), e.predicted);
}

UpdateStats ApplyReinforce(const Taggers &taggers, ParamStore &store,
                           const std::vector<const Document *> &docs,
                           const std::vector<Episode> &episodes,
                           const std::vector<double> &rewards, const FinetuneConfig &cfg,
                           BaselineState &baseline) {
  if (docs.size() != episodes.size() || rewards.size() != episodes.size()) {
    throw ValidationError("reinforce: documents, episodes and rewards differ in length");
  }
  UpdateStats stats;
  stats.rewards = rewards;
  if (episodes.empty()) return stats;
  stats.mean_reward = std::accumulate(rewards.begin(), rewards.end(), 0.0) / rewards.size();
  double b = 0.0;
  if (cfg.baseline == RewardBaseline::kMovingAverage) {
    b = baseline.initialized ? baseline.value : stats.mean_reward;
  }
  Gradients grads;
  bool any = false;
  for (size_t i = 0; i < episodes.size(); ++i) {
    const double coef = rewards[i] - b;
    stats.coefficients.push_back(coef);
    if (coef == 0.0 || episodes[i].actions.empty()) continue;
    Tape tape;
    Var loss = ReinforceSurrogate(tape, taggers, store, *docs[i], episodes[i], coef);
    grads.Accumulate(tape.Backward(loss));
    any = true;
  }
  if (cfg.baseline == RewardBaseline::kMovingAverage) {
    baseline.value = baseline.initialized ? cfg.baseline_momentum * baseline.value +
                                                (1 - cfg.baseline_momentum) * stats.mean_reward
                                          : stats.mean_reward;
    baseline.initialized = true;
  }
  if (any) {
    grads.Scale(1.0 / episodes.size());
    AdamStep(store, grads, cfg.lr, cfg.weight_decay);
    stats.stepped = true;
  }
  return stats;
}

UpdateStats ReinforceUpdate(const Taggers &taggers, ParamStore &store,
                            const std::vector<const Document *> &docs,
                            const std::vector<Episode> &episodes,
                            const CoherenceModel &coherence, const FinetuneConfig &cfg,
                            BaselineState &baseline) {
  std::vector<double> rewards;
  for (const Episode &e : episodes) rewards.push_back(EpisodeReward(e, coherence));
  return ApplyReinforce(taggers, store, docs, episodes, rewards, cfg, baseline);
}

FinetuneResult Finetune(const Taggers &taggers, ParamStore &store,
                        const std::vector<Document> &unlabeled, const std::vector<Document> &dev,
                        const CoherenceModel &coherence, const FinetuneConfig &cfg,
                        uint64_t seed) {
  ValidateFinetuneConfig(cfg);
  if (unlabeled.empty()) throw ValidationError("fine-tuning needs unlabeled documents");
  FinetuneResult result;
  const ParamStore frozen = store.CopyValues();
  // Supervised moments would shrink the much smaller policy gradients.
  store.ResetOptimizerState();
  ParamStore best = store;
  result.baseline_metric = result.best_metric = DevMetric(taggers, store, dev, cfg.task);
  BaselineState baseline;
  std::vector<size_t> order(unlabeled.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle = MakeRng(seed, 91);
  int batch = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle);
    for (size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const size_t end = std::min(order.size(), begin + cfg.batch_size);
      std::vector<const Document *> docs;
      std::vector<Episode> episodes;
      for (size_t k = begin; k < end; ++k) {
        const Document &doc = unlabeled[order[k]];
        Rng rng = MakeRng(SplitSeed(seed, 1000 + batch), k - begin);
        docs.push_back(&doc);
        episodes.push_back(SampleEpisode(taggers, store, frozen, doc, cfg.task, rng));
      }
      UpdateStats stats = ReinforceUpdate(taggers, store, docs, episodes, coherence, cfg, baseline);
      FinetuneTraceRow row{batch, stats.mean_reward, 0.0, false};
      row.dev_metric = DevMetric(taggers, store, dev, cfg.task);
      if (row.dev_metric > result.best_metric) {
        row.accepted = true;
        result.best_metric = row.dev_metric;
        best = store;
      } else if (cfg.hill_climbing) {
        // Values only; the optimizer moments keep accumulating.
        store.AssignValues(best);
      }
      result.trace.push_back(row);
      ++batch;
    }
  }
  if (cfg.hill_climbing) store.AssignValues(best);
  return result;
}

void WriteTraceCsv(const FinetuneResult &result, std::ostream &out) {
  out << "batch,mean_reward,dev_metric,accepted\n";
  for (const auto &r : result.trace) {
    out << r.batch << ',' << r.mean_reward << ',' << r.dev_metric << ',' << (r.accepted ? 1 : 0)
        << '\n';
  }
}

double ScoreUnlabeled(const Taggers &taggers, const ParamStore &store, const Document &doc,
                      const CoherenceModel &coherence) {
  const Document pred = taggers.Predict(store, doc);
  return coherence.Score(BuildSsg(pred), pred);
}

}  // namespace ssgc
