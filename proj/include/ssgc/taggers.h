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

#ifndef SSGC_TAGGERS_H_
#define SSGC_TAGGERS_H_

#include <string>
#include <utility>
#include <vector>

#include "ssgc/corpus.h"
#include "ssgc/encoder.h"
#include "ssgc/optim.h"
#include "ssgc/rng.h"
#include "ssgc/tape.h"

namespace ssgc {

// ---------------------------------------------------------------------------
// Coreference: span ranking with a mention pruner and a pair scorer.

struct CorefConfig {
  int max_span_width = 10;
  double top_span_ratio = 0.3;
  int max_antecedents = 100;
  int mention_hidden = 150;
  int pair_hidden = 150;
  int max_tokens = 512;
  // Weight of a binary cross-entropy on the pruner scores against gold
  // mention membership, summed over candidates. Zero gives the plain
  // marginal likelihood.
  double mention_loss_weight = 1.0;
};

void ValidateCorefConfig(const CorefConfig &cfg);

// Tape-level result. log_probs[i] is 1 x (1 + antecedents[i].size()), column 0
// being the empty antecedent.
struct CorefForward {
  std::vector<Span> mentions;  // kept spans in (start, end) order
  std::vector<std::vector<int>> antecedents;
  std::vector<Var> log_probs;
  std::vector<Span> candidates;
  Var candidate_scores;  // candidates x 1 pruner scores
};

struct CorefPrediction {
  std::vector<Span> mentions;
  std::vector<std::vector<int>> antecedents;
  std::vector<std::vector<double>> probs;
  std::vector<int> chosen;  // index into mentions, -1 for none
  std::vector<Cluster> clusters;
};

// Links each mention to chosen[i] (when >= 0) and returns the clusters with at
// least two members, canonically ordered.
std::vector<Cluster> ClustersFromAntecedents(const std::vector<Span> &mentions,
                                             const std::vector<int> &chosen);

class CorefModel {
 public:
  CorefModel() = default;
  CorefModel(std::string prefix, TokenEncoder encoder, CorefConfig cfg);

  const std::string &prefix() const { return prefix_; }
  const TokenEncoder &encoder() const { return encoder_; }
  const CorefConfig &config() const { return cfg_; }
  std::string name(const std::string &leaf) const { return prefix_ + "/" + leaf; }

  // Adds the scorer parameters and, if missing, the encoder's.
  void InitParams(ParamStore &store, Rng &rng) const;

  // All spans of width <= max_span_width inside one sentence, in order.
  std::vector<Span> CandidateSpans(const Document &doc) const;
  // Number of spans kept for a document of `tokens` tokens and `candidates`
  // candidates.
  int KeptCount(int tokens, int candidates) const;

  CorefForward Forward(Tape &tape, const ParamStore &store, const Document &doc) const;
  CorefPrediction Predict(const ParamStore &store, const Document &doc) const;
  // Negative marginal log-likelihood of the gold antecedents, summed over the
  // kept mentions, plus the weighted mention term.
  Var Loss(Tape &tape, const ParamStore &store, const Document &doc) const;
  Var Loss(Tape &tape, const CorefForward &fwd, const Document &doc) const;

 private:
  std::string prefix_ = "coref";
  TokenEncoder encoder_;
  CorefConfig cfg_;
};

// ---------------------------------------------------------------------------
// SRL: per-predicate BIO tagging with a verb indicator.

class BioLabels {
 public:
  BioLabels() : BioLabels(RoleInventory::Default()) {}
  explicit BioLabels(const RoleInventory &roles);
  explicit BioLabels(const std::vector<std::string> &roles);

  int size() const { return static_cast<int>(labels_.size()); }
  const std::string &label(int i) const { return labels_.at(i); }
  const std::vector<std::string> &labels() const { return labels_; }
  // Throws ValidationError for unknown tags.
  int index(const std::string &tag) const;
  static constexpr int kOutside = 0;
  bool is_begin(int i) const { return i > 0 && i % 2 == 1; }
  bool is_inside(int i) const { return i > 0 && i % 2 == 0; }
  // Role name of a B-/I- label.
  const std::string &role(int i) const { return roles_.at((i - 1) / 2); }
  int begin_of(int role) const { return 1 + 2 * role; }
  int inside_of(int role) const { return 2 + 2 * role; }

  bool AllowedStart(int label) const { return !is_inside(label); }
  bool AllowedTransition(int prev, int next) const;

 private:
  std::vector<std::string> roles_;
  std::vector<std::string> labels_;
};

// Constrained Viterbi over a rows x labels matrix of probabilities.
std::vector<int> DecodeBio(const Tensor &probs, const BioLabels &labels);
bool IsValidBio(const std::vector<int> &tags, const BioLabels &labels);
// Argument spans of a tag sequence over `sentence`.
std::vector<Argument> BioToArguments(const std::vector<int> &tags, const BioLabels &labels,
                                     const Span &sentence);

struct SrlConfig {
  int hidden = 150;
};

void ValidateSrlConfig(const SrlConfig &cfg);

struct SrlFrameForward {
  Span predicate;
  Span sentence;
  Var log_probs;  // sentence width x labels
};

struct SrlFramePrediction {
  Span predicate;
  Span sentence;
  Tensor probs;
  std::vector<int> tags;
};

struct SrlPrediction {
  std::vector<SrlFramePrediction> frames;
  std::vector<Frame> decoded;
};

class SrlModel {
 public:
  SrlModel() = default;
  SrlModel(std::string prefix, TokenEncoder encoder, SrlConfig cfg,
           const RoleInventory &roles = RoleInventory::Default());

  const std::string &prefix() const { return prefix_; }
  const TokenEncoder &encoder() const { return encoder_; }
  const SrlConfig &config() const { return cfg_; }
  const BioLabels &labels() const { return labels_; }
  std::string name(const std::string &leaf) const { return prefix_ + "/" + leaf; }

  void InitParams(ParamStore &store, Rng &rng) const;

  // One entry per predicate, in the given order. A predicate outside the
  // document raises ValidationError.
  std::vector<SrlFrameForward> Forward(Tape &tape, const ParamStore &store, const Document &doc,
                                       const std::vector<Span> &predicates) const;
  // Uses the predicates of doc.frames.
  SrlPrediction Predict(const ParamStore &store, const Document &doc) const;
  SrlPrediction Decode(const Tape &tape, const std::vector<SrlFrameForward> &fwd) const;
  // Frame from a tag sequence; predicate tokens are never arguments and a
  // repeated core role keeps only its most confident span.
  Frame ToFrame(const SrlFramePrediction &p) const;
  // Mean token cross-entropy over every (predicate, token) pair.
  Var Loss(Tape &tape, const ParamStore &store, const Document &doc) const;
  Var Loss(Tape &tape, const std::vector<SrlFrameForward> &fwd, const Document &doc) const;

 private:
  std::string prefix_ = "srl";
  TokenEncoder encoder_;
  SrlConfig cfg_;
  RoleInventory roles_ = RoleInventory::Default();
  BioLabels labels_;
};

std::vector<Span> Predicates(const Document &doc);

// ---------------------------------------------------------------------------
// Both taggers, with separate or shared token encoders.

struct TaggerConfig {
  EncoderConfig encoder;
  CorefConfig coref;
  SrlConfig srl;
  bool shared_encoder = false;
};

enum class TaggerTask { kCoref, kSrl, kMulti };

TaggerTask ParseTaggerTask(const std::string &name);
std::string TaggerTaskName(TaggerTask task);

class Taggers {
 public:
  Taggers() = default;
  Taggers(TaggerConfig cfg, Vocabulary vocab);

  const TaggerConfig &config() const { return cfg_; }
  const Vocabulary &vocab() const { return vocab_; }
  const CorefModel &coref() const { return coref_; }
  const SrlModel &srl() const { return srl_; }

  void InitParams(ParamStore &store, Rng &rng) const;

  // Clusters from the coreference model, frames from the SRL model run on the
  // predicates of `doc`. The result always passes Validate.
  Document Predict(const ParamStore &store, const Document &doc) const;
  Document Predict(const ParamStore &coref_params, const ParamStore &srl_params,
                   const Document &doc) const;

  void Save(const std::string &path, const ParamStore &store) const;
  static std::pair<Taggers, ParamStore> Load(const std::string &path);

 private:
  TaggerConfig cfg_;
  Vocabulary vocab_;
  CorefModel coref_;
  SrlModel srl_;
};

// Copy of `doc` without clusters or arguments; predicates are kept.
Document StripAnnotations(const Document &doc);

struct SupervisedHistory {
  double initial_loss = 0.0;
  std::vector<double> train_loss;
  std::vector<double> dev_metric;
  int best_epoch = -1;
  double best_metric = 0.0;
};

// Dev metric: coref average F1, SRL token F1, or their mean for kMulti.
double DevMetric(const Taggers &taggers, const ParamStore &store,
                 const std::vector<Document> &dev, TaggerTask task);

// Per-document Adam steps under the plateau schedule; the best dev epoch's
// parameters are restored at the end.
SupervisedHistory TrainSupervised(const Taggers &taggers, ParamStore &store,
                                  const std::vector<Document> &train,
                                  const std::vector<Document> &dev, TaggerTask task,
                                  const TrainSchedule &schedule, uint64_t seed);

}  // namespace ssgc

#endif  // SSGC_TAGGERS_H_
