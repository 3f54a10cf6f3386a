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

#ifndef SSGC_COHERENCE_H_
#define SSGC_COHERENCE_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ssgc/corpus.h"
#include "ssgc/encoder.h"
#include "ssgc/gcn.h"
#include "ssgc/optim.h"
#include "ssgc/perturb.h"
#include "ssgc/ssg.h"

namespace ssgc {

// ---------------------------------------------------------------------------
// Logistic regression

struct LogisticOptions {
  int max_iters = 500;
  double tol = 1e-6;  // on the change in training loss
  double lr = 0.05;
  double l2 = 1e-3;   // on standardized weights
};

struct LogisticModel {
  std::vector<double> w;
  double b = 0.0;

  double Logit(const std::vector<double> &x) const;
  double Prob(const std::vector<double> &x) const;
};

struct LogisticFit {
  LogisticModel model;
  int iterations = 0;
  double loss = 0.0;
  double train_accuracy = 0.0;
};

// Mean binary cross-entropy of sigmoid(X w + b) against y, plus
// 0.5 * l2 * |w|^2. `w` is C x 1 and `b` is 1 x 1.
Var LogisticLoss(Tape &tape, Var x, Var w, Var b, const std::vector<int> &y, double l2 = 0.0);

// Full-batch Adam on standardized features; the standardization is folded
// back into the returned weights.
LogisticFit FitLogistic(const std::vector<std::vector<double>> &x, const std::vector<int> &y,
                        const LogisticOptions &opts = {});

// ---------------------------------------------------------------------------
// Coherence classifiers

struct CoherenceConfig {
  PerturbationConfig perturb = PerturbationConfig::Default();
  GcnConfig gcn;
  int epochs = 5;  // outer epochs, one decay step each
  DgiOptions dgi;
  LogisticOptions logistic;
  // One encoder pretrained on mixed perturbations instead of one per type.
  bool shared_encoder = false;
  int threads = 1;
};

void ValidateCoherenceConfig(const CoherenceConfig &cfg);

// Deterministic document split by salted id hash.
bool IsHeldOut(const std::string &doc_id, double fraction, const std::string &salt = "ssgc-split");

struct TypeTrainingLog {
  std::vector<double> dgi_losses;  // per DGI epoch
  std::vector<double> decays;      // per outer epoch
  int positives = 0;
  int negatives = 0;
  int unchanged_negatives = 0;
  LogisticFit fit;
};

class CoherenceModel {
 public:
  CoherenceModel() = default;
  CoherenceModel(TokenEncoder encoder, ParamStore encoder_params, CoherenceConfig cfg);

  const CoherenceConfig &config() const { return cfg_; }
  const TokenEncoder &encoder() const { return encoder_; }
  const ParamStore &encoder_params() const { return encoder_params_; }
  ParamStore &params() { return params_; }
  const ParamStore &params() const { return params_; }

  // Namespace of the graph encoder used for `type`.
  std::string gcn_prefix(PerturbationType type) const;
  const GraphEncoder &graph_encoder(PerturbationType type) const;
  LogisticModel &classifier(PerturbationType type) { return classifiers_.at(type); }
  const LogisticModel &classifier(PerturbationType type) const { return classifiers_.at(type); }
  size_t classifier_count() const { return classifiers_.size(); }

  // Graph features for `type` (the sigmoid readout).
  std::vector<double> Features(PerturbationType type, const GraphInput &in) const;
  GraphInput Prepare(const Ssg &g, const Document &doc) const;

  // Confidence that `g` is unperturbed according to one classifier.
  double TypeProbability(PerturbationType type, const Ssg &g, const Document &doc) const;
  // Mean of the nine classifier confidences.
  double Score(const Ssg &g, const Document &doc) const;
  double ScoreInput(const GraphInput &in) const;

  void Save(const std::string &path) const;
  static CoherenceModel Load(const std::string &path);

 private:
  TokenEncoder encoder_;
  ParamStore encoder_params_;
  CoherenceConfig cfg_;
  std::map<std::string, GraphEncoder> graph_encoders_;
  std::map<PerturbationType, LogisticModel> classifiers_;
  ParamStore params_;
};

struct CoherenceTrainingResult {
  CoherenceModel model;
  std::map<PerturbationType, TypeTrainingLog> logs;
};

// Per type: each epoch perturb the golds at the current decay, run DGI on
// golds vs perturbed, decay; then fit a logistic classifier on
// {(enc(g), 1)} and {(enc(g_p), 0)} from the last epoch.
CoherenceTrainingResult TrainCoherence(const std::vector<Document> &docs,
                                       const TokenEncoder &encoder,
                                       const ParamStore &encoder_params,
                                       const CoherenceConfig &cfg, uint64_t seed);

struct CoherenceEvaluation {
  std::map<PerturbationType, double> accuracy;
  double mean_gold_score = 0.0;
  double mean_perturbed_score = 0.0;
  // Fraction of documents whose gold graph outscores its perturbed graph.
  double paired_win_rate = 0.0;
};

// Balanced gold/perturbed pairs per type at the final training decay.
CoherenceEvaluation EvaluateCoherence(const CoherenceModel &model,
                                      const std::vector<Document> &docs, uint64_t seed);

}  // namespace ssgc

#endif  // SSGC_COHERENCE_H_
