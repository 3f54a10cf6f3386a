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

#include "ssgc/coherence.h"

#include <atomic>
#include <cmath>
#include <thread>

#include "ssgc/config.h"
#include "ssgc/error.h"

namespace ssgc {

namespace {

double SigmoidScalar(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double LogisticModel::Logit(const std::vector<double> &x) const {
  if (x.size() != w.size()) {
    throw ShapeError("logistic input of width " + std::to_string(x.size()) + ", expected " +
                     std::to_string(w.size()));
  }
  double z = b;
  for (size_t i = 0; i < w.size(); ++i) z += w[i] * x[i];
  return z;
}

double LogisticModel::Prob(const std::vector<double> &x) const { return SigmoidScalar(Logit(x)); }

Var LogisticLoss(Tape &tape, Var x, Var w, Var b, const std::vector<int> &y, double l2) {
  const int n = tape.value(x).rows();
  if (static_cast<int>(y.size()) != n) throw ShapeError("logistic labels/rows mismatch");
  Tensor sign = Tensor::Zeros(n, 1);
  for (int i = 0; i < n; ++i) sign.data[i] = y[i] ? 1.0 : -1.0;
  Var z = tape.Add(tape.MatMul(x, w), b);
  Var loss = tape.Scale(tape.Mean(tape.LogSigmoid(tape.Mul(z, tape.Constant(sign)))), -1.0);
  if (l2 > 0) loss = tape.Add(loss, tape.Scale(tape.Sum(tape.Mul(w, w)), 0.5 * l2));
  return loss;
}

LogisticFit FitLogistic(const std::vector<std::vector<double>> &x, const std::vector<int> &y,
                        const LogisticOptions &opts) {
  if (x.empty() || x.size() != y.size()) throw ValidationError("logistic: empty or ragged data");
  const int n = static_cast<int>(x.size());
  const int c = static_cast<int>(x[0].size());
  std::vector<double> mu(c, 0.0), sd(c, 0.0);
  for (const auto &row : x) {
    if (static_cast<int>(row.size()) != c) throw ShapeError("logistic: ragged rows");
    for (int j = 0; j < c; ++j) mu[j] += row[j] / n;
  }
  for (const auto &row : x) {
    for (int j = 0; j < c; ++j) sd[j] += (row[j] - mu[j]) * (row[j] - mu[j]) / n;
  }
  for (double &s : sd) s = s > 1e-24 ? std::sqrt(s) : 1.0;
  Tensor xs = Tensor::Zeros(n, c);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < c; ++j) xs.at(i, j) = (x[i][j] - mu[j]) / sd[j];
  }

  ParamStore store;
  store.Add("w", Tensor::Zeros(c, 1));
  store.Add("b", Tensor::Zeros(1, 1));
  LogisticFit fit;
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iters; ++it) {
    Tape tape;
    Var loss = LogisticLoss(tape, tape.Constant(xs), tape.Param(store, "w"),
                            tape.Param(store, "b"), y, opts.l2);
    const double value = tape.value(loss).item();
    fit.iterations = it + 1;
    fit.loss = value;
    if (std::abs(prev - value) < opts.tol) break;
    prev = value;
    AdamStep(store, tape.Backward(loss), opts.lr, 0.0);
  }

  const Tensor &w = store.get("w");
  fit.model.w.resize(c);
  fit.model.b = store.get("b").item();
  for (int j = 0; j < c; ++j) {
    fit.model.w[j] = w.data[j] / sd[j];
    fit.model.b -= w.data[j] * mu[j] / sd[j];
  }
  int correct = 0;
  for (int i = 0; i < n; ++i) correct += (fit.model.Logit(x[i]) > 0) == (y[i] == 1);
  fit.train_accuracy = static_cast<double>(correct) / n;
  return fit;
}

void ValidateCoherenceConfig(const CoherenceConfig &cfg) {
  ValidateConfig(cfg.perturb);
  ValidateGcnConfig(cfg.gcn);
  if (cfg.epochs < 1) throw ConfigError("coherence epochs must be >= 1");
  if (cfg.dgi.epochs < 0) throw ConfigError("dgi epochs must be >= 0");
  if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
}

bool IsHeldOut(const std::string &doc_id, double fraction, const std::string &salt) {
  uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (char ch : salt + "|" + doc_id) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  return static_cast<double>(Mix64(h) % 1000000) < fraction * 1e6;
}

// ---------------------------------------------------------------------------

CoherenceModel::CoherenceModel(TokenEncoder encoder, ParamStore encoder_params, CoherenceConfig cfg)
    : encoder_(std::move(encoder)), encoder_params_(std::move(encoder_params)), cfg_(cfg) {
  ValidateCoherenceConfig(cfg_);
  for (PerturbationType t : kAllPerturbationTypes) {
    const std::string prefix = gcn_prefix(t);
    if (!graph_encoders_.count(prefix)) {
      graph_encoders_.emplace(prefix, GraphEncoder(prefix, cfg_.gcn, encoder_.span_dim(),
                                                   cfg_.perturb.roles));
    }
    classifiers_[t].w.assign(cfg_.gcn.hidden, 0.0);
  }
}

std::string CoherenceModel::gcn_prefix(PerturbationType type) const {
  return cfg_.shared_encoder ? std::string("gcn/shared") : std::string("gcn/") + PerturbationName(type);
}

const GraphEncoder &CoherenceModel::graph_encoder(PerturbationType type) const {
  return graph_encoders_.at(gcn_prefix(type));
}

GraphInput CoherenceModel::Prepare(const Ssg &g, const Document &doc) const {
  if (g.doc_id != doc.id) throw ValidationError("graph '" + g.doc_id + "' scored against document '" + doc.id + "'");
  SpanFeaturizer feats(encoder_, encoder_params_);
  feats.AddDocument(doc);
  return graph_encoders_.begin()->second.Prepare(g, feats.SpanFeatures(g));
}

std::vector<double> CoherenceModel::Features(PerturbationType type, const GraphInput &in) const {
  return graph_encoder(type).Encode(params_, in).graph_vector.values();
}

double CoherenceModel::TypeProbability(PerturbationType type, const Ssg &g,
                                       const Document &doc) const {
  return classifier(type).Prob(Features(type, Prepare(g, doc)));
}

double CoherenceModel::ScoreInput(const GraphInput &in) const {
  double total = 0;
  std::map<std::string, std::vector<double>> cache;
  for (PerturbationType t : kAllPerturbationTypes) {
    const std::string prefix = gcn_prefix(t);
    auto it = cache.find(prefix);
    if (it == cache.end()) it = cache.emplace(prefix, Features(t, in)).first;
    total += classifier(t).Prob(it->second);
  }
  return total / kPerturbationTypeCount;
}

double CoherenceModel::Score(const Ssg &g, const Document &doc) const {
  return ScoreInput(Prepare(g, doc));
}

namespace {
const char kEncoderSnapshot[] = "encoder_snapshot/";
}

void CoherenceModel::Save(const std::string &path) const {
  ParamStore all = params_.CopyValues();
  for (const auto &name : encoder_params_.names()) {
    all.Add(kEncoderSnapshot + name, encoder_params_.get(name));
  }
  for (const auto &[t, clf] : classifiers_) {
    const std::string p = std::string("clf/") + PerturbationName(t);
    all.Add(p + "/w", Tensor::Matrix(1, static_cast<int>(clf.w.size()), clf.w));
    all.Add(p + "/b", Tensor::Scalar(clf.b));
  }
  Json meta = {{"format", "coherence"},
               {"encoder",
                {{"prefix", encoder_.prefix()},
                 {"config", ToJson(encoder_.config())},
                 {"vocab", encoder_.vocab().words()}}},
               {"coherence", ToJson(cfg_)}};
  SaveCheckpoint(path, all, meta.dump());
}

CoherenceModel CoherenceModel::Load(const std::string &path) {
  std::string meta_text;
  ParamStore all = LoadCheckpoint(path, &meta_text);
  Json meta;
  try {
    meta = Json::parse(meta_text);
  } catch (const Json::exception &e) {
    throw ParseError(path + ": bad checkpoint metadata: " + e.what());
  }
  if (meta.value("format", "") != "coherence") throw ParseError(path + ": not a coherence checkpoint");
  EncoderConfig ecfg;
  FromJson(meta.at("encoder").at("config"), &ecfg);
  auto words = meta.at("encoder").at("vocab").get<std::vector<std::string>>();
  if (!words.empty()) words.erase(words.begin());
  CoherenceConfig ccfg;
  FromJson(meta.at("coherence"), &ccfg);
  TokenEncoder enc(meta.at("encoder").at("prefix").get<std::string>(), ecfg, Vocabulary(words));
  ParamStore enc_params;
  ParamStore gcn_params;
  for (const auto &name : all.names()) {
    if (name.rfind(kEncoderSnapshot, 0) == 0) {
      enc_params.Add(name.substr(sizeof(kEncoderSnapshot) - 1), all.get(name));
    } else if (name.rfind("gcn/", 0) == 0) {
      gcn_params.Add(name, all.get(name));
    }
  }
  CoherenceModel model(std::move(enc), std::move(enc_params), ccfg);
  model.params_ = std::move(gcn_params);
  for (PerturbationType t : kAllPerturbationTypes) {
    const std::string p = std::string("clf/") + PerturbationName(t);
    if (!all.contains(p + "/w")) throw ParseError(path + ": missing classifier " + p);
    model.classifiers_[t].w = all.get(p + "/w").values();
    model.classifiers_[t].b = all.get(p + "/b").item();
  }
  return model;
}

// ---------------------------------------------------------------------------

struct CoherenceTrainer {
  const std::vector<Document> &docs;
  const CoherenceConfig &cfg;
  uint64_t seed;
  SpanFeaturizer feats;
  const GraphEncoder &layout;  // any encoder: Prepare only needs label/width layout
  std::vector<Ssg> golds;
  std::vector<GraphInput> gold_inputs;

  CoherenceTrainer(const std::vector<Document> &d, const TokenEncoder &enc, const ParamStore &ep,
                   const CoherenceConfig &c, uint64_t s, const GraphEncoder &l)
      : docs(d), cfg(c), seed(s), feats(enc, ep), layout(l) {
    for (const auto &doc : docs) {
      feats.AddDocument(doc);
      golds.push_back(BuildSsg(doc));
      gold_inputs.push_back(layout.Prepare(golds.back(), feats.SpanFeatures(golds.back())));
    }
  }

  GraphInput Input(const Ssg &g) const { return layout.Prepare(g, feats.SpanFeatures(g)); }

  // Perturbs every gold graph; `type` empty means the mixed sampler.
  std::vector<GraphInput> Perturb(const PerturbationType *type, double decay, Rng &rng,
                                  int *unchanged) const {
    std::vector<GraphInput> out;
    out.reserve(golds.size());
    for (const Ssg &g : golds) {
      const PerturbationType t = type ? *type : SampleMixedPerturbation(rng, cfg.perturb);
      PerturbationResult r = ApplyPerturbationChanged(g, t, decay, rng, cfg.perturb);
      if (unchanged && !r.changed) ++*unchanged;
      out.push_back(Input(r.graph));
    }
    return out;
  }

  // DGI over the outer epochs. Returns the negatives of the last epoch.
  std::vector<GraphInput> Pretrain(const GraphEncoder &enc, ParamStore &store,
                                   const PerturbationType *type, Rng &rng, TypeTrainingLog &log,
                                   int *unchanged) const {
    std::vector<GraphInput> negatives;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      const double d = DecaySchedule(epoch, cfg.perturb);
      log.decays.push_back(d);
      int local_unchanged = 0;
      negatives = Perturb(type, d, rng, &local_unchanged);
      if (unchanged) *unchanged = local_unchanged;
      auto losses = DgiPretrain(enc, store, gold_inputs, negatives, cfg.dgi, rng);
      log.dgi_losses.insert(log.dgi_losses.end(), losses.begin(), losses.end());
    }
    return negatives;
  }

  void FitClassifier(const GraphEncoder &enc, const ParamStore &store,
                     const std::vector<GraphInput> &negatives, LogisticModel &clf,
                     TypeTrainingLog &log) const {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (const auto &in : gold_inputs) {
      x.push_back(enc.Encode(store, in).graph_vector.values());
      y.push_back(1);
    }
    for (const auto &in : negatives) {
      x.push_back(enc.Encode(store, in).graph_vector.values());
      y.push_back(0);
    }
    log.positives = static_cast<int>(gold_inputs.size());
    log.negatives = static_cast<int>(negatives.size());
    log.fit = FitLogistic(x, y, cfg.logistic);
    clf = log.fit.model;
  }
};

namespace {

int TypeIndex(PerturbationType t) { return static_cast<int>(t); }

template <typename F>
void RunParallel(int jobs, int threads, F &&job) {
  if (threads <= 1 || jobs <= 1) {
    for (int i = 0; i < jobs; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(jobs);
  for (int w = 0; w < std::min(threads, jobs); ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < jobs; i = next++) {
        try {
          job(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto &t : pool) t.join();
  for (auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

CoherenceTrainingResult TrainCoherence(const std::vector<Document> &docs,
                                       const TokenEncoder &encoder,
                                       const ParamStore &encoder_params,
                                       const CoherenceConfig &cfg, uint64_t seed) {
  if (docs.empty()) throw ValidationError("train_coherence: no gold documents");
  CoherenceTrainingResult result{CoherenceModel(encoder, encoder_params.CopyValues(), cfg), {}};
  CoherenceModel &model = result.model;
  const GraphEncoder &layout = model.graph_encoder(kAllPerturbationTypes[0]);
  CoherenceTrainer trainer(docs, model.encoder(), model.encoder_params(), cfg, seed, layout);

  if (cfg.shared_encoder) {
    const GraphEncoder &enc = model.graph_encoder(kAllPerturbationTypes[0]);
    Rng rng = MakeRng(seed, 1000);
    enc.InitParams(model.params(), rng);
    TypeTrainingLog shared_log;
    trainer.Pretrain(enc, model.params(), nullptr, rng, shared_log, nullptr);
    const double d = shared_log.decays.back();
    std::vector<TypeTrainingLog> logs(kPerturbationTypeCount);
    RunParallel(kPerturbationTypeCount, cfg.threads, [&](int i) {
      const PerturbationType t = kAllPerturbationTypes[i];
      Rng trng = MakeRng(seed, 1100 + TypeIndex(t));
      logs[i] = shared_log;
      auto negatives = trainer.Perturb(&t, d, trng, &logs[i].unchanged_negatives);
      trainer.FitClassifier(enc, model.params(), negatives, model.classifier(t), logs[i]);
    });
    for (int i = 0; i < kPerturbationTypeCount; ++i) result.logs[kAllPerturbationTypes[i]] = logs[i];
    return result;
  }

  std::vector<ParamStore> stores(kPerturbationTypeCount);
  std::vector<TypeTrainingLog> logs(kPerturbationTypeCount);
  std::vector<LogisticModel> clfs(kPerturbationTypeCount);
  RunParallel(kPerturbationTypeCount, cfg.threads, [&](int i) {
    const PerturbationType t = kAllPerturbationTypes[i];
    const GraphEncoder &enc = model.graph_encoder(t);
    Rng rng = MakeRng(seed, 1000 + TypeIndex(t));
    enc.InitParams(stores[i], rng);
    auto negatives = trainer.Pretrain(enc, stores[i], &t, rng, logs[i], &logs[i].unchanged_negatives);
    trainer.FitClassifier(enc, stores[i], negatives, clfs[i], logs[i]);
  });
  for (int i = 0; i < kPerturbationTypeCount; ++i) {
    const PerturbationType t = kAllPerturbationTypes[i];
    for (const auto &name : stores[i].names()) model.params().Add(name, stores[i].get(name));
    model.classifier(t) = clfs[i];
    result.logs[t] = logs[i];
  }
  return result;
}

CoherenceEvaluation EvaluateCoherence(const CoherenceModel &model,
                                      const std::vector<Document> &docs, uint64_t seed) {
  CoherenceEvaluation ev;
  if (docs.empty()) return ev;
  const CoherenceConfig &cfg = model.config();
  const double d = DecaySchedule(cfg.epochs - 1, cfg.perturb);
  SpanFeaturizer feats(model.encoder(), model.encoder_params());
  const GraphEncoder &layout = model.graph_encoder(kAllPerturbationTypes[0]);
  std::vector<Ssg> golds;
  std::vector<GraphInput> gold_inputs;
  for (const auto &doc : docs) {
    feats.AddDocument(doc);
    golds.push_back(BuildSsg(doc));
    gold_inputs.push_back(layout.Prepare(golds.back(), feats.SpanFeatures(golds.back())));
  }
  for (PerturbationType t : kAllPerturbationTypes) {
    Rng rng = MakeRng(seed, 5000 + TypeIndex(t));
    const GraphEncoder &enc = model.graph_encoder(t);
    int correct = 0;
    for (size_t i = 0; i < golds.size(); ++i) {
      Ssg p = ApplyPerturbationChanged(golds[i], t, d, rng, cfg.perturb).graph;
      const auto &clf = model.classifier(t);
      correct += clf.Logit(enc.Encode(model.params(), gold_inputs[i]).graph_vector.values()) > 0;
      GraphInput pin = layout.Prepare(p, feats.SpanFeatures(p));
      correct += clf.Logit(enc.Encode(model.params(), pin).graph_vector.values()) < 0;
    }
    ev.accuracy[t] = correct / (2.0 * golds.size());
  }
  Rng rng = MakeRng(seed, 6000);
  int wins = 0;
  for (size_t i = 0; i < golds.size(); ++i) {
    const PerturbationType t = SampleMixedPerturbation(rng, cfg.perturb);
    Ssg p = ApplyPerturbationChanged(golds[i], t, d, rng, cfg.perturb).graph;
    const double sg = model.ScoreInput(gold_inputs[i]);
    const double sp = model.ScoreInput(layout.Prepare(p, feats.SpanFeatures(p)));
    ev.mean_gold_score += sg / golds.size();
    ev.mean_perturbed_score += sp / golds.size();
    wins += sg > sp;
  }
  ev.paired_win_rate = static_cast<double>(wins) / golds.size();
  return ev;
}

}  // namespace ssgc
