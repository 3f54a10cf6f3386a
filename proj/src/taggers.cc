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

#include "ssgc/taggers.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "ssgc/config.h"
#include "ssgc/error.h"
#include "ssgc/metrics.h"

namespace ssgc {

namespace {

Tensor Glorot(int in, int out, Rng &rng) {
  return Tensor::Gaussian(in, out, std::sqrt(2.0 / (in + out)), rng);
}

void CheckPredicate(const Document &doc, const Span &p) {
  const int total = doc.token_count();
  if (p.start < 0 || p.start > p.end || p.end >= total ||
      doc.sentence_of(p.start) != doc.sentence_of(p.end)) {
    throw ValidationError("document '" + doc.id + "': predicate span " + ToString(p) +
                          " is not inside one sentence");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Coreference

void ValidateCorefConfig(const CorefConfig &cfg) {
  if (cfg.max_span_width < 1) throw ConfigError("coref max_span_width must be >= 1");
  if (!(cfg.top_span_ratio > 0.0 && cfg.top_span_ratio <= 1.0)) {
    throw ConfigError("coref top_span_ratio must be in (0, 1]");
  }
  if (cfg.max_antecedents < 1) throw ConfigError("coref max_antecedents must be >= 1");
  if (cfg.mention_hidden < 1 || cfg.pair_hidden < 1) {
    throw ConfigError("coref hidden sizes must be positive");
  }
  if (cfg.max_tokens < 1) throw ConfigError("coref max_tokens must be positive");
  if (cfg.mention_loss_weight < 0) throw ConfigError("coref mention_loss_weight must be >= 0");
}

std::vector<Cluster> ClustersFromAntecedents(const std::vector<Span> &mentions,
                                             const std::vector<int> &chosen) {
  const int n = static_cast<int>(mentions.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i) {
    if (chosen[i] >= 0) parent[find(i)] = find(chosen[i]);
  }
  std::map<int, Cluster> groups;
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(mentions[i]);
  std::vector<Cluster> out;
  for (auto &[root, c] : groups) {
    if (c.size() < 2) continue;
    std::sort(c.begin(), c.end());
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

CorefModel::CorefModel(std::string prefix, TokenEncoder encoder, CorefConfig cfg)
    : prefix_(std::move(prefix)), encoder_(std::move(encoder)), cfg_(cfg) {
  ValidateCorefConfig(cfg_);
}

void CorefModel::InitParams(ParamStore &store, Rng &rng) const {
  if (!store.contains(encoder_.name("emb"))) encoder_.InitParams(store, rng);
  const int s = encoder_.span_dim();
  const int hm = cfg_.mention_hidden, hp = cfg_.pair_hidden;
  store.Add(name("mention_w1"), Glorot(s, hm, rng));
  store.Add(name("mention_b1"), Tensor::Zeros(1, hm));
  store.Add(name("mention_w2"), Glorot(hm, 1, rng));
  store.Add(name("mention_b2"), Tensor::Zeros(1, 1));
  // First pair layer over [g_i, g_j, g_i * g_j], stored as three blocks.
  const double std1 = std::sqrt(2.0 / (3 * s + hp));
  store.Add(name("pair_wi"), Tensor::Gaussian(s, hp, std1, rng));
  store.Add(name("pair_wj"), Tensor::Gaussian(s, hp, std1, rng));
  store.Add(name("pair_wp"), Tensor::Gaussian(s, hp, std1, rng));
  store.Add(name("pair_b1"), Tensor::Zeros(1, hp));
  store.Add(name("pair_w2"), Glorot(hp, 1, rng));
  store.Add(name("pair_b2"), Tensor::Zeros(1, 1));
}

std::vector<Span> CorefModel::CandidateSpans(const Document &doc) const {
  std::vector<Span> out;
  for (const Span &s : doc.sentence_spans()) {
    for (int a = s.start; a <= s.end; ++a) {
      for (int b = a; b <= s.end && b - a + 1 <= cfg_.max_span_width; ++b) out.push_back({a, b});
    }
  }
  return out;
}

int CorefModel::KeptCount(int tokens, int candidates) const {
  const int k = static_cast<int>(std::ceil(cfg_.top_span_ratio * tokens - 1e-9));
  return std::min(std::max(k, 0), candidates);
}

CorefForward CorefModel::Forward(Tape &tape, const ParamStore &store, const Document &doc) const {
  const int total = doc.token_count();
  if (total > cfg_.max_tokens) {
    throw ValidationError("document '" + doc.id + "' has " + std::to_string(total) +
                          " tokens, over the limit of " + std::to_string(cfg_.max_tokens));
  }
  CorefForward out;
  out.candidates = CandidateSpans(doc);
  const std::vector<Span> &cands = out.candidates;
  if (cands.empty()) return out;
  auto P = [&](const char *leaf) { return tape.Param(store, name(leaf)); };

  Var tokens = encoder_.EncodeTokens(tape, store, doc);
  Var g = encoder_.EncodeSpans(tape, store, tokens, cands);
  Var h = tape.Relu(tape.Add(tape.MatMul(g, P("mention_w1")), P("mention_b1")));
  Var ms = tape.Add(tape.MatMul(h, P("mention_w2")), P("mention_b2"));
  out.candidate_scores = ms;

  const Tensor &score = tape.value(ms);
  std::vector<int> order(cands.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double sa = score.data[a], sb = score.data[b];
    if (sa != sb) return sa > sb;
    if (cands[a].start != cands[b].start) return cands[a].start < cands[b].start;
    return cands[a].width() < cands[b].width();
  });
  std::vector<int> kept(order.begin(), order.begin() + KeptCount(total, (int)cands.size()));
  std::sort(kept.begin(), kept.end());
  const int k = static_cast<int>(kept.size());
  for (int i : kept) out.mentions.push_back(cands[i]);

  std::vector<int> pi, pj;
  out.antecedents.resize(k);
  for (int i = 0; i < k; ++i) {
    for (int j = std::max(0, i - cfg_.max_antecedents); j < i; ++j) {
      out.antecedents[i].push_back(j);
      pi.push_back(i);
      pj.push_back(j);
    }
  }
  Var zero = tape.Constant(Tensor::Zeros(1, 1));
  if (pi.empty()) {
    for (int i = 0; i < k; ++i) out.log_probs.push_back(tape.LogSoftmaxRows(zero));
    return out;
  }

  Var gk = tape.GatherRows(g, kept);
  Var sk = tape.GatherRows(ms, kept);
  Var a = tape.GatherRows(tape.MatMul(gk, P("pair_wi")), pi);
  Var b = tape.GatherRows(tape.MatMul(gk, P("pair_wj")), pj);
  Var prod = tape.Mul(tape.GatherRows(gk, pi), tape.GatherRows(gk, pj));
  Var ph = tape.Relu(
      tape.Add(tape.Add(tape.Add(a, b), tape.MatMul(prod, P("pair_wp"))), P("pair_b1")));
  Var ps = tape.Add(tape.MatMul(ph, P("pair_w2")), P("pair_b2"));
  Var pair = tape.Add(tape.Add(ps, tape.GatherRows(sk, pi)), tape.GatherRows(sk, pj));

  int offset = 0;
  for (int i = 0; i < k; ++i) {
    const int n = static_cast<int>(out.antecedents[i].size());
    if (n == 0) {
      out.log_probs.push_back(tape.LogSoftmaxRows(zero));
      continue;
    }
    Var row = tape.Transpose(tape.SliceRows(pair, offset, n));
    out.log_probs.push_back(tape.LogSoftmaxRows(tape.ConcatCols({zero, row})));
    offset += n;
  }
  return out;
}

CorefPrediction CorefModel::Predict(const ParamStore &store, const Document &doc) const {
  Tape tape;
  CorefForward fwd = Forward(tape, store, doc);
  CorefPrediction out;
  out.mentions = fwd.mentions;
  out.antecedents = fwd.antecedents;
  for (size_t i = 0; i < fwd.mentions.size(); ++i) {
    std::vector<double> p = tape.value(fwd.log_probs[i]).values();
    int best = 0;
    for (size_t c = 0; c < p.size(); ++c) {
      p[c] = std::exp(p[c]);
      if (p[c] > p[best]) best = static_cast<int>(c);
    }
    out.probs.push_back(std::move(p));
    out.chosen.push_back(best == 0 ? -1 : fwd.antecedents[i][best - 1]);
  }
  out.clusters = ClustersFromAntecedents(out.mentions, out.chosen);
  return out;
}

Var CorefModel::Loss(Tape &tape, const ParamStore &store, const Document &doc) const {
  return Loss(tape, Forward(tape, store, doc), doc);
}

Var CorefModel::Loss(Tape &tape, const CorefForward &fwd, const Document &doc) const {
  std::map<Span, int> cluster_of;
  for (size_t c = 0; c < doc.clusters.size(); ++c) {
    for (const Span &s : doc.clusters[c]) cluster_of[s] = static_cast<int>(c);
  }
  auto cluster = [&](const Span &s) {
    auto it = cluster_of.find(s);
    return it == cluster_of.end() ? -1 : it->second;
  };
  Var total = tape.Constant(Tensor::Zeros(1, 1));
  for (size_t i = 0; i < fwd.mentions.size(); ++i) {
    const auto &ante = fwd.antecedents[i];
    if (ante.empty()) continue;
    const int ci = cluster(fwd.mentions[i]);
    Tensor mask = Tensor::Zeros(1, static_cast<int>(ante.size()) + 1);
    int gold = 0, last = 0;
    for (size_t k = 0; k < ante.size(); ++k) {
      if (ci >= 0 && cluster(fwd.mentions[ante[k]]) == ci) {
        mask.data[k + 1] = 1.0;
        ++gold;
        last = static_cast<int>(k) + 1;
      }
    }
    if (gold == 0) mask.data[0] = 1.0;
    Var term;
    if (gold <= 1) {
      term = tape.Pick(fwd.log_probs[i], 0, last);
    } else {
      term = tape.Log(
          tape.Sum(tape.Mul(tape.Exp(fwd.log_probs[i]), tape.Constant(std::move(mask)))));
    }
    total = tape.Sub(total, term);
  }
  if (cfg_.mention_loss_weight > 0.0 && fwd.candidate_scores.valid()) {
    const int n = static_cast<int>(fwd.candidates.size());
    Tensor y = Tensor::Zeros(n, 1), not_y = Tensor::Filled(n, 1, 1.0);
    for (int c = 0; c < n; ++c) {
      if (cluster(fwd.candidates[c]) >= 0) {
        y.data[c] = 1.0;
        not_y.data[c] = 0.0;
      }
    }
    Var s = fwd.candidate_scores;
    Var ll = tape.Add(tape.Mul(tape.LogSigmoid(s), tape.Constant(std::move(y))),
                      tape.Mul(tape.LogSigmoid(tape.Scale(s, -1.0)), tape.Constant(std::move(not_y))));
    total = tape.Sub(total, tape.Scale(tape.Sum(ll), cfg_.mention_loss_weight));
  }
  return total;
}

// ---------------------------------------------------------------------------
// BIO labels and decoding

BioLabels::BioLabels(const RoleInventory &roles) : BioLabels(roles.labels()) {}

BioLabels::BioLabels(const std::vector<std::string> &roles) : roles_(roles) {
  labels_.push_back("O");
  for (const auto &r : roles_) {
    labels_.push_back("B-" + r);
    labels_.push_back("I-" + r);
  }
}

int BioLabels::index(const std::string &tag) const {
  auto it = std::find(labels_.begin(), labels_.end(), tag);
  if (it == labels_.end()) throw ValidationError("unknown BIO tag '" + tag + "'");
  return static_cast<int>(it - labels_.begin());
}

bool BioLabels::AllowedTransition(int prev, int next) const {
  if (!is_inside(next)) return true;
  return prev == next || prev == next - 1;
}

bool IsValidBio(const std::vector<int> &tags, const BioLabels &labels) {
  for (size_t t = 0; t < tags.size(); ++t) {
    if (tags[t] < 0 || tags[t] >= labels.size()) return false;
    if (t == 0 ? !labels.AllowedStart(tags[t]) : !labels.AllowedTransition(tags[t - 1], tags[t])) {
      return false;
    }
  }
  return true;
}

std::vector<int> DecodeBio(const Tensor &probs, const BioLabels &labels) {
  const int n = probs.rows(), L = labels.size();
  if (probs.cols() != L) {
    throw ShapeError("DecodeBio: " + ShapeString(probs) + " for " + std::to_string(L) +
                     " labels");
  }
  if (n == 0 || probs.size() == 0) return {};
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  auto lg = [](double p) { return p > 0.0 ? std::log(p) : kNegInf; };
  std::vector<double> score(L), next(L);
  std::vector<std::vector<int>> back(n, std::vector<int>(L, -1));
  for (int l = 0; l < L; ++l) score[l] = labels.AllowedStart(l) ? lg(probs.at(0, l)) : kNegInf;
  for (int t = 1; t < n; ++t) {
    for (int l = 0; l < L; ++l) {
      int arg = -1;
      double best = kNegInf;
      for (int p = 0; p < L; ++p) {
        if (!labels.AllowedTransition(p, l)) continue;
        if (arg < 0 || score[p] > best) {
          arg = p;
          best = score[p];
        }
      }
      back[t][l] = arg;
      next[l] = best + lg(probs.at(t, l));
    }
    score.swap(next);
  }
  int last = 0;
  for (int l = 1; l < L; ++l) {
    if (score[l] > score[last]) last = l;
  }
  std::vector<int> tags(n);
  for (int t = n - 1; t >= 0; --t) {
    tags[t] = last;
    if (t > 0) last = back[t][last];
  }
  return tags;
}

std::vector<Argument> BioToArguments(const std::vector<int> &tags, const BioLabels &labels,
                                     const Span &sentence) {
  std::vector<Argument> out;
  int open = -1;  // role index of the argument being extended
  for (size_t t = 0; t < tags.size(); ++t) {
    const int tag = tags[t];
    const int tok = sentence.start + static_cast<int>(t);
    if (tag == BioLabels::kOutside) {
      open = -1;
      continue;
    }
    const int role = (tag - 1) / 2;
    if (labels.is_inside(tag) && open == role) {
      out.back().span.end = tok;
      continue;
    }
    out.push_back({labels.role(tag), {tok, tok}});
    open = role;
  }
  return out;
}

// ---------------------------------------------------------------------------
// SRL

void ValidateSrlConfig(const SrlConfig &cfg) {
  if (cfg.hidden < 1) throw ConfigError("srl hidden must be positive");
}

SrlModel::SrlModel(std::string prefix, TokenEncoder encoder, SrlConfig cfg,
                   const RoleInventory &roles)
    : prefix_(std::move(prefix)), encoder_(std::move(encoder)), cfg_(cfg), roles_(roles),
      labels_(roles) {
  ValidateSrlConfig(cfg_);
}

void SrlModel::InitParams(ParamStore &store, Rng &rng) const {
  if (!store.contains(encoder_.name("emb"))) encoder_.InitParams(store, rng);
  const int d = encoder_.output_dim(), h = cfg_.hidden;
  // Input is [token, predicate, verb one-hot].
  const double s = std::sqrt(2.0 / (2 * d + 2 + h));
  store.Add(name("w_token"), Tensor::Gaussian(d, h, s, rng));
  store.Add(name("w_pred"), Tensor::Gaussian(d, h, s, rng));
  store.Add(name("w_verb"), Tensor::Gaussian(2, h, s, rng));
  store.Add(name("b1"), Tensor::Zeros(1, h));
  store.Add(name("w_out"), Tensor::Gaussian(h, labels_.size(), 0.01, rng));
  store.Add(name("b_out"), Tensor::Zeros(1, labels_.size()));
}

std::vector<Span> Predicates(const Document &doc) {
  std::vector<Span> out;
  for (const Frame &f : doc.frames) out.push_back(f.predicate);
  return out;
}

std::vector<SrlFrameForward> SrlModel::Forward(Tape &tape, const ParamStore &store,
                                               const Document &doc,
                                               const std::vector<Span> &predicates) const {
  for (const Span &p : predicates) CheckPredicate(doc, p);
  std::vector<SrlFrameForward> out;
  if (predicates.empty()) return out;
  auto P = [&](const char *leaf) { return tape.Param(store, name(leaf)); };
  Var tokens = encoder_.EncodeTokens(tape, store, doc);
  Var tproj = tape.MatMul(tokens, P("w_token"));
  Var pproj = tape.MatMul(tokens, P("w_pred"));
  const std::vector<Span> sentences = doc.sentence_spans();
  for (const Span &p : predicates) {
    const Span s = sentences[doc.sentence_of(p.start)];
    const int w = s.width();
    Tensor verb = Tensor::Zeros(w, 2);
    for (int t = 0; t < w; ++t) verb.at(t, p.contains(s.start + t) ? 1 : 0) = 1.0;
    Var pred = tape.MeanRows(tape.SliceRows(pproj, p.start, p.width()));
    Var h = tape.Add(tape.SliceRows(tproj, s.start, w), pred);
    h = tape.Add(h, tape.MatMul(tape.Constant(std::move(verb)), P("w_verb")));
    h = tape.Relu(tape.Add(h, P("b1")));
    Var logits = tape.Add(tape.MatMul(h, P("w_out")), P("b_out"));
    out.push_back({p, s, tape.LogSoftmaxRows(logits)});
  }
  return out;
}

Frame SrlModel::ToFrame(const SrlFramePrediction &p) const {
  Frame frame{p.predicate, {}};
  std::map<std::string, std::pair<double, size_t>> core_best;
  std::vector<Argument> args = BioToArguments(p.tags, labels_, p.sentence);
  std::vector<bool> keep(args.size(), true);
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i].span.overlaps(p.predicate)) {
      keep[i] = false;
      continue;
    }
    if (!RoleInventory::IsCore(args[i].role)) continue;
    const int row = args[i].span.start - p.sentence.start;
    const double conf = p.probs.at(row, p.tags[row]);
    auto it = core_best.find(args[i].role);
    if (it == core_best.end()) {
      core_best[args[i].role] = {conf, i};
    } else if (conf > it->second.first) {
      keep[it->second.second] = false;
      it->second = {conf, i};
    } else {
      keep[i] = false;
    }
  }
  for (size_t i = 0; i < args.size(); ++i) {
    if (keep[i]) frame.args.push_back(args[i]);
  }
  return frame;
}

SrlPrediction SrlModel::Decode(const Tape &tape, const std::vector<SrlFrameForward> &fwd) const {
  SrlPrediction out;
  for (const SrlFrameForward &f : fwd) {
    SrlFramePrediction p{f.predicate, f.sentence, tape.value(f.log_probs), {}};
    for (double &v : p.probs.data) v = std::exp(v);
    Tensor masked = p.probs;
    for (int t = 0; t < masked.rows(); ++t) {
      if (!f.predicate.contains(f.sentence.start + t)) continue;
      for (int l = 0; l < masked.cols(); ++l) masked.at(t, l) = l == BioLabels::kOutside;
    }
    p.tags = DecodeBio(masked, labels_);
    out.decoded.push_back(ToFrame(p));
    out.frames.push_back(std::move(p));
  }
  return out;
}

SrlPrediction SrlModel::Predict(const ParamStore &store, const Document &doc) const {
  Tape tape;
  return Decode(tape, Forward(tape, store, doc, Predicates(doc)));
}

Var SrlModel::Loss(Tape &tape, const ParamStore &store, const Document &doc) const {
  return Loss(tape, Forward(tape, store, doc, Predicates(doc)), doc);
}

Var SrlModel::Loss(Tape &tape, const std::vector<SrlFrameForward> &fwd,
                   const Document &doc) const {
  if (fwd.size() != doc.frames.size()) {
    throw ValidationError("SRL loss: " + std::to_string(fwd.size()) + " predictions for " +
                          std::to_string(doc.frames.size()) + " frames");
  }
  Var total = tape.Constant(Tensor::Zeros(1, 1));
  int count = 0;
  for (size_t i = 0; i < fwd.size(); ++i) {
    const std::vector<std::string> tags = FrameToBio(doc.frames[i], fwd[i].sentence);
    Tensor target = Tensor::Zeros(static_cast<int>(tags.size()), labels_.size());
    for (size_t t = 0; t < tags.size(); ++t) target.at(static_cast<int>(t), labels_.index(tags[t])) = 1.0;
    total = tape.Add(total, tape.Sum(tape.Mul(fwd[i].log_probs, tape.Constant(std::move(target)))));
    count += static_cast<int>(tags.size());
  }
  return count == 0 ? total : tape.Scale(total, -1.0 / count);
}

// ---------------------------------------------------------------------------
// Taggers

TaggerTask ParseTaggerTask(const std::string &name) {
  if (name == "coref") return TaggerTask::kCoref;
  if (name == "srl") return TaggerTask::kSrl;
  if (name == "multi") return TaggerTask::kMulti;
  throw ConfigError("unknown task '" + name + "' (expected coref, srl or multi)");
}

std::string TaggerTaskName(TaggerTask task) {
  switch (task) {
    case TaggerTask::kCoref: return "coref";
    case TaggerTask::kSrl: return "srl";
    case TaggerTask::kMulti: return "multi";
  }
  return "?";
}

Taggers::Taggers(TaggerConfig cfg, Vocabulary vocab) : cfg_(cfg), vocab_(std::move(vocab)) {
  ValidateEncoderConfig(cfg_.encoder);
  const std::string ce = cfg_.shared_encoder ? "shared_encoder" : "coref/encoder";
  const std::string se = cfg_.shared_encoder ? "shared_encoder" : "srl/encoder";
  coref_ = CorefModel("coref", TokenEncoder(ce, cfg_.encoder, vocab_), cfg_.coref);
  srl_ = SrlModel("srl", TokenEncoder(se, cfg_.encoder, vocab_), cfg_.srl);
}

void Taggers::InitParams(ParamStore &store, Rng &rng) const {
  coref_.InitParams(store, rng);
  srl_.InitParams(store, rng);
}

Document Taggers::Predict(const ParamStore &store, const Document &doc) const {
  return Predict(store, store, doc);
}

Document Taggers::Predict(const ParamStore &coref_params, const ParamStore &srl_params,
                          const Document &doc) const {
  Document out{doc.id, doc.sentences, {}, {}};
  out.clusters = coref_.Predict(coref_params, doc).clusters;
  out.frames = srl_.Predict(srl_params, doc).decoded;
  Canonicalize(out);
  Validate(out, RoleInventory::Default());
  return out;
}

void Taggers::Save(const std::string &path, const ParamStore &store) const {
  ParamStore own;
  for (const auto &n : store.names()) {
    if (n.rfind("coref/", 0) == 0 || n.rfind("srl/", 0) == 0 ||
        n.rfind("shared_encoder/", 0) == 0) {
      own.Add(n, store.get(n));
    }
  }
  Json meta = {{"format", "taggers"}, {"config", ToJson(cfg_)}, {"vocab", vocab_.words()}};
  SaveCheckpoint(path, own, meta.dump());
}

std::pair<Taggers, ParamStore> Taggers::Load(const std::string &path) {
  std::string text;
  ParamStore store = LoadCheckpoint(path, &text);
  Json meta;
  try {
    meta = Json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(path + ": bad checkpoint metadata: " + e.what());
  }
  if (meta.value("format", "") != "taggers") throw ParseError(path + ": not a tagger checkpoint");
  TaggerConfig cfg;
  FromJson(meta.at("config"), &cfg);
  Taggers t(cfg, Vocabulary(meta.at("vocab").get<std::vector<std::string>>()));
  return {std::move(t), std::move(store)};
}

Document StripAnnotations(const Document &doc) {
  Document out{doc.id, doc.sentences, {}, {}};
  for (const Frame &f : doc.frames) out.frames.push_back({f.predicate, {}});
  return out;
}

double DevMetric(const Taggers &taggers, const ParamStore &store,
                 const std::vector<Document> &dev, TaggerTask task) {
  if (dev.empty()) return 0.0;
  std::vector<Document> pred;
  pred.reserve(dev.size());
  for (const Document &d : dev) {
    Document p{d.id, d.sentences, {}, {}};
    if (task != TaggerTask::kSrl) p.clusters = taggers.coref().Predict(store, d).clusters;
    if (task != TaggerTask::kCoref) p.frames = taggers.srl().Predict(store, d).decoded;
    pred.push_back(std::move(p));
  }
  const double coref = task == TaggerTask::kSrl ? 0.0 : CorpusCorefScores(dev, pred).avg_f1;
  const double srl = task == TaggerTask::kCoref ? 0.0 : CorpusSrlCounts(dev, pred).token_f1().f1;
  switch (task) {
    case TaggerTask::kCoref: return coref;
    case TaggerTask::kSrl: return srl;
    case TaggerTask::kMulti: return 0.5 * (coref + srl);
  }
  return 0.0;
}

namespace {

Var TaskLoss(Tape &tape, const Taggers &taggers, const ParamStore &store, const Document &doc,
             TaggerTask task) {
  switch (task) {
    case TaggerTask::kCoref: return taggers.coref().Loss(tape, store, doc);
    case TaggerTask::kSrl: return taggers.srl().Loss(tape, store, doc);
    case TaggerTask::kMulti:
      return tape.Add(taggers.coref().Loss(tape, store, doc), taggers.srl().Loss(tape, store, doc));
  }
  throw ConfigError("bad task");
}

}  // namespace

SupervisedHistory TrainSupervised(const Taggers &taggers, ParamStore &store,
                                  const std::vector<Document> &train,
                                  const std::vector<Document> &dev, TaggerTask task,
                                  const TrainSchedule &schedule, uint64_t seed) {
  ValidateSchedule(schedule);
  if (train.empty()) throw ValidationError("supervised training needs at least one document");
  SupervisedHistory hist;
  for (const Document &d : train) {
    Tape tape;
    hist.initial_loss += tape.value(TaskLoss(tape, taggers, store, d, task)).item();
  }
  hist.initial_loss /= train.size();

  PlateauScheduler sched(schedule);
  Rng rng = MakeRng(seed, 77);
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  ParamStore best = store.CopyValues();
  hist.best_metric = -std::numeric_limits<double>::infinity();
  for (int epoch = 0; epoch < schedule.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const double lr = sched.lr();
    double sum = 0.0;
    for (size_t i : order) {
      Tape tape;
      Var loss = TaskLoss(tape, taggers, store, train[i], task);
      sum += tape.value(loss).item();
      AdamStep(store, tape.Backward(loss), lr, schedule.weight_decay);
    }
    hist.train_loss.push_back(sum / train.size());
    const double metric = DevMetric(taggers, store, dev, task);
    hist.dev_metric.push_back(metric);
    if (metric >= hist.best_metric) {
      hist.best_metric = metric;
      hist.best_epoch = epoch;
      best = store.CopyValues();
    }
    if (sched.Step(metric).stop) break;
  }
  store.AssignValues(best);
  return hist;
}

}  // namespace ssgc
