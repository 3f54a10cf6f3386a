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


// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. `acceptance 3 7` runs only those criteria.

#include <malloc.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.h"
#include "gradcheck.h"
#include "oracles.h"
#include "ssgc/coherence.h"
#include "ssgc/corpus.h"
#include "ssgc/gcn.h"
#include "ssgc/metrics.h"
#include "ssgc/perturb.h"
#include "ssgc/pipeline.h"
#include "ssgc/rl.h"
#include "ssgc/ssg.h"
#include "ssgc/taggers.h"

namespace ssgc {
namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  // Work done earlier on this criterion's behalf, counted against its limit.
  double shared_s = 0.0;
};

std::string Fmt(const char *f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome MetricOracles() {
  Rng rng = MakeRng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = testing::RandomClusters(rng, 30, 6, 5);
    const auto p = testing::RandomClusters(rng, 30, 6, 5);
    const CorefScores s = ScoresFromCounts(CountCoref(g, p));
    const PRF direct[3] = {Muc(g, p), BCubed(g, p), CeafE(g, p)};
    const PRF counted[3] = {s.muc, s.b_cubed, s.ceaf_e};
    const PRF oracle[3] = {testing::OracleMuc(g, p), testing::OracleBCubed(g, p),
                           testing::OracleCeafE(g, p)};
    for (int m = 0; m < 3; ++m) {
      for (const PRF *x : {&direct[m], &counted[m]}) {
        worst = std::max({worst, std::abs(x->precision - oracle[m].precision),
                          std::abs(x->recall - oracle[m].recall), std::abs(x->f1 - oracle[m].f1)});
      }
    }
  }
  return {worst <= 1e-12, "max |diff| " + Fmt("%.2e", worst) + " over 200 instances"};
}

// ---------------------------------------------------------------------------

Outcome SamplerFrequencies() {
  // Error shares of the SRL analysis; coreference gets a quarter, split evenly.
  const std::map<std::string, double> srl = {
      {"srl-change-label", 29.3}, {"srl-move-argument", 4.5}, {"srl-split-spans", 10.6},
      {"srl-merge-spans", 14.7},  {"srl-change-boundary", 18.0}, {"srl-add-argument", 7.4},
      {"srl-drop-argument", 11.0}};
  double srl_total = 0.0;
  for (const auto &[k, v] : srl) srl_total += v;
  std::map<std::string, double> expect;
  for (const auto &[k, v] : srl) expect[k] = 0.75 * v / srl_total;
  expect["coref-add-antecedent"] = expect["coref-drop-antecedent"] = 0.125;

  const PerturbationConfig cfg = PerturbationConfig::Default();
  Rng rng = MakeRng(202);
  const int n = 100000;
  std::map<std::string, int> counts;
  for (int i = 0; i < n; ++i) ++counts[PerturbationName(SampleMixedPerturbation(rng, cfg))];
  double chi2 = 0.0, worst = 0.0;
  for (const auto &[k, p] : expect) {
    const double c = counts[k];
    worst = std::max(worst, std::abs(c / n - p));
    chi2 += (c - n * p) * (c - n * p) / (n * p);
  }
  const bool ok = counts.size() == expect.size() && worst <= 0.01 && chi2 < 20.090;
  return {ok, "max |freq - p| " + Fmt("%.4f", worst) + ", chi2(8) " + Fmt("%.2f", chi2) +
                  " < 20.090, change-label " + Fmt("%.4f", counts["srl-change-label"] / double(n))};
}

// ---------------------------------------------------------------------------

struct GraphWorld {
  std::vector<Document> docs;
  TokenEncoder tok;
  ParamStore tok_params;
  std::unique_ptr<SpanFeaturizer> feats;
  GraphEncoder gcn;
  ParamStore params;

  GraphWorld(std::vector<Document> d, GcnConfig gcfg, uint64_t seed) : docs(std::move(d)) {
    EncoderConfig ec;
    ec.token_dim = 6;
    ec.context = false;
    ec.init_std = 0.5;
    tok = TokenEncoder("enc", ec, Vocabulary::Build(docs));
    Rng rng = MakeRng(seed);
    tok.InitParams(tok_params, rng);
    feats = std::make_unique<SpanFeaturizer>(tok, tok_params);
    for (const auto &doc : docs) feats->AddDocument(doc);
    gcn = GraphEncoder("gcn", gcfg, tok.span_dim());
    gcn.InitParams(params, rng);
  }
  GraphInput Input(const Ssg &g) const { return gcn.Prepare(g, feats->SpanFeatures(g)); }
};

Outcome ReadoutIdentity() {
  SynthConfig sc = SynthConfig::Default();
  sc.count = 25;
  GcnConfig gc;
  gc.hidden = 24;
  GraphWorld w(SynthesizeCorpus(sc, 303), gc, 3);
  Rng rng = MakeRng(304);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Ssg g = BuildSsg(w.docs[i % w.docs.size()]);
    if (i >= 25) {
      g = ApplyPerturbation(g, kAllPerturbationTypes[i % kPerturbationTypeCount], 0.8, rng,
                            PerturbationConfig::Default())
              .graph;
    }
    const GraphEncoding e = w.gcn.Encode(w.params, w.Input(g));
    const Tensor &nodes = e.node_matrix;
    for (int j = 0; j < nodes.cols(); ++j) {
      double sum = 0.0;
      for (int r = 0; r < nodes.rows(); ++r) sum += nodes.at(r, j);
      const double expect = 1.0 / (1.0 + std::exp(-sum / nodes.rows()));
      worst = std::max(worst, std::abs(e.graph_vector.data[j] - expect));
    }
  }
  for (const auto &name : w.params.names()) {
    for (double &v : w.params.get(name).data) v = 0.0;
  }
  bool half = true;
  for (const Document &d : w.docs) {
    for (double x : w.gcn.Encode(w.params, w.Input(BuildSsg(d))).graph_vector.data) half &= x == 0.5;
  }
  return {worst <= 1e-12 && half, "max |diff| " + Fmt("%.2e", worst) +
                                      " on 100 graphs; zero parameters give exactly 0.5: " +
                                      (half ? "yes" : "no")};
}

// ---------------------------------------------------------------------------

Outcome GradientChecks() {
  std::map<std::string, double> err;
  const Document nadine = testing::NadineDocument();
  {
    GcnConfig gc;
    gc.hidden = 5;
    gc.type_dim = 4;
    gc.edge_label_dim = 3;
    gc.layers = 3;
    GraphWorld w({nadine}, gc, 3);
    GraphInput in = w.Input(BuildSsg(nadine));
    Rng rng = MakeRng(401);
    const Tensor probe = Tensor::Gaussian(1, 5, 1.0, rng);
    err["gcn"] = testing::GradCheck(w.params, [&](Tape &t) {
                   Var gv = w.gcn.Readout(t, w.gcn.NodeEncodings(t, w.params, in));
                   return t.Sum(t.Mul(gv, t.Constant(probe)));
                 }).max_rel_error;
  }
  {
    EncoderConfig ec;
    ec.token_dim = 5;
    ec.context_hidden = 4;
    ec.char_cnn = true;
    ec.char_dim = 3;
    ec.char_filters = 4;
    ec.char_width = 3;
    ec.init_std = 0.5;
    TokenEncoder enc("enc", ec, Vocabulary::Build({nadine}));
    ParamStore store;
    Rng rng = MakeRng(402);
    enc.InitParams(store, rng);
    const Tensor probe = Tensor::Gaussian(4, enc.span_dim(), 1.0, rng);
    err["span encoder"] = testing::GradCheck(store, [&](Tape &t) {
                            Var tok = enc.EncodeTokens(t, store, nadine);
                            Var s = enc.EncodeSpans(t, store, tok, {{0, 0}, {0, 2}, {4, 6}, {7, 8}});
                            return t.Sum(t.Tanh(t.Mul(s, t.Constant(probe))));
                          }).max_rel_error;
  }
  EncoderConfig small;
  small.token_dim = 4;
  small.context_hidden = 3;
  {
    CorefConfig cc;
    cc.mention_hidden = 6;
    cc.pair_hidden = 6;
    cc.top_span_ratio = 0.6;
    cc.max_span_width = 3;
    CorefModel m("coref", TokenEncoder("enc", small, Vocabulary::Build({nadine})), cc);
    ParamStore store;
    Rng rng = MakeRng(403);
    m.InitParams(store, rng);
    // Larger embeddings keep pruning away from ties under the probe steps.
    for (double &v : store.get("enc/emb").data) v *= 50.0;
    err["coref scorers"] =
        testing::GradCheck(store, [&](Tape &t) { return m.Loss(t, store, nadine); }, {}, 1e-5, 40)
            .max_rel_error;
  }
  {
    SrlModel m("srl", TokenEncoder("enc", small, Vocabulary::Build({nadine})), {6});
    ParamStore store;
    Rng rng = MakeRng(404);
    m.InitParams(store, rng);
    for (double &v : store.get("srl/w_out").data) v *= 30.0;
    err["srl classifier"] =
        testing::GradCheck(store, [&](Tape &t) { return m.Loss(t, store, nadine); }, {}, 1e-5, 40)
            .max_rel_error;
  }
  {
    Rng rng = MakeRng(405);
    ParamStore store;
    store.Add("w", Tensor::Gaussian(5, 1, 1.0, rng));
    store.Add("b", Tensor::Scalar(-0.2));
    const Tensor x = Tensor::Gaussian(8, 5, 1.0, rng);
    const std::vector<int> y = {1, 0, 0, 1, 1, 0, 1, 0};
    err["logistic"] = testing::GradCheck(store, [&](Tape &t) {
                        return LogisticLoss(t, t.Constant(x), t.Param(store, "w"),
                                            t.Param(store, "b"), y, 0.01);
                      }).max_rel_error;
  }
  {
    TaggerConfig tc;
    tc.encoder.token_dim = 6;
    tc.encoder.context_hidden = 4;
    tc.coref.mention_hidden = 6;
    tc.coref.pair_hidden = 6;
    tc.coref.top_span_ratio = 0.5;
    tc.srl.hidden = 6;
    Taggers taggers(tc, Vocabulary::Build({nadine}));
    ParamStore store;
    Rng rng = MakeRng(406);
    taggers.InitParams(store, rng);
    for (const char *n : {"coref/encoder/emb", "srl/encoder/emb"}) {
      for (double &v : store.get(n).data) v *= 50.0;
    }
    for (double &v : store.get("srl/w_out").data) v *= 30.0;
    double worst = 0.0;
    for (TaggerTask task : {TaggerTask::kCoref, TaggerTask::kSrl}) {
      Rng erng = MakeRng(407);
      Episode e = SampleEpisode(taggers, store, store, nadine, task, erng);
      worst = std::max(
          worst, testing::GradCheck(
                     store,
                     [&](Tape &t) { return ReinforceSurrogate(t, taggers, store, nadine, e, 0.7); },
                     store.names_with_prefix(task == TaggerTask::kCoref ? "coref/" : "srl/"),
                     task == TaggerTask::kCoref ? 1e-6 : 1e-5, 25)
                     .max_rel_error);
    }
    err["reinforce surrogate"] = worst;
  }
  bool ok = true;
  std::string detail;
  for (const auto &[k, v] : err) {
    ok &= v < 1e-4;
    detail += (detail.empty() ? "" : ", ") + k + " " + Fmt("%.1e", v);
  }
  return {ok, "max relative error: " + detail};
}

// ---------------------------------------------------------------------------

Outcome CoherenceAccuracy() {
  SynthConfig sc = SynthConfig::Default();
  sc.count = 200;
  const uint64_t seed = 1;
  std::vector<Document> train, held;
  for (Document &d : SynthesizeCorpus(sc, seed)) (IsHeldOut(d.id, 0.2) ? held : train).push_back(d);
  TokenEncoder enc("encoder", EncoderConfig{}, Vocabulary::Build(train));
  ParamStore ep;
  Rng rng = MakeRng(seed, 7);
  enc.InitParams(ep, rng);
  CoherenceConfig cc;  // hidden 512, single thread
  CoherenceModel model = TrainCoherence(train, enc, ep, cc, seed).model;
  CoherenceEvaluation ev = EvaluateCoherence(model, held, seed + 99);
  double top = 0.0, low = 1.0;
  std::string detail;
  for (const auto &[t, a] : ev.accuracy) {
    top = std::max(top, a);
    low = std::min(low, a);
    detail += std::string(detail.empty() ? "" : " ") + PerturbationName(t) + "=" + Fmt("%.3f", a);
  }
  const double drop_srl = ev.accuracy.at(PerturbationType::kSrlDropArgument);
  const double drop_coref = ev.accuracy.at(PerturbationType::kCorefDropAntecedent);
  const bool ok = ev.accuracy.size() == 9 && low >= 0.90 && top - drop_srl <= 0.02 &&
                  top - drop_coref <= 0.02;
  return {ok, std::to_string(held.size()) + " held-out docs; min " + Fmt("%.3f", low) +
                  ", drop types within " + Fmt("%.3f", top - std::min(drop_srl, drop_coref)) +
                  " of top; " + detail};
}

// ---------------------------------------------------------------------------

// Criteria 6 and 7 share the same five fine-tuning runs.
double finetune_runs_s = 0.0;

std::vector<PipelineSummary> &FinetuneRuns() {
  static std::vector<PipelineSummary> runs;
  if (runs.empty()) {
    const auto t0 = std::chrono::steady_clock::now();
    const PipelineConfig cfg = PipelineConfig::Default();
    for (uint64_t seed = 1; seed <= 5; ++seed) runs.push_back(RunPipeline(cfg, seed));
    finetune_runs_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return runs;
}

Outcome HillClimbingMonotone() {
  bool ok = true;
  std::string detail;
  for (size_t i = 0; i < FinetuneRuns().size(); ++i) {
    const PipelineSummary &s = FinetuneRuns()[i];
    ok &= s.finetuned_metric >= s.baseline_metric;
    // The incumbent only moves on accepted batches, and only upwards.
    double incumbent = s.baseline_metric;
    for (const auto &row : s.finetune.trace) {
      if (row.accepted) {
        ok &= row.dev_metric > incumbent;
        incumbent = row.dev_metric;
      }
    }
    ok &= incumbent == s.finetuned_metric;
    detail += (detail.empty() ? "" : ", ") + std::string("seed ") + std::to_string(i + 1) + " " +
              Fmt("%.4f", s.baseline_metric) + "->" + Fmt("%.4f", s.finetuned_metric);
  }
  return {ok, detail};
}

Outcome FinetuneEfficacy() {
  const bool cached = finetune_runs_s > 0.0;
  int wins = 0;
  std::string detail;
  for (size_t i = 0; i < FinetuneRuns().size(); ++i) {
    const PipelineSummary &s = FinetuneRuns()[i];
    const double gain = s.finetuned_metric - s.baseline_metric;
    wins += gain > 0.0;
    detail += (detail.empty() ? "" : ", ") + Fmt("%+.4f", gain);
  }
  return {wins >= 3, std::to_string(wins) + "/5 seeds gain dev avg-F1 (" + detail + ")",
          cached ? finetune_runs_s : 0.0};
}

// ---------------------------------------------------------------------------

Outcome ConstrainedDecoding() {
  Rng rng = MakeRng(808);
  int sequences = 0, mismatches = 0;
  const std::vector<std::vector<std::string>> inventories = {{}, {"A"}, {"A", "B"}};
  for (const auto &roles : inventories) {
    BioLabels labels(roles);
    for (int n = 1; n <= 6; ++n) {
      for (int trial = 0; trial < 30; ++trial) {
        Tensor p = testing::RandomStochastic(rng, n, labels.size());
        if (trial % 3 == 0) {
          // Push mass onto inside tags so the unconstrained argmax is illegal.
          for (int t = 0; t < n; ++t) {
            for (int l = 0; l < labels.size(); ++l) {
              if (labels.is_inside(l)) p.at(t, l) *= 20.0;
            }
          }
        }
        const std::vector<int> tags = DecodeBio(p, labels);
        const auto [best_p, best] = testing::BruteForceBio(p, labels);
        ++sequences;
        if (!testing::LegalBioStrings(tags, labels) ||
            std::abs(testing::PathProb(p, tags) - best_p) > 1e-15 * std::max(1.0, best_p)) {
          ++mismatches;
        }
      }
    }
  }
  BioLabels full;
  int illegal = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = UniformInt(rng, 1, 15);
    Tensor p = testing::RandomStochastic(rng, n, full.size());
    if (trial % 2 == 0) {
      for (int t = 0; t < n; ++t) {
        for (int l = 0; l < full.size(); ++l) {
          if (full.is_inside(l)) p.at(t, l) *= 50.0;
        }
      }
    }
    illegal += !testing::LegalBioStrings(DecodeBio(p, full), full);
  }
  return {mismatches == 0 && illegal == 0,
          std::to_string(mismatches) + " mismatches vs exhaustive search on " +
              std::to_string(sequences) + " inputs; " + std::to_string(illegal) +
              " illegal outputs on 10000 random inputs"};
}

// ---------------------------------------------------------------------------

Outcome RoundTrips() {
  SynthConfig sc = SynthConfig::Default();
  sc.count = 1000;
  const std::vector<Document> docs = SynthesizeCorpus(sc, 909);
  int bad_docs = 0, bad_graphs = 0;
  const bool corpus_ok = ParseJsonlString(SerializeJsonlString(docs)) == docs;
  Rng rng = MakeRng(910);
  for (size_t i = 0; i < docs.size(); ++i) {
    bad_docs += ParseJsonlString(SerializeJsonlString({docs[i]})) != std::vector<Document>{docs[i]};
    Ssg g = BuildSsg(docs[i]);
    // Every other graph is perturbed so the edge inventory varies.
    if (i % 2) {
      g = ApplyPerturbation(g, kAllPerturbationTypes[i % kPerturbationTypeCount], 0.8, rng,
                            PerturbationConfig::Default())
              .graph;
    }
    const std::string text = SerializeSsg(g);
    const Ssg back = ParseSsg(text);
    bad_graphs += !(back == g) || SerializeSsg(back) != text;
  }
  return {corpus_ok && bad_docs == 0 && bad_graphs == 0,
          std::to_string(bad_docs) + " document and " + std::to_string(bad_graphs) +
              " graph mismatches over 1000; whole corpus " + (corpus_ok ? "equal" : "differs")};
}

// ---------------------------------------------------------------------------

Outcome Bandit() {
  ParamStore store;
  store.Add("logits", Tensor::Zeros(1, 2));
  Rng rng = MakeRng(1010);
  const double lr = 3e-4 * 100;
  auto best_prob = [&] {
    const Tensor &l = store.get("logits");
    return 1.0 / (1.0 + std::exp(l.data[0] - l.data[1]));
  };
  int first = -1;
  for (int step = 0; step < 500; ++step) {
    Tape tape;
    Var lp = tape.LogSoftmaxRows(tape.Param(store, "logits"));
    const Tensor &v = tape.value(lp);
    const int a = SampleIndex(rng, {std::exp(v.data[0]), std::exp(v.data[1])});
    const double reward = a == 1 ? 1.0 : 0.0;
    AdamStep(store, tape.Backward(PolicyGradientLoss(tape, {tape.Pick(lp, 0, a)}, reward)), lr,
             0.0);
    if (first < 0 && best_prob() > 0.99) first = step + 1;
  }
  return {best_prob() > 0.99, "pi(best) " + Fmt("%.5f", best_prob()) + " after 500 updates (lr " +
                                  Fmt("%.0e", lr) + "), first above 0.99 at update " +
                                  std::to_string(first)};
}

struct Criterion {
  int id;
  const char *name;
  double budget_s;  // 0 = no runtime bound
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace ssgc

int main(int argc, char **argv) {
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  using namespace ssgc;
  const std::vector<Criterion> all = {
      {1, "metric oracle equivalence", 10, MetricOracles},
      {2, "perturbation sampler frequencies", 0, SamplerFrequencies},
      {3, "readout identity", 0, ReadoutIdentity},
      {4, "gradient checks", 60, GradientChecks},
      {5, "coherence classifier accuracy", 600, CoherenceAccuracy},
      {6, "hill-climbing monotonicity", 0, HillClimbingMonotone},
      {7, "fine-tuning efficacy", 900, FinetuneEfficacy},
      {8, "constrained decoding", 0, ConstrainedDecoding},
      {9, "serialization round trips", 0, RoundTrips},
      {10, "REINFORCE bandit", 0, Bandit},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const Criterion &c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() + o.shared_s;
    std::string timing = Fmt("%.1fs", secs);
    if (c.budget_s > 0) {
      timing += " (limit " + Fmt("%.0fs", c.budget_s) + ")";
      if (secs >= c.budget_s) {
        o.pass = false;
        o.detail += "; over the time limit";
      }
    }
    std::printf("%s [%d] %s: %s [%s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
