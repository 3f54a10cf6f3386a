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

#include "ssgc/gcn.h"

#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.h"
#include "gradcheck.h"
#include "ssgc/error.h"
#include "ssgc/perturb.h"

namespace ssgc {
namespace {

EncoderConfig SmallEncoder() {
  EncoderConfig cfg;
  cfg.token_dim = 6;
  cfg.context = false;
  cfg.init_std = 0.5;
  return cfg;
}

GcnConfig SmallGcn(int hidden = 7) {
  GcnConfig cfg;
  cfg.hidden = hidden;
  cfg.type_dim = 4;
  cfg.edge_label_dim = 3;
  return cfg;
}

struct World {
  std::vector<Document> docs;
  TokenEncoder tok;
  ParamStore tok_params;
  std::unique_ptr<SpanFeaturizer> feats;
  GraphEncoder gcn;
  ParamStore params;

  World(std::vector<Document> d, GcnConfig gcfg, uint64_t seed = 1) : docs(std::move(d)) {
    tok = TokenEncoder("enc", SmallEncoder(), Vocabulary::Build(docs));
    Rng rng = MakeRng(seed);
    tok.InitParams(tok_params, rng);
    feats = std::make_unique<SpanFeaturizer>(tok, tok_params);
    for (const auto &doc : docs) feats->AddDocument(doc);
    gcn = GraphEncoder("gcn", gcfg, tok.span_dim());
    gcn.InitParams(params, rng);
  }

  GraphInput Input(const Ssg &g) const { return gcn.Prepare(g, feats->SpanFeatures(g)); }
};

Tensor Sigmoid(const Tensor &t) {
  Tensor out = t;
  for (double &x : out.data) x = 1.0 / (1.0 + std::exp(-x));
  return out;
}

Tensor ExactMeanReadout(const Tensor &nodes) {
  Tensor mean = Tensor::Zeros(1, nodes.cols());
  for (int j = 0; j < nodes.cols(); ++j) {
    double s = 0;
    for (int i = 0; i < nodes.rows(); ++i) s += nodes.at(i, j);
    mean.at(0, j) = s / nodes.rows();
  }
  return Sigmoid(mean);
}

TEST(Adjacency, Normalization) {
  Tensor a = NormalizedAdjacency(3, {{0, 1}, {1, 2}});
  EXPECT_DOUBLE_EQ(a.at(0, 1), 1.0 / std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(a.at(1, 0), a.at(0, 1));
  EXPECT_EQ(a.at(0, 2), 0.0);
  EXPECT_EQ(a.at(1, 1), 0.0);
  Tensor lonely = NormalizedAdjacency(2, {});
  EXPECT_EQ(lonely, Tensor::Zeros(2, 2));
}

TEST(Gcn, FeatureLayout) {
  World w({testing::NadineDocument()}, SmallGcn());
  Ssg g = BuildSsg(w.docs[0]);
  GraphInput in = w.Input(g);
  Tape tape;
  const Tensor &f = tape.value(w.gcn.Features(tape, w.params, in));
  EXPECT_EQ(f.cols(), 3 * 6 + 4);
  EXPECT_EQ(f.rows(), static_cast<int>(g.nodes.size()));
  for (int j = 0; j < w.gcn.span_dim(); ++j) EXPECT_EQ(f.at(0, j), 0.0);
  // spans are unique in the graph
  std::set<Span> seen;
  for (const auto &n : g.nodes) {
    if (n.span) EXPECT_TRUE(seen.insert(*n.span).second);
  }
  // type slice matches the embedding row
  const Tensor &emb = w.params.get("gcn/type_emb");
  for (int i = 0; i < f.rows(); ++i) {
    for (int j = 0; j < 4; ++j) EXPECT_EQ(f.at(i, 18 + j), emb.at(g.nodes[i].type_index, j));
  }
}

TEST(Gcn, ZeroParamsGiveHalf) {
  World w({testing::NadineDocument()}, SmallGcn());
  for (const auto &name : w.params.names()) {
    Tensor &t = w.params.get(name);
    std::fill(t.data.begin(), t.data.end(), 0.0);
  }
  GraphEncoding e = w.gcn.Encode(w.params, w.Input(BuildSsg(w.docs[0])));
  for (double x : e.node_matrix.data) EXPECT_EQ(x, 0.0);
  for (double x : e.graph_vector.data) EXPECT_EQ(x, 0.5);
}

TEST(Gcn, RootOnlyGraph) {
  Document d;
  d.id = "bare";
  d.sentences = {{"Nothing", "happens", "."}};
  World w({d}, SmallGcn());
  Ssg g = BuildSsg(d);
  ASSERT_EQ(g.nodes.size(), 1u);
  GraphEncoding e = w.gcn.Encode(w.params, w.Input(g));
  const Tensor expect = Sigmoid(e.node_matrix);
  ASSERT_TRUE(e.graph_vector.same_shape(expect));
  for (size_t j = 0; j < expect.size(); ++j) EXPECT_NEAR(e.graph_vector.data[j], expect.data[j], 1e-15);
}

TEST(Gcn, ReadoutIdentityOnRandomGraphs) {
  SynthConfig sc = SynthConfig::Default();
  sc.count = 20;
  World w(SynthesizeCorpus(sc, 4), SmallGcn(16));
  Rng rng = MakeRng(2);
  for (int i = 0; i < 100; ++i) {
    Ssg g = BuildSsg(w.docs[i % 20]);
    if (i >= 20) {
      const auto type = kAllPerturbationTypes[i % kPerturbationTypeCount];
      g = ApplyPerturbation(g, type, 0.8, rng, PerturbationConfig::Default()).graph;
    }
    GraphEncoding e = w.gcn.Encode(w.params, w.Input(g));
    const Tensor expect = ExactMeanReadout(e.node_matrix);
    for (int j = 0; j < expect.cols(); ++j) EXPECT_NEAR(e.graph_vector.data[j], expect.data[j], 1e-12);
  }
}

// Reverses node ids 1..N-1 and remaps edges, keeping the graph otherwise equal.
Ssg Permuted(const Ssg &g, Rng &rng) {
  const int n = static_cast<int>(g.nodes.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Ssg out = g;
  for (int i = 0; i < n; ++i) {
    out.nodes[perm[i]] = g.nodes[i];
    out.nodes[perm[i]].id = perm[i];
  }
  for (auto &e : out.edges) {
    e.src = perm[e.src];
    e.dst = perm[e.dst];
  }
  return out;
}

TEST(Gcn, NodeOrderInvariance) {
  SynthConfig sc = SynthConfig::Default();
  sc.count = 10;
  for (bool split : {true, false}) {
    GcnConfig cfg = SmallGcn(12);
    cfg.split_edge_kinds = split;
    World w(SynthesizeCorpus(sc, 8), cfg);
    Rng rng = MakeRng(5);
    for (const auto &doc : w.docs) {
      Ssg g = BuildSsg(doc);
      Ssg p = Permuted(g, rng);
      GraphEncoding a = w.gcn.Encode(w.params, w.Input(g));
      GraphEncoding b = w.gcn.Encode(w.params, w.Input(p));
      for (int j = 0; j < a.graph_vector.cols(); ++j) {
        EXPECT_NEAR(a.graph_vector.data[j], b.graph_vector.data[j], 1e-9);
      }
    }
  }
}

TEST(Gcn, EdgeKindSensitivity) {
  World w({testing::NadineDocument()}, SmallGcn(12));
  Ssg g = BuildSsg(w.docs[0]);
  Ssg flipped = g;
  for (auto &e : flipped.edges) {
    if (e.kind == EdgeKind::kSrl) {
      e.kind = EdgeKind::kCoref;
      break;
    }
  }
  GcnConfig cfg = SmallGcn(12);
  cfg.edge_labels = false;  // labels alone would also change the encoding
  World nolabel({testing::NadineDocument()}, cfg);
  for (World *world : {&w, &nolabel}) {
    GraphEncoding a = world->gcn.Encode(world->params, world->Input(g));
    GraphEncoding b = world->gcn.Encode(world->params, world->Input(flipped));
    double diff = 0;
    for (int j = 0; j < a.graph_vector.cols(); ++j) {
      diff += std::abs(a.graph_vector.data[j] - b.graph_vector.data[j]);
    }
    EXPECT_GT(diff, 1e-6);
  }
}

TEST(Gcn, GradCheckFigureOne) {
  for (bool split : {true, false}) {
    GcnConfig cfg = SmallGcn(5);
    cfg.layers = 3;
    cfg.split_edge_kinds = split;
    World w({testing::NadineDocument()}, cfg, 3);
    GraphInput in = w.Input(BuildSsg(w.docs[0]));
    Rng rng = MakeRng(4);
    const Tensor probe = Tensor::Gaussian(1, 5, 1.0, rng);
    auto loss = [&](Tape &tape) {
      Var gv = w.gcn.Readout(tape, w.gcn.NodeEncodings(tape, w.params, in));
      return tape.Sum(tape.Mul(gv, tape.Constant(probe)));
    };
    auto r = testing::GradCheck(w.params, loss);
    EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
  }
}

TEST(Gcn, PrepareErrors) {
  World w({testing::NadineDocument()}, SmallGcn());
  Ssg g = BuildSsg(w.docs[0]);
  EXPECT_THROW(w.gcn.Prepare(g, Tensor::Zeros(2, w.gcn.span_dim())), ShapeError);
  Ssg other = g;
  other.doc_id = "elsewhere";
  EXPECT_THROW(w.feats->SpanFeatures(other), ValidationError);
  other = g;
  other.token_count = 99;
  EXPECT_THROW(w.feats->SpanFeatures(other), ValidationError);
}

TEST(Dgi, InitialLossAtZeroDiscriminator) {
  World w({testing::NadineDocument()}, SmallGcn());
  InitDiscriminator(w.gcn, w.params);
  Ssg g = BuildSsg(w.docs[0]);
  Rng rng = MakeRng(1);
  Ssg p = ApplyPerturbationChanged(g, PerturbationType::kSrlDropArgument, 0.8, rng,
                                   PerturbationConfig::Default())
              .graph;
  Tape tape;
  Var loss = DgiLoss(tape, w.gcn, w.params, w.Input(g), w.Input(p));
  EXPECT_NEAR(tape.value(loss).item(), 1.3862943611198906, 1e-12);
}

TEST(Dgi, GradCheck) {
  World w({testing::NadineDocument()}, SmallGcn(4), 6);
  InitDiscriminator(w.gcn, w.params);
  Rng rng = MakeRng(2);
  Tensor &m = w.params.get("gcn/dgi_M");
  m = Tensor::Gaussian(4, 4, 0.5, rng);
  Ssg g = BuildSsg(w.docs[0]);
  Ssg p = ApplyPerturbationChanged(g, PerturbationType::kCorefDropAntecedent, 0.8, rng,
                                   PerturbationConfig::Default())
              .graph;
  GraphInput a = w.Input(g), b = w.Input(p);
  auto r = testing::GradCheck(w.params, [&](Tape &t) { return DgiLoss(t, w.gcn, w.params, a, b); });
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
}

TEST(Dgi, LengthMismatch) {
  World w({testing::NadineDocument()}, SmallGcn());
  GraphInput a = w.Input(BuildSsg(w.docs[0]));
  Rng rng = MakeRng(1);
  EXPECT_THROW(DgiPretrain(w.gcn, w.params, {a, a}, {a}, {}, rng), ValidationError);
}

std::vector<std::pair<GraphInput, GraphInput>> SomePairs(World &w, int n, uint64_t seed) {
  Rng rng = MakeRng(seed);
  std::vector<std::pair<GraphInput, GraphInput>> out;
  for (int i = 0; i < n; ++i) {
    Ssg g = BuildSsg(w.docs[i % w.docs.size()]);
    Ssg p = ApplyPerturbationChanged(g, PerturbationType::kSrlChangeBoundary, 0.8, rng,
                                     PerturbationConfig::Default())
                .graph;
    out.emplace_back(w.Input(g), w.Input(p));
  }
  return out;
}

TEST(Dgi, BatchedEncodingMatchesSingles) {
  SynthConfig sc = SynthConfig::Default();
  sc.count = 4;
  World w(SynthesizeCorpus(sc, 8), SmallGcn(6), 8);
  auto pairs = SomePairs(w, 4, 8);
  std::vector<const GraphInput *> ins;
  for (const auto &pr : pairs) ins.push_back(&pr.first);
  GraphInput batch = BatchInputs(ins);
  ASSERT_EQ(batch.graphs(), 4);
  Tape tape;
  Var nodes = w.gcn.NodeEncodings(tape, w.params, batch);
  Var readout = w.gcn.SegmentReadout(tape, nodes, batch.offsets);
  for (int i = 0; i < 4; ++i) {
    GraphEncoding single = w.gcn.Encode(w.params, *ins[i]);
    const int off = batch.offsets[i];
    for (int r = 0; r < ins[i]->nodes; ++r) {
      for (int c = 0; c < 6; ++c) {
        EXPECT_NEAR(tape.value(nodes).at(off + r, c), single.node_matrix.at(r, c), 1e-12);
      }
    }
    for (int c = 0; c < 6; ++c) {
      EXPECT_NEAR(tape.value(readout).at(i, c), single.graph_vector.at(0, c), 1e-12);
    }
  }
}

TEST(Dgi, BatchedLossIsMeanOfPairs) {
  SynthConfig sc = SynthConfig::Default();
  sc.count = 3;
  World w(SynthesizeCorpus(sc, 9), SmallGcn(5), 9);
  InitDiscriminator(w.gcn, w.params);
  Rng rng = MakeRng(9);
  w.params.get("gcn/dgi_M") = Tensor::Gaussian(5, 5, 0.5, rng);
  auto pairs = SomePairs(w, 3, 9);
  std::vector<const GraphInput *> pos, neg;
  double mean = 0.0;
  for (const auto &pr : pairs) {
    pos.push_back(&pr.first);
    neg.push_back(&pr.second);
    Tape t;
    mean += t.value(DgiLoss(t, w.gcn, w.params, pr.first, pr.second)).item() / 3.0;
  }
  Tape tape;
  EXPECT_NEAR(tape.value(DgiLoss(tape, w.gcn, w.params, pos, neg)).item(), mean, 1e-12);
  auto r = testing::GradCheck(w.params, [&](Tape &t) { return DgiLoss(t, w.gcn, w.params, pos, neg); },
                              {}, 1e-5, 30);
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
}

TEST(Dgi, TrainsOnSyntheticCorpus) {
  SynthConfig sc = SynthConfig::Default();
  sc.count = 60;
  World w(SynthesizeCorpus(sc, 21), SmallGcn(32));
  Rng rng = MakeRng(3);
  std::vector<GraphInput> gt, pt, gh, ph;
  for (size_t i = 0; i < w.docs.size(); ++i) {
    Ssg g = BuildSsg(w.docs[i]);
    Ssg p = ApplyPerturbationChanged(g, PerturbationType::kSrlDropArgument, 0.8, rng,
                                     PerturbationConfig::Default())
                .graph;
    (i < 45 ? gt : gh).push_back(w.Input(g));
    (i < 45 ? pt : ph).push_back(w.Input(p));
  }
  DgiOptions opts;
  opts.epochs = 5;
  auto losses = DgiPretrain(w.gcn, w.params, gt, pt, opts, rng);
  ASSERT_EQ(losses.size(), 5u);
  EXPECT_LT(losses[0], 1.3862943611198906);
  for (size_t e = 1; e < losses.size(); ++e) EXPECT_LE(losses[e], losses[e - 1]) << "epoch " << e;
  EXPECT_GT(DgiAccuracy(w.gcn, w.params, gh, ph), 0.5);
}

}  // namespace
}  // namespace ssgc
