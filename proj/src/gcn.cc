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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssgc/error.h"

namespace ssgc {

void ValidateGcnConfig(const GcnConfig &cfg) {
  if (cfg.layers < 1) throw ConfigError("gcn layers must be >= 1");
  if (cfg.hidden <= 0 || cfg.type_dim <= 0 || cfg.edge_label_dim <= 0) {
    throw ConfigError("gcn dims must be positive");
  }
}

SpanFeaturizer::SpanFeaturizer(const TokenEncoder &encoder, const ParamStore &encoder_params)
    : encoder_(encoder), params_(encoder_params) {}

void SpanFeaturizer::AddDocument(const Document &doc) {
  if (tokens_.count(doc.id)) return;
  Tape tape;
  tokens_[doc.id] = tape.value(encoder_.EncodeTokens(tape, params_, doc));
}

Tensor SpanFeaturizer::SpanFeatures(const Ssg &g) const {
  auto it = tokens_.find(g.doc_id);
  if (it == tokens_.end()) throw ValidationError("no document '" + g.doc_id + "' for graph");
  if (it->second.rows() != g.token_count) {
    throw ValidationError("graph '" + g.doc_id + "' has " + std::to_string(g.token_count) +
                          " tokens, document has " + std::to_string(it->second.rows()));
  }
  const int dim = span_dim();
  Tensor out = Tensor::Zeros(static_cast<int>(g.nodes.size()), dim);
  std::vector<Span> spans;
  std::vector<int> rows;
  for (const SsgNode &n : g.nodes) {
    if (!n.span) continue;
    spans.push_back(*n.span);
    rows.push_back(n.id);
  }
  if (spans.empty()) return out;
  Tape tape;
  Var tok = tape.Constant(it->second);
  const Tensor &enc = tape.value(encoder_.EncodeSpans(tape, params_, tok, spans));
  for (size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(enc.data.begin() + i * dim, dim, out.data.begin() + static_cast<size_t>(rows[i]) * dim);
  }
  return out;
}

GraphEncoder::GraphEncoder(std::string prefix, GcnConfig cfg, int span_dim,
                           const RoleInventory &roles)
    : prefix_(std::move(prefix)), cfg_(cfg), span_dim_(span_dim) {
  ValidateGcnConfig(cfg_);
  if (span_dim_ < 0) throw ConfigError("negative span dim");
  labels_.push_back("<unk>");
  for (const auto &r : roles.labels()) labels_.push_back(r);
  labels_.push_back(kCorefLabel);
  labels_.push_back(kRootLabel);
  for (size_t i = 0; i < labels_.size(); ++i) label_index_[labels_[i]] = static_cast<int>(i);
}

int GraphEncoder::label_index(const std::string &label) const {
  auto it = label_index_.find(label);
  return it == label_index_.end() ? 0 : it->second;
}

namespace {

Tensor Glorot(int in, int out, Rng &rng) {
  return Tensor::Gaussian(in, out, std::sqrt(2.0 / (in + out)), rng);
}

}  // namespace

void GraphEncoder::InitParams(ParamStore &store, Rng &rng) const {
  store.Add(name("type_emb"), Tensor::Gaussian(kNodeTypeCount, cfg_.type_dim, 0.5, rng));
  if (cfg_.edge_labels) {
    store.Add(name("label_emb"),
              Tensor::Gaussian(static_cast<int>(labels_.size()), cfg_.edge_label_dim, 0.5, rng));
  }
  int in = feature_dim();
  for (int l = 0; l < cfg_.layers; ++l) {
    const std::string s = std::to_string(l);
    if (cfg_.split_edge_kinds) {
      store.Add(name("w_srl" + s), Glorot(in, cfg_.hidden, rng));
      store.Add(name("w_coref" + s), Glorot(in, cfg_.hidden, rng));
    } else {
      store.Add(name("w_adj" + s), Glorot(in, cfg_.hidden, rng));
    }
    store.Add(name("w_self" + s), Glorot(in, cfg_.hidden, rng));
    if (cfg_.edge_labels) {
      store.Add(name("w_label" + s), Glorot(cfg_.edge_label_dim, cfg_.hidden, rng));
    }
    in = cfg_.hidden;
  }
}

Tensor NormalizedAdjacency(int nodes, const std::vector<std::pair<int, int>> &edges) {
  Tensor a = Tensor::Zeros(nodes, nodes);
  for (auto [u, v] : edges) {
    if (u == v) continue;
    a.at(u, v) += 1.0;
    a.at(v, u) += 1.0;
  }
  std::vector<double> inv_sqrt(nodes);
  for (int i = 0; i < nodes; ++i) {
    double deg = 0;
    for (int j = 0; j < nodes; ++j) deg += a.at(i, j);
    inv_sqrt[i] = 1.0 / std::sqrt(std::max(deg, 1.0));
  }
  for (int i = 0; i < nodes; ++i) {
    for (int j = 0; j < nodes; ++j) a.at(i, j) *= inv_sqrt[i] * inv_sqrt[j];
  }
  return a;
}

GraphInput GraphEncoder::Prepare(const Ssg &g, Tensor span_features) const {
  GraphInput in;
  in.nodes = static_cast<int>(g.nodes.size());
  if (in.nodes == 0) throw ValidationError("graph without nodes");
  if (span_features.rows() != in.nodes || span_features.cols() != span_dim_) {
    throw ShapeError("span features " + ShapeString(span_features) + " for " +
                     std::to_string(in.nodes) + " nodes of width " + std::to_string(span_dim_));
  }
  in.span_features = std::move(span_features);
  for (int i = 0; i < in.nodes; ++i) {
    if (g.nodes[i].id != i) throw ValidationError("node ids must equal positions");
    in.types.push_back(g.nodes[i].type_index);
  }
  std::vector<std::pair<int, int>> srl, coref, all;
  for (const SsgEdge &e : g.edges) {
    if (e.src < 0 || e.dst < 0 || e.src >= in.nodes || e.dst >= in.nodes) {
      throw ValidationError("edge endpoint out of range");
    }
    (e.kind == EdgeKind::kCoref ? coref : srl).push_back({e.src, e.dst});
    all.push_back({e.src, e.dst});
  }
  in.adj_srl = SparseMatrix::FromDense(NormalizedAdjacency(in.nodes, srl));
  in.adj_coref = SparseMatrix::FromDense(NormalizedAdjacency(in.nodes, coref));
  in.adj_all = SparseMatrix::FromDense(NormalizedAdjacency(in.nodes, all));
  in.offsets = {0, in.nodes};
  in.label_bag = Tensor::Zeros(in.nodes, static_cast<int>(labels_.size()));
  std::vector<int> indeg(in.nodes, 0);
  for (const SsgEdge &e : g.edges) {
    in.label_bag.at(e.dst, label_index(e.label)) += 1.0;
    ++indeg[e.dst];
  }
  for (int i = 0; i < in.nodes; ++i) {
    if (indeg[i] == 0) continue;
    for (int j = 0; j < in.label_bag.cols(); ++j) in.label_bag.at(i, j) /= indeg[i];
  }
  return in;
}

GraphInput BatchInputs(const std::vector<const GraphInput *> &inputs) {
  if (inputs.empty()) throw ValidationError("empty graph batch");
  if (inputs.size() == 1) return *inputs[0];
  GraphInput out;
  const int width = inputs[0]->span_features.cols();
  const int labels = inputs[0]->label_bag.cols();
  std::vector<const SparseMatrix *> srl, coref, all;
  out.offsets = {0};
  for (const GraphInput *in : inputs) {
    if (in->span_features.cols() != width || in->label_bag.cols() != labels) {
      throw ShapeError("graph batch with mixed feature widths");
    }
    for (int g = 0; g < in->graphs(); ++g) out.offsets.push_back(out.nodes + in->offsets[g + 1]);
    out.nodes += in->nodes;
    out.types.insert(out.types.end(), in->types.begin(), in->types.end());
    srl.push_back(&in->adj_srl);
    coref.push_back(&in->adj_coref);
    all.push_back(&in->adj_all);
  }
  out.span_features = Tensor::Zeros(out.nodes, width);
  out.label_bag = Tensor::Zeros(out.nodes, labels);
  size_t f = 0, l = 0;
  for (const GraphInput *in : inputs) {
    std::copy(in->span_features.data.begin(), in->span_features.data.end(),
              out.span_features.data.begin() + f);
    std::copy(in->label_bag.data.begin(), in->label_bag.data.end(), out.label_bag.data.begin() + l);
    f += in->span_features.data.size();
    l += in->label_bag.data.size();
  }
  out.adj_srl = SparseMatrix::BlockDiagonal(srl);
  out.adj_coref = SparseMatrix::BlockDiagonal(coref);
  out.adj_all = SparseMatrix::BlockDiagonal(all);
  return out;
}

Var GraphEncoder::Features(Tape &tape, const ParamStore &store, const GraphInput &in) const {
  Var types = tape.GatherRows(tape.Param(store, name("type_emb")), in.types);
  if (span_dim_ == 0) return types;
  return tape.ConcatCols({tape.Constant(in.span_features), types});
}

Var GraphEncoder::NodeEncodings(Tape &tape, const ParamStore &store, const GraphInput &in) const {
  Var h = Features(tape, store, in);
  Var labels;
  if (cfg_.edge_labels) {
    labels = tape.MatMul(tape.Constant(in.label_bag), tape.Param(store, name("label_emb")));
  }
  for (int l = 0; l < cfg_.layers; ++l) {
    const std::string s = std::to_string(l);
    Var out = tape.MatMul(h, tape.Param(store, name("w_self" + s)));
    if (cfg_.split_edge_kinds) {
      out = tape.Add(out, tape.SparseMatMul(in.adj_srl,
                                            tape.MatMul(h, tape.Param(store, name("w_srl" + s)))));
      out = tape.Add(out, tape.SparseMatMul(
                              in.adj_coref, tape.MatMul(h, tape.Param(store, name("w_coref" + s)))));
    } else {
      out = tape.Add(out, tape.SparseMatMul(in.adj_all,
                                            tape.MatMul(h, tape.Param(store, name("w_adj" + s)))));
    }
    if (cfg_.edge_labels) {
      out = tape.Add(out, tape.MatMul(labels, tape.Param(store, name("w_label" + s))));
    }
    h = l + 1 < cfg_.layers ? tape.Relu(out) : out;
  }
  return h;
}

Var GraphEncoder::Readout(Tape &tape, Var nodes) const {
  return tape.Sigmoid(tape.MeanRows(nodes));
}

Var GraphEncoder::SegmentReadout(Tape &tape, Var nodes, const std::vector<int> &offsets) const {
  std::vector<Var> rows;
  for (size_t g = 0; g + 1 < offsets.size(); ++g) {
    rows.push_back(tape.MeanRows(tape.SliceRows(nodes, offsets[g], offsets[g + 1] - offsets[g])));
  }
  return tape.Sigmoid(rows.size() == 1 ? rows[0] : tape.ConcatRows(rows));
}

GraphEncoding GraphEncoder::Encode(const ParamStore &store, const GraphInput &in) const {
  Tape tape;
  Var nodes = NodeEncodings(tape, store, in);
  Var g = Readout(tape, nodes);
  return {tape.value(nodes), tape.value(g)};
}

void InitDiscriminator(const GraphEncoder &enc, ParamStore &store) {
  store.AddOrGet(enc.name("dgi_M"), Tensor::Zeros(enc.output_dim(), enc.output_dim()));
}

namespace {

// Logits h_r^T M s_g(r) for every node row, as a column, where rows of
// `summaries` are matched to rows of `nodes` through `graph_of`.
Var DiscriminatorLogits(Tape &tape, const GraphEncoder &enc, const ParamStore &store, Var nodes,
                        Var summaries, const std::vector<int> &graph_of) {
  Var hm = tape.MatMul(nodes, tape.Param(store, enc.name("dgi_M")));
  Var s = tape.GatherRows(summaries, graph_of);
  const int c = tape.value(hm).cols();
  return tape.MatMul(tape.Mul(hm, s), tape.Constant(Tensor::Filled(c, 1, 1.0)));
}

std::vector<int> GraphOfRows(const std::vector<int> &offsets) {
  std::vector<int> out;
  for (size_t g = 0; g + 1 < offsets.size(); ++g) out.insert(out.end(), offsets[g + 1] - offsets[g], g);
  return out;
}

struct DgiBatch {
  GraphInput pos, neg;
  std::vector<int> pos_graph, neg_graph;
};

DgiBatch MakeBatch(const std::vector<const GraphInput *> &pos,
                   const std::vector<const GraphInput *> &neg) {
  if (pos.size() != neg.size()) throw ValidationError("dgi: list length mismatch");
  for (size_t i = 0; i < pos.size(); ++i) {
    if (pos[i]->graphs() != 1 || neg[i]->graphs() != 1) {
      throw ValidationError("dgi: expected single graphs");
    }
  }
  DgiBatch b{BatchInputs(pos), BatchInputs(neg), {}, {}};
  b.pos_graph = GraphOfRows(b.pos.offsets);
  b.neg_graph = GraphOfRows(b.neg.offsets);
  return b;
}

}  // namespace

Var DgiLoss(Tape &tape, const GraphEncoder &enc, const ParamStore &store,
            const std::vector<const GraphInput *> &pos, const std::vector<const GraphInput *> &neg) {
  DgiBatch b = MakeBatch(pos, neg);
  Var hp = enc.NodeEncodings(tape, store, b.pos);
  Var hn = enc.NodeEncodings(tape, store, b.neg);
  Var s = enc.SegmentReadout(tape, hp, b.pos.offsets);
  // Per-row weights turn the sum into a mean per graph, then over pairs.
  const double pairs = static_cast<double>(pos.size());
  auto weights = [&](const GraphInput &in, double sign) {
    Tensor w = Tensor::Zeros(in.nodes, 1);
    for (int g = 0; g < in.graphs(); ++g) {
      const int n = in.offsets[g + 1] - in.offsets[g];
      for (int r = in.offsets[g]; r < in.offsets[g + 1]; ++r) w.data[r] = sign / (n * pairs);
    }
    return w;
  };
  Var zp = DiscriminatorLogits(tape, enc, store, hp, s, b.pos_graph);
  Var zn = DiscriminatorLogits(tape, enc, store, hn, s, b.neg_graph);
  Var lp = tape.Sum(tape.Mul(tape.LogSigmoid(zp), tape.Constant(weights(b.pos, -1.0))));
  Var ln = tape.Sum(
      tape.Mul(tape.LogSigmoid(tape.Scale(zn, -1.0)), tape.Constant(weights(b.neg, -1.0))));
  return tape.Add(lp, ln);
}

Var DgiLoss(Tape &tape, const GraphEncoder &enc, const ParamStore &store, const GraphInput &pos,
            const GraphInput &neg) {
  return DgiLoss(tape, enc, store, std::vector<const GraphInput *>{&pos},
                 std::vector<const GraphInput *>{&neg});
}

std::vector<double> DgiPretrain(const GraphEncoder &enc, ParamStore &store,
                                const std::vector<GraphInput> &golds,
                                const std::vector<GraphInput> &perturbed, const DgiOptions &opts,
                                Rng &rng) {
  if (golds.size() != perturbed.size()) {
    throw ValidationError("dgi: " + std::to_string(golds.size()) + " gold graphs but " +
                          std::to_string(perturbed.size()) + " perturbed");
  }
  if (opts.batch_size < 1) throw ConfigError("dgi batch_size must be >= 1");
  InitDiscriminator(enc, store);
  std::vector<int> order(golds.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> losses;
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    if (opts.shuffle) std::shuffle(order.begin(), order.end(), rng);
    double total = 0;
    for (size_t start = 0; start < order.size(); start += opts.batch_size) {
      const size_t end = std::min(order.size(), start + opts.batch_size);
      std::vector<const GraphInput *> pos, neg;
      for (size_t k = start; k < end; ++k) {
        pos.push_back(&golds[order[k]]);
        neg.push_back(&perturbed[order[k]]);
      }
      Tape tape;
      Var loss = DgiLoss(tape, enc, store, pos, neg);
      total += tape.value(loss).item() * static_cast<double>(end - start);
      AdamStep(store, tape.Backward(loss), opts.lr, opts.weight_decay);
    }
    losses.push_back(golds.empty() ? 0.0 : total / golds.size());
  }
  return losses;
}

double DgiAccuracy(const GraphEncoder &enc, const ParamStore &store,
                   const std::vector<GraphInput> &golds, const std::vector<GraphInput> &perturbed) {
  if (golds.size() != perturbed.size()) throw ValidationError("dgi: list length mismatch");
  double correct = 0, total = 0;
  for (size_t i = 0; i < golds.size(); ++i) {
    Tape tape;
    Var hp = enc.NodeEncodings(tape, store, golds[i]);
    Var hn = enc.NodeEncodings(tape, store, perturbed[i]);
    Var s = enc.Readout(tape, hp);
    const std::vector<int> pos_rows(golds[i].nodes, 0), neg_rows(perturbed[i].nodes, 0);
    for (double x : tape.value(DiscriminatorLogits(tape, enc, store, hp, s, pos_rows)).data) {
      correct += x > 0;
    }
    for (double x : tape.value(DiscriminatorLogits(tape, enc, store, hn, s, neg_rows)).data) {
      correct += x < 0;
    }
    total += golds[i].nodes + perturbed[i].nodes;
  }
  return total > 0 ? correct / total : 0.0;
}

}  // namespace ssgc
