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

#ifndef SSGC_GCN_H_
#define SSGC_GCN_H_

#include <map>
#include <string>
#include <vector>

#include "ssgc/corpus.h"
#include "ssgc/encoder.h"
#include "ssgc/optim.h"
#include "ssgc/rng.h"
#include "ssgc/ssg.h"
#include "ssgc/tape.h"

namespace ssgc {

struct GcnConfig {
  int hidden = 512;
  int layers = 2;
  int type_dim = 20;
  // Separate propagation weights for Srl (with Root) and Coref edges; when
  // off, a single adjacency over all edges is used.
  bool split_edge_kinds = true;
  bool edge_labels = true;
  int edge_label_dim = 8;
};

void ValidateGcnConfig(const GcnConfig &cfg);

// Frozen span features from a token encoder, cached per document.
class SpanFeaturizer {
 public:
  SpanFeaturizer(const TokenEncoder &encoder, const ParamStore &encoder_params);

  void AddDocument(const Document &doc);
  bool has(const std::string &doc_id) const { return tokens_.count(doc_id) > 0; }
  int span_dim() const { return encoder_.span_dim(); }

  // N x span_dim, row i for node i; the root row is zero. Throws
  // ValidationError if the graph does not fit its document.
  Tensor SpanFeatures(const Ssg &g) const;

 private:
  const TokenEncoder &encoder_;
  const ParamStore &params_;
  std::map<std::string, Tensor> tokens_;
};

// One graph, or several stacked block-diagonally, with everything the
// forward pass needs precomputed.
struct GraphInput {
  int nodes = 0;
  Tensor span_features;       // N x span_dim
  std::vector<int> types;     // node type indices
  SparseMatrix adj_srl;       // normalized, Srl and Root edges
  SparseMatrix adj_coref;     // normalized, Coref edges
  SparseMatrix adj_all;       // normalized, every edge
  Tensor label_bag;           // N x labels, mean over incoming edges
  std::vector<int> offsets;   // first row of each graph, then N

  int graphs() const { return static_cast<int>(offsets.size()) - 1; }
};

GraphInput BatchInputs(const std::vector<const GraphInput *> &inputs);

struct GraphEncoding {
  Tensor node_matrix;   // N x C
  Tensor graph_vector;  // 1 x C
};

class GraphEncoder {
 public:
  GraphEncoder() = default;
  GraphEncoder(std::string prefix, GcnConfig cfg, int span_dim,
               const RoleInventory &roles = RoleInventory::Default());

  const std::string &prefix() const { return prefix_; }
  const GcnConfig &config() const { return cfg_; }
  int span_dim() const { return span_dim_; }
  int feature_dim() const { return span_dim_ + cfg_.type_dim; }
  int output_dim() const { return cfg_.hidden; }
  const std::vector<std::string> &edge_labels() const { return labels_; }
  int label_index(const std::string &label) const;
  std::string name(const std::string &leaf) const { return prefix_ + "/" + leaf; }

  void InitParams(ParamStore &store, Rng &rng) const;

  GraphInput Prepare(const Ssg &g, Tensor span_features) const;

  // Node features: [span features, type embedding].
  Var Features(Tape &tape, const ParamStore &store, const GraphInput &in) const;
  // N x C node encodings.
  Var NodeEncodings(Tape &tape, const ParamStore &store, const GraphInput &in) const;
  // sigmoid(mean of node rows), 1 x C.
  Var Readout(Tape &tape, Var nodes) const;
  // One readout row per graph of a batch.
  Var SegmentReadout(Tape &tape, Var nodes, const std::vector<int> &offsets) const;

  GraphEncoding Encode(const ParamStore &store, const GraphInput &in) const;

 private:
  std::string prefix_ = "gcn";
  GcnConfig cfg_;
  int span_dim_ = 0;
  std::vector<std::string> labels_;
  std::map<std::string, int> label_index_;
};

// Symmetric D^-1/2 A D^-1/2 over undirected edges with degrees clamped at 1.
Tensor NormalizedAdjacency(int nodes, const std::vector<std::pair<int, int>> &edges);

struct DgiOptions {
  int epochs = 2;
  double lr = 1e-3;
  double weight_decay = 0.01;
  bool shuffle = true;
  int batch_size = 1;  // pairs per Adam step
};

// Discriminator D(h, s) = sigma(h^T M s) with M under "<gcn prefix>/dgi_M",
// zero at init.
void InitDiscriminator(const GraphEncoder &enc, ParamStore &store);

// -mean log D(pos rows, s) - mean log(1 - D(neg rows, s)), s = readout of
// the positive graph. The batched form averages this over pairs.
Var DgiLoss(Tape &tape, const GraphEncoder &enc, const ParamStore &store, const GraphInput &pos,
            const GraphInput &neg);
Var DgiLoss(Tape &tape, const GraphEncoder &enc, const ParamStore &store,
            const std::vector<const GraphInput *> &pos, const std::vector<const GraphInput *> &neg);

// Trains encoder and discriminator; returns the mean loss of each epoch.
std::vector<double> DgiPretrain(const GraphEncoder &enc, ParamStore &store,
                                const std::vector<GraphInput> &golds,
                                const std::vector<GraphInput> &perturbed, const DgiOptions &opts,
                                Rng &rng);

// Fraction of node rows the discriminator classifies correctly (pos > 0.5,
// neg < 0.5) over all pairs.
double DgiAccuracy(const GraphEncoder &enc, const ParamStore &store,
                   const std::vector<GraphInput> &golds, const std::vector<GraphInput> &perturbed);

}  // namespace ssgc

#endif  // SSGC_GCN_H_
