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

#ifndef SSGC_SSG_H_
#define SSGC_SSG_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ssgc/corpus.h"

namespace ssgc {

enum class NodeKind { kRoot, kPredicate, kArgument, kMention };
enum class EdgeKind { kSrl, kCoref, kRoot };

const char *NodeKindName(NodeKind kind);
const char *EdgeKindName(EdgeKind kind);
NodeKind ParseNodeKind(const std::string &name);
EdgeKind ParseEdgeKind(const std::string &name);

// Node-type vocabulary: root, predicate, argument, argument that is also a
// coreferent mention, mention only.
inline constexpr int kNodeTypeCount = 5;
int NodeTypeIndex(NodeKind kind, bool is_mention);

inline const std::string kCorefLabel = "COREF";
inline const std::string kRootLabel = "ROOT";

struct SsgNode {
  int id = 0;
  NodeKind kind = NodeKind::kRoot;
  std::optional<Span> span;
  int type_index = 0;

  bool operator==(const SsgNode &) const = default;
};

struct SsgEdge {
  int src = 0;
  int dst = 0;
  EdgeKind kind = EdgeKind::kSrl;
  std::string label;

  bool operator==(const SsgEdge &) const = default;
};

// Shallow semantic graph: SRL predicate/argument nodes plus coreference links,
// with every predicate attached to a dummy root. Node ids equal positions in
// `nodes`; node 0 is the root.
struct Ssg {
  std::string doc_id;
  int token_count = 0;
  // Sentence boundaries of the source document; perturbations stay inside
  // them.
  std::vector<Span> sentences;
  std::vector<SsgNode> nodes;
  std::vector<SsgEdge> edges;

  int sentence_of(int token) const;
  // Node with exactly this span, or -1.
  int find_node(const Span &span) const;

  bool operator==(const Ssg &) const = default;
};

struct SsgOptions {
  // Link every mention to all earlier mentions of its cluster instead of only
  // the closest one.
  bool coref_closure = false;
};

Ssg BuildSsg(const Document &doc, const SsgOptions &options = {});

// Connected components over coreference edges (size >= 2), spans sorted.
std::vector<Cluster> ClustersFromSsg(const Ssg &g);

// Frames recovered from SRL edges (one per predicate node).
std::vector<Frame> FramesFromSsg(const Ssg &g);

// Throws ValidationError when a structural invariant is broken.
void ValidateStructure(const Ssg &g);

// Renumbers nodes in canonical order (root, then by span start, end, kind),
// remaps and sorts edges, drops duplicate edges and recomputes type indices.
void CanonicalizeSsg(Ssg &g);

// Removes argument/mention nodes without incident edges. Does not renumber.
void PruneOrphans(Ssg &g);

std::string SerializeSsg(const Ssg &g);
void SerializeSsg(const Ssg &g, std::ostream &out);
// Throws ParseError on malformed JSON or dangling node ids.
Ssg ParseSsg(const std::string &text);
Ssg ParseSsg(std::istream &in);

}  // namespace ssgc

#endif  // SSGC_SSG_H_
