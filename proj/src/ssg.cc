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

#include "ssgc/ssg.h"

#include <algorithm>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "ssgc/error.h"

namespace ssgc {

using json = nlohmann::json;

const char *NodeKindName(NodeKind kind) {
  switch (kind) {
    case NodeKind::kRoot: return "Root";
    case NodeKind::kPredicate: return "Predicate";
    case NodeKind::kArgument: return "Argument";
    case NodeKind::kMention: return "Mention";
  }
  return "?";
}

const char *EdgeKindName(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::kSrl: return "Srl";
    case EdgeKind::kCoref: return "Coref";
    case EdgeKind::kRoot: return "Root";
  }
  return "?";
}

NodeKind ParseNodeKind(const std::string &name) {
  for (NodeKind k : {NodeKind::kRoot, NodeKind::kPredicate, NodeKind::kArgument,
                     NodeKind::kMention}) {
    if (name == NodeKindName(k)) return k;
  }
  throw ParseError("unknown node kind '" + name + "'");
}

EdgeKind ParseEdgeKind(const std::string &name) {
  for (EdgeKind k : {EdgeKind::kSrl, EdgeKind::kCoref, EdgeKind::kRoot}) {
    if (name == EdgeKindName(k)) return k;
  }
  throw ParseError("unknown edge kind '" + name + "'");
}

int NodeTypeIndex(NodeKind kind, bool is_mention) {
  switch (kind) {
    case NodeKind::kRoot: return 0;
    case NodeKind::kPredicate: return 1;
    case NodeKind::kArgument: return is_mention ? 3 : 2;
    case NodeKind::kMention: return 4;
  }
  return 0;
}

int Ssg::sentence_of(int token) const {
  if (sentences.empty()) return token >= 0 && token < token_count ? 0 : -1;
  for (size_t i = 0; i < sentences.size(); ++i) {
    if (sentences[i].contains(token)) return static_cast<int>(i);
  }
  return -1;
}

int Ssg::find_node(const Span &span) const {
  for (const auto &n : nodes) {
    if (n.span && *n.span == span) return n.id;
  }
  return -1;
}

namespace {

auto NodeOrderKey(const SsgNode &n) {
  Span s = n.span.value_or(Span{-1, -1});
  return std::make_tuple(n.kind != NodeKind::kRoot, s.start, s.end, static_cast<int>(n.kind));
}

auto EdgeOrderKey(const SsgEdge &e) {
  return std::make_tuple(e.src, e.dst, static_cast<int>(e.kind), std::cref(e.label));
}

}  // namespace

void CanonicalizeSsg(Ssg &g) {
  std::vector<int> order(g.nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return NodeOrderKey(g.nodes[a]) < NodeOrderKey(g.nodes[b]);
  });
  std::map<int, int> remap;
  std::vector<SsgNode> nodes;
  for (size_t i = 0; i < order.size(); ++i) {
    SsgNode n = g.nodes[order[i]];
    remap[n.id] = static_cast<int>(i);
    n.id = static_cast<int>(i);
    nodes.push_back(n);
  }
  for (auto &e : g.edges) {
    e.src = remap.at(e.src);
    e.dst = remap.at(e.dst);
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const SsgEdge &a, const SsgEdge &b) {
    return EdgeOrderKey(a) < EdgeOrderKey(b);
  });
  // One edge per (src, dst, kind) triple; the first label wins.
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end(),
                            [](const SsgEdge &a, const SsgEdge &b) {
                              return a.src == b.src && a.dst == b.dst && a.kind == b.kind;
                            }),
                g.edges.end());
  std::vector<bool> mention(nodes.size(), false);
  for (const auto &e : g.edges) {
    if (e.kind == EdgeKind::kCoref) mention[e.src] = mention[e.dst] = true;
  }
  for (auto &n : nodes) n.type_index = NodeTypeIndex(n.kind, mention[n.id]);
  g.nodes = std::move(nodes);
}

void PruneOrphans(Ssg &g) {
  std::set<int> used;
  for (const auto &e : g.edges) {
    used.insert(e.src);
    used.insert(e.dst);
  }
  std::erase_if(g.nodes, [&](const SsgNode &n) {
    return (n.kind == NodeKind::kArgument || n.kind == NodeKind::kMention) && !used.count(n.id);
  });
}

Ssg BuildSsg(const Document &doc, const SsgOptions &options) {
  Validate(doc);
  Ssg g;
  g.doc_id = doc.id;
  g.token_count = doc.token_count();
  g.sentences = doc.sentence_spans();

  std::map<Span, NodeKind> kinds;
  for (const auto &f : doc.frames) kinds[f.predicate] = NodeKind::kPredicate;
  for (const auto &f : doc.frames) {
    for (const auto &a : f.args) kinds.try_emplace(a.span, NodeKind::kArgument);
  }
  for (const auto &c : doc.clusters) {
    for (const auto &m : c) kinds.try_emplace(m, NodeKind::kMention);
  }

  g.nodes.push_back({0, NodeKind::kRoot, std::nullopt, 0});
  std::map<Span, int> ids;
  for (const auto &[span, kind] : kinds) {
    int id = static_cast<int>(g.nodes.size());
    g.nodes.push_back({id, kind, span, 0});
    ids[span] = id;
  }
  for (const auto &f : doc.frames) {
    int p = ids.at(f.predicate);
    g.edges.push_back({0, p, EdgeKind::kRoot, kRootLabel});
    for (const auto &a : f.args) g.edges.push_back({p, ids.at(a.span), EdgeKind::kSrl, a.role});
  }
  for (const auto &c : doc.clusters) {
    Cluster sorted = c;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 1; i < sorted.size(); ++i) {
      const size_t first = options.coref_closure ? 0 : i - 1;
      for (size_t j = first; j < i; ++j) {
        g.edges.push_back({ids.at(sorted[i]), ids.at(sorted[j]), EdgeKind::kCoref, kCorefLabel});
      }
    }
  }
  CanonicalizeSsg(g);
  return g;
}

std::vector<Cluster> ClustersFromSsg(const Ssg &g) {
  std::vector<int> parent(g.nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::set<int> members;
  for (const auto &e : g.edges) {
    if (e.kind != EdgeKind::kCoref) continue;
    parent[find(e.src)] = find(e.dst);
    members.insert(e.src);
    members.insert(e.dst);
  }
  std::map<int, Cluster> groups;
  for (int id : members) groups[find(id)].push_back(*g.nodes[id].span);
  std::vector<Cluster> out;
  for (auto &[root, cluster] : groups) {
    if (cluster.size() < 2) continue;
    std::sort(cluster.begin(), cluster.end());
    out.push_back(std::move(cluster));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Frame> FramesFromSsg(const Ssg &g) {
  std::vector<Frame> frames;
  std::map<int, size_t> index;
  for (const auto &n : g.nodes) {
    if (n.kind != NodeKind::kPredicate) continue;
    index[n.id] = frames.size();
    frames.push_back({*n.span, {}});
  }
  for (const auto &e : g.edges) {
    if (e.kind != EdgeKind::kSrl) continue;
    frames[index.at(e.src)].args.push_back({e.label, *g.nodes[e.dst].span});
  }
  for (auto &f : frames) {
    std::sort(f.args.begin(), f.args.end(), [](const Argument &a, const Argument &b) {
      return std::tie(a.span, a.role) < std::tie(b.span, b.role);
    });
  }
  return frames;
}

void ValidateStructure(const Ssg &g) {
  auto fail = [&](const std::string &what) {
    throw ValidationError("graph '" + g.doc_id + "': " + what);
  };
  int roots = 0;
  std::set<Span> spans;
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    const SsgNode &n = g.nodes[i];
    if (n.id != static_cast<int>(i)) fail("node ids must equal positions");
    if (n.kind == NodeKind::kRoot) {
      ++roots;
      if (n.span) fail("root node carries a span");
      continue;
    }
    if (!n.span) fail("node " + std::to_string(n.id) + " has no span");
    const Span s = *n.span;
    if (s.start < 0 || s.start > s.end || s.end >= g.token_count) {
      fail("node " + std::to_string(n.id) + " has invalid span " + ToString(s));
    }
    if (!g.sentences.empty() && g.sentence_of(s.start) != g.sentence_of(s.end)) {
      fail("node span " + ToString(s) + " crosses a sentence boundary");
    }
    if (!spans.insert(s).second) fail("duplicate node span " + ToString(s));
  }
  if (roots != 1) fail("expected exactly one root node");

  const int n = static_cast<int>(g.nodes.size());
  std::set<std::tuple<int, int, int>> triples;
  std::set<int> rooted;
  for (const auto &e : g.edges) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) fail("edge references missing node");
    if (!triples.insert({e.src, e.dst, static_cast<int>(e.kind)}).second) {
      fail("duplicate edge " + std::to_string(e.src) + "->" + std::to_string(e.dst));
    }
    const SsgNode &src = g.nodes[e.src];
    const SsgNode &dst = g.nodes[e.dst];
    switch (e.kind) {
      case EdgeKind::kSrl:
        if (src.kind != NodeKind::kPredicate || dst.kind == NodeKind::kRoot) {
          fail("SRL edge must go from a predicate to a span node");
        }
        if (!g.sentences.empty() &&
            g.sentence_of(src.span->start) != g.sentence_of(dst.span->start)) {
          fail("SRL edge crosses sentences");
        }
        if (e.label.empty()) fail("SRL edge without role label");
        break;
      case EdgeKind::kCoref:
        if (src.kind == NodeKind::kRoot || dst.kind == NodeKind::kRoot) {
          fail("coreference edge touches the root");
        }
        if (!(*dst.span < *src.span)) fail("coreference edge must point to an earlier span");
        break;
      case EdgeKind::kRoot:
        if (src.kind != NodeKind::kRoot || dst.kind != NodeKind::kPredicate) {
          fail("root edge must go from the root to a predicate");
        }
        rooted.insert(e.dst);
        break;
    }
  }
  for (const auto &node : g.nodes) {
    if (node.kind == NodeKind::kPredicate && !rooted.count(node.id)) {
      fail("predicate " + ToString(*node.span) + " lacks a root edge");
    }
  }
}

// ---------------------------------------------------------------------------
// JSON

void SerializeSsg(const Ssg &g, std::ostream &out) { out << SerializeSsg(g); }

std::string SerializeSsg(const Ssg &g) {
  json nodes = json::array();
  for (const auto &n : g.nodes) {
    json node;
    node["id"] = n.id;
    node["kind"] = NodeKindName(n.kind);
    node["span"] = n.span ? json::array({n.span->start, n.span->end}) : json(nullptr);
    nodes.push_back(std::move(node));
  }
  json edges = json::array();
  for (const auto &e : g.edges) {
    edges.push_back({{"src", e.src}, {"dst", e.dst}, {"kind", EdgeKindName(e.kind)},
                     {"label", e.label}});
  }
  json sentences = json::array();
  for (const auto &s : g.sentences) sentences.push_back(json::array({s.start, s.end}));
  json j;
  j["doc_id"] = g.doc_id;
  j["token_count"] = g.token_count;
  j["sentences"] = std::move(sentences);
  j["nodes"] = std::move(nodes);
  j["edges"] = std::move(edges);
  return j.dump();
}

Ssg ParseSsg(std::istream &in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseSsg(buffer.str());
}

Ssg ParseSsg(const std::string &text) {
  Ssg g;
  try {
    json j = json::parse(text);
    g.doc_id = j.at("doc_id").get<std::string>();
    g.token_count = j.at("token_count").get<int>();
    if (j.contains("sentences")) {
      for (const auto &s : j["sentences"]) g.sentences.push_back({s.at(0), s.at(1)});
    }
    for (const auto &n : j.at("nodes")) {
      SsgNode node;
      node.id = n.at("id").get<int>();
      node.kind = ParseNodeKind(n.at("kind").get<std::string>());
      if (!n.at("span").is_null()) node.span = Span{n["span"].at(0), n["span"].at(1)};
      g.nodes.push_back(node);
    }
    std::set<int> ids;
    for (const auto &n : g.nodes) ids.insert(n.id);
    for (const auto &e : j.at("edges")) {
      SsgEdge edge;
      edge.src = e.at("src").get<int>();
      edge.dst = e.at("dst").get<int>();
      edge.kind = ParseEdgeKind(e.at("kind").get<std::string>());
      edge.label = e.at("label").get<std::string>();
      for (int id : {edge.src, edge.dst}) {
        if (!ids.count(id)) throw ParseError("edge references unknown node id " + std::to_string(id));
      }
      g.edges.push_back(std::move(edge));
    }
  } catch (const json::exception &e) {
    throw ParseError(std::string("SSG JSON: ") + e.what());
  }
  CanonicalizeSsg(g);
  return g;
}

}  // namespace ssgc
