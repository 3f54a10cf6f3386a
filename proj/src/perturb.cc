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

#include "ssgc/perturb.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "ssgc/error.h"

namespace ssgc {

const char *PerturbationName(PerturbationType t) {
  switch (t) {
    case PerturbationType::kSrlChangeLabel: return "srl-change-label";
    case PerturbationType::kSrlMoveArgument: return "srl-move-argument";
    case PerturbationType::kSrlSplitSpans: return "srl-split-spans";
    case PerturbationType::kSrlMergeSpans: return "srl-merge-spans";
    case PerturbationType::kSrlChangeBoundary: return "srl-change-boundary";
    case PerturbationType::kSrlAddArgument: return "srl-add-argument";
    case PerturbationType::kSrlDropArgument: return "srl-drop-argument";
    case PerturbationType::kCorefAddAntecedent: return "coref-add-antecedent";
    case PerturbationType::kCorefDropAntecedent: return "coref-drop-antecedent";
  }
  return "?";
}

PerturbationType ParsePerturbationType(const std::string &name) {
  for (PerturbationType t : kAllPerturbationTypes) {
    if (name == PerturbationName(t)) return t;
  }
  throw ConfigError("unknown perturbation type '" + name + "'");
}

std::map<std::string, std::map<std::string, double>> PerturbationConfig::DefaultConfusion(
    const RoleInventory &roles) {
  std::map<std::string, std::map<std::string, double>> out;
  for (const std::string &from : roles.labels()) {
    const int a = RoleInventory::CoreNumber(from);
    auto &row = out[from];
    double total = 0.0;
    for (const std::string &to : roles.labels()) {
      const int b = RoleInventory::CoreNumber(to);
      if (b < 0 || to == from) continue;
      double w = (a >= 0 && std::abs(a - b) == 1) ? 2.0 : 1.0;
      row[to] = w;
      total += w;
    }
    for (auto &[to, w] : row) w /= total;
  }
  return out;
}

PerturbationConfig PerturbationConfig::Default() {
  PerturbationConfig cfg;
  cfg.srl_frequencies = {
      {PerturbationType::kSrlChangeLabel, 29.3},   {PerturbationType::kSrlMoveArgument, 4.5},
      {PerturbationType::kSrlSplitSpans, 10.6},    {PerturbationType::kSrlMergeSpans, 14.7},
      {PerturbationType::kSrlChangeBoundary, 18.0}, {PerturbationType::kSrlAddArgument, 7.4},
      {PerturbationType::kSrlDropArgument, 11.0}};
  cfg.confusion = DefaultConfusion(cfg.roles);
  return cfg;
}

void ValidateConfig(const PerturbationConfig &cfg) {
  double total = 0.0;
  for (const auto &[t, w] : cfg.srl_frequencies) {
    if (!IsSrlPerturbation(t)) throw ConfigError("srl_frequencies contains a coreference type");
    if (w < 0.0) throw ConfigError("negative SRL perturbation frequency");
    total += w;
  }
  if (total <= 0.0) throw ConfigError("srl_frequencies has no mass");
  if (cfg.srl_weight < 0.0 || cfg.coref_weight < 0.0 || cfg.srl_weight + cfg.coref_weight <= 0.0) {
    throw ConfigError("invalid SRL/coreference ratio");
  }
  for (double v : {cfg.decay_start, cfg.decay_floor, cfg.decay_factor}) {
    if (!(v > 0.0 && v <= 1.0)) throw ConfigError("decay values must lie in (0, 1]");
  }
  for (const auto &[from, row] : cfg.confusion) {
    double sum = 0.0;
    for (const auto &[to, p] : row) {
      if (p < 0.0) throw ConfigError("negative confusion probability");
      if (to == from && p != 0.0) throw ConfigError("confusion row " + from + " has diagonal mass");
      if (!cfg.roles.contains(to)) throw ConfigError("confusion target " + to + " not a role");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("confusion row " + from + " does not sum to 1");
  }
}

std::array<double, kPerturbationTypeCount> MixedDistribution(const PerturbationConfig &cfg) {
  std::array<double, kPerturbationTypeCount> p{};
  double srl_total = 0.0;
  for (const auto &[t, w] : cfg.srl_frequencies) srl_total += w;
  const double srl_share = cfg.srl_weight / (cfg.srl_weight + cfg.coref_weight);
  for (const auto &[t, w] : cfg.srl_frequencies) {
    p[static_cast<int>(t)] = srl_share * w / srl_total;
  }
  p[static_cast<int>(PerturbationType::kCorefAddAntecedent)] = (1.0 - srl_share) / 2.0;
  p[static_cast<int>(PerturbationType::kCorefDropAntecedent)] = (1.0 - srl_share) / 2.0;
  return p;
}

PerturbationType SampleMixedPerturbation(Rng &rng, const PerturbationConfig &cfg) {
  const double srl_share = cfg.srl_weight / (cfg.srl_weight + cfg.coref_weight);
  if (Bernoulli(rng, srl_share)) {
    std::vector<double> weights;
    std::vector<PerturbationType> types;
    for (const auto &[t, w] : cfg.srl_frequencies) {
      types.push_back(t);
      weights.push_back(w);
    }
    return types[SampleIndex(rng, weights)];
  }
  return Bernoulli(rng, 0.5) ? PerturbationType::kCorefAddAntecedent
                             : PerturbationType::kCorefDropAntecedent;
}

double DecaySchedule(int epoch, const PerturbationConfig &cfg) {
  return std::max(cfg.decay_floor, cfg.decay_start * std::pow(cfg.decay_factor, epoch));
}

namespace {

// Mutable view of a graph during editing. Node ids stay stable; new nodes are
// appended and orphans are pruned when the edit session ends.
class GraphEditor {
 public:
  GraphEditor(const Ssg &g, Rng &rng, const PerturbationConfig &cfg)
      : g_(g), rng_(rng), cfg_(cfg) {}

  Ssg Finish() {
    // An orphaned predicate would lose its root edge; predicates keep theirs.
    PruneOrphans(g_);
    RefreshKinds();
    CanonicalizeSsg(g_);
    return std::move(g_);
  }

  const std::vector<std::string> &edits() const { return edits_; }

  bool Apply(PerturbationType type, int sentence) {
    switch (type) {
      case PerturbationType::kSrlChangeLabel: return ChangeLabel(sentence);
      case PerturbationType::kSrlMoveArgument: return MoveArgument(sentence);
      case PerturbationType::kSrlSplitSpans: return SplitSpans(sentence);
      case PerturbationType::kSrlMergeSpans: return MergeSpans(sentence);
      case PerturbationType::kSrlChangeBoundary: return ChangeBoundary(sentence);
      case PerturbationType::kSrlAddArgument: return AddArgument(sentence);
      case PerturbationType::kSrlDropArgument: return DropArgument(sentence);
      case PerturbationType::kCorefAddAntecedent: return AddAntecedent(sentence);
      case PerturbationType::kCorefDropAntecedent: return DropAntecedent(sentence);
    }
    return false;
  }

 private:
  const Span &SpanOf(int id) const { return *Node(id).span; }

  const SsgNode &Node(int id) const {
    for (const auto &n : g_.nodes) {
      if (n.id == id) return n;
    }
    throw ValidationError("missing node");
  }

  int SentenceOfNode(int id) const { return g_.sentence_of(SpanOf(id).start); }

  Span SentenceSpan(int sentence) const {
    if (g_.sentences.empty()) return {0, g_.token_count - 1};
    return g_.sentences[sentence];
  }

  bool MentionCapable(const SsgNode &n) const {
    return n.kind == NodeKind::kArgument || n.kind == NodeKind::kMention;
  }

  // SRL edge indices whose predicate lies in `sentence`.
  std::vector<int> SrlEdges(int sentence, bool core_only = false) const {
    std::vector<int> out;
    for (size_t i = 0; i < g_.edges.size(); ++i) {
      const auto &e = g_.edges[i];
      if (e.kind != EdgeKind::kSrl || SentenceOfNode(e.src) != sentence) continue;
      if (core_only && !RoleInventory::IsCore(e.label)) continue;
      out.push_back(static_cast<int>(i));
    }
    return out;
  }

  std::vector<Span> FrameSpans(int predicate) const {
    std::vector<Span> out;
    for (const auto &e : g_.edges) {
      if (e.kind == EdgeKind::kSrl && e.src == predicate) out.push_back(SpanOf(e.dst));
    }
    return out;
  }

  int NodeFor(const Span &span) {
    int id = g_.find_node(span);
    if (id >= 0) return id;
    int next = 0;
    for (const auto &n : g_.nodes) next = std::max(next, n.id + 1);
    g_.nodes.push_back({next, NodeKind::kArgument, span, 0});
    return next;
  }

  bool HasEdge(int src, int dst, EdgeKind kind) const {
    for (const auto &e : g_.edges) {
      if (e.src == src && e.dst == dst && e.kind == kind) return true;
    }
    return false;
  }

  void AddSrlEdge(int predicate, const Span &span, const std::string &label) {
    int dst = NodeFor(span);
    if (!HasEdge(predicate, dst, EdgeKind::kSrl)) {
      g_.edges.push_back({predicate, dst, EdgeKind::kSrl, label});
    }
  }

  template <typename T>
  const T &Pick(const std::vector<T> &items) {
    return items[UniformInt(rng_, 0, static_cast<int>(items.size()) - 1)];
  }

  // Random span of 1-4 tokens inside the sentence avoiding `blocked`.
  bool RandomFreeSpan(int sentence, const std::vector<Span> &blocked, Span *out) {
    const Span sent = SentenceSpan(sentence);
    for (int attempt = 0; attempt < 32; ++attempt) {
      int width = UniformInt(rng_, 1, std::min(4, sent.width()));
      int start = UniformInt(rng_, sent.start, sent.end - width + 1);
      Span s{start, start + width - 1};
      bool ok = true;
      for (const Span &b : blocked) ok &= !s.overlaps(b);
      if (ok) {
        *out = s;
        return true;
      }
    }
    return false;
  }

  void Log(const std::string &line) { edits_.push_back(line); }

  bool ChangeLabel(int sentence) {
    auto sites = SrlEdges(sentence);
    if (sites.empty()) return false;
    SsgEdge &e = g_.edges[Pick(sites)];
    auto row = cfg_.confusion.find(e.label);
    if (row == cfg_.confusion.end()) return false;
    std::vector<std::string> labels;
    std::vector<double> weights;
    for (const auto &[to, p] : row->second) {
      labels.push_back(to);
      weights.push_back(to == e.label ? 0.0 : p);
    }
    int k = SampleIndex(rng_, weights);
    if (k < 0) return false;
    Log("change-label " + ToString(SpanOf(e.src)) + "->" + ToString(SpanOf(e.dst)) + " " +
        e.label + "=>" + labels[k]);
    e.label = labels[k];
    return true;
  }

  bool MoveArgument(int sentence) {
    auto sites = SrlEdges(sentence, /*core_only=*/true);
    if (sites.empty()) return false;
    const int ei = Pick(sites);
    const SsgEdge edge = g_.edges[ei];
    const Span pred = SpanOf(edge.src);
    std::vector<Span> blocked = FrameSpans(edge.src);
    blocked.push_back(pred);
    std::vector<Span> existing;
    for (const auto &n : g_.nodes) {
      if (!MentionCapable(n) || g_.sentence_of(n.span->start) != sentence) continue;
      bool ok = true;
      for (const Span &b : blocked) ok &= !n.span->overlaps(b);
      if (ok) existing.push_back(*n.span);
    }
    // The moved argument may land anywhere except on its own frame.
    Span target;
    if (!existing.empty() && Bernoulli(rng_, 0.5)) {
      target = Pick(existing);
    } else if (!RandomFreeSpan(sentence, blocked, &target)) {
      if (existing.empty()) return false;
      target = Pick(existing);
    }
    g_.edges.erase(g_.edges.begin() + ei);
    AddSrlEdge(edge.src, target, edge.label);
    Log("move-argument " + edge.label + " " + ToString(SpanOf(edge.dst)) + "=>" +
        ToString(target));
    return true;
  }

  bool SplitSpans(int sentence) {
    std::vector<int> sites;
    for (int i : SrlEdges(sentence)) {
      if (SpanOf(g_.edges[i].dst).width() >= 2) sites.push_back(i);
    }
    if (sites.empty()) return false;
    const int ei = Pick(sites);
    const SsgEdge edge = g_.edges[ei];
    const Span s = SpanOf(edge.dst);
    const int k = UniformInt(rng_, s.start + 1, s.end);
    g_.edges.erase(g_.edges.begin() + ei);
    AddSrlEdge(edge.src, {s.start, k - 1}, edge.label);
    AddSrlEdge(edge.src, {k, s.end}, edge.label);
    Log("split-spans " + edge.label + " " + ToString(s) + "=>" + ToString({s.start, k - 1}) +
        "+" + ToString({k, s.end}));
    return true;
  }

  bool MergeSpans(int sentence) {
    std::vector<std::pair<int, int>> sites;
    auto edges = SrlEdges(sentence);
    for (int a : edges) {
      for (int b : edges) {
        const auto &ea = g_.edges[a];
        const auto &eb = g_.edges[b];
        if (a != b && ea.src == eb.src && SpanOf(ea.dst).end + 1 == SpanOf(eb.dst).start) {
          sites.emplace_back(a, b);
        }
      }
    }
    if (sites.empty()) return false;
    auto [a, b] = Pick(sites);
    const SsgEdge ea = g_.edges[a];
    const SsgEdge eb = g_.edges[b];
    const Span merged{SpanOf(ea.dst).start, SpanOf(eb.dst).end};
    g_.edges.erase(g_.edges.begin() + std::max(a, b));
    g_.edges.erase(g_.edges.begin() + std::min(a, b));
    AddSrlEdge(ea.src, merged, ea.label);
    Log("merge-spans " + ToString(SpanOf(ea.dst)) + "+" + ToString(SpanOf(eb.dst)) + "=>" +
        ToString(merged) + " " + ea.label);
    return true;
  }

  bool ChangeBoundary(int sentence) {
    auto sites = SrlEdges(sentence);
    if (sites.empty()) return false;
    const int ei = Pick(sites);
    const SsgEdge edge = g_.edges[ei];
    const Span old = SpanOf(edge.dst);
    const Span pred = SpanOf(edge.src);
    const Span sent = SentenceSpan(sentence);
    for (int attempt = 0; attempt < 8; ++attempt) {
      const int delta = UniformInt(rng_, 1, 3);
      const bool grow = Bernoulli(rng_, 0.5);
      const bool at_start = Bernoulli(rng_, 0.5);
      Span s = old;
      if (at_start) {
        s.start += grow ? -delta : delta;
        s.start = std::clamp(s.start, sent.start, s.end);
        if (pred.end < old.start) s.start = std::max(s.start, pred.end + 1);
      } else {
        s.end += grow ? delta : -delta;
        s.end = std::clamp(s.end, s.start, sent.end);
        if (pred.start > old.end) s.end = std::min(s.end, pred.start - 1);
      }
      if (s == old || s.overlaps(pred)) continue;
      g_.edges.erase(g_.edges.begin() + ei);
      AddSrlEdge(edge.src, s, edge.label);
      Log("change-boundary " + edge.label + " " + ToString(old) + "=>" + ToString(s));
      return true;
    }
    return false;
  }

  bool AddArgument(int sentence) {
    std::vector<int> predicates;
    for (const auto &n : g_.nodes) {
      if (n.kind == NodeKind::kPredicate && g_.sentence_of(n.span->start) == sentence) {
        predicates.push_back(n.id);
      }
    }
    if (predicates.empty()) return false;
    const int p = Pick(predicates);
    std::vector<Span> blocked = FrameSpans(p);
    blocked.push_back(SpanOf(p));
    Span s;
    if (!RandomFreeSpan(sentence, blocked, &s)) return false;
    const std::string &role = Pick(cfg_.roles.labels());
    AddSrlEdge(p, s, role);
    Log("add-argument " + ToString(SpanOf(p)) + "->" + ToString(s) + " " + role);
    return true;
  }

  bool DropArgument(int sentence) {
    auto sites = SrlEdges(sentence);
    if (sites.empty()) return false;
    const int ei = Pick(sites);
    const SsgEdge e = g_.edges[ei];
    Log("drop-argument " + ToString(SpanOf(e.src)) + "->" + ToString(SpanOf(e.dst)) + " " +
        e.label);
    g_.edges.erase(g_.edges.begin() + ei);
    return true;
  }

  int Component(int id, std::vector<int> &parent) const {
    while (parent[id] != id) id = parent[id] = parent[parent[id]];
    return id;
  }

  bool AddAntecedent(int sentence) {
    int max_id = 0;
    for (const auto &n : g_.nodes) max_id = std::max(max_id, n.id);
    std::vector<int> parent(max_id + 1);
    for (int i = 0; i <= max_id; ++i) parent[i] = i;
    for (const auto &e : g_.edges) {
      if (e.kind == EdgeKind::kCoref) parent[Component(e.src, parent)] = Component(e.dst, parent);
    }
    std::vector<std::pair<int, int>> sites;
    for (const auto &a : g_.nodes) {
      if (!MentionCapable(a) || g_.sentence_of(a.span->start) != sentence) continue;
      for (const auto &b : g_.nodes) {
        if (!MentionCapable(b) || !(*b.span < *a.span)) continue;
        if (Component(a.id, parent) == Component(b.id, parent)) continue;
        sites.emplace_back(a.id, b.id);
      }
    }
    if (sites.empty()) return false;
    auto [a, b] = Pick(sites);
    g_.edges.push_back({a, b, EdgeKind::kCoref, kCorefLabel});
    Log("add-antecedent " + ToString(SpanOf(a)) + "->" + ToString(SpanOf(b)));
    return true;
  }

  bool DropAntecedent(int sentence) {
    std::vector<int> sites;
    for (size_t i = 0; i < g_.edges.size(); ++i) {
      const auto &e = g_.edges[i];
      if (e.kind == EdgeKind::kCoref && SentenceOfNode(e.src) == sentence) {
        sites.push_back(static_cast<int>(i));
      }
    }
    if (sites.empty()) return false;
    const int ei = Pick(sites);
    const SsgEdge e = g_.edges[ei];
    Log("drop-antecedent " + ToString(SpanOf(e.src)) + "->" + ToString(SpanOf(e.dst)));
    g_.edges.erase(g_.edges.begin() + ei);
    return true;
  }

  // Span nodes with an incoming SRL edge are arguments, the rest mentions.
  void RefreshKinds() {
    std::set<int> args;
    for (const auto &e : g_.edges) {
      if (e.kind == EdgeKind::kSrl) args.insert(e.dst);
    }
    for (auto &n : g_.nodes) {
      if (n.kind == NodeKind::kArgument || n.kind == NodeKind::kMention) {
        n.kind = args.count(n.id) ? NodeKind::kArgument : NodeKind::kMention;
      }
    }
  }

  Ssg g_;
  Rng &rng_;
  const PerturbationConfig &cfg_;
  std::vector<std::string> edits_;
};

}  // namespace

PerturbationResult ApplyPerturbation(const Ssg &g, PerturbationType type, double decay, Rng &rng,
                                     const PerturbationConfig &cfg) {
  Ssg reference = g;
  CanonicalizeSsg(reference);
  GraphEditor editor(reference, rng, cfg);
  const int sentences = std::max<int>(1, static_cast<int>(g.sentences.size()));
  for (int s = 0; s < sentences; ++s) {
    if (!Bernoulli(rng, decay)) continue;
    editor.Apply(type, s);
  }
  std::vector<std::string> edits = editor.edits();
  PerturbationResult result;
  result.graph = editor.Finish();
  result.changed = !(result.graph == reference);
  result.edits = std::move(edits);
  return result;
}

PerturbationResult ApplyPerturbationChanged(const Ssg &g, PerturbationType type, double decay,
                                            Rng &rng, const PerturbationConfig &cfg,
                                            int attempts) {
  PerturbationResult result;
  for (int i = 0; i < std::max(1, attempts); ++i) {
    result = ApplyPerturbation(g, type, decay, rng, cfg);
    if (result.changed) break;
  }
  return result;
}

}  // namespace ssgc
