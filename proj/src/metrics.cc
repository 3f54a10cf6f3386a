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

#include "ssgc/metrics.h"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "ssgc/error.h"

namespace ssgc {

PRF MakePrf(double p_num, double p_den, double r_num, double r_den) {
  PRF out;
  out.precision = p_den > 0 ? p_num / p_den : 0.0;
  out.recall = r_den > 0 ? r_num / r_den : 0.0;
  const double s = out.precision + out.recall;
  out.f1 = s > 0 ? 2 * out.precision * out.recall / s : 0.0;
  return out;
}

std::vector<int> Hungarian(const std::vector<std::vector<double>> &weights) {
  const int rows = static_cast<int>(weights.size());
  if (rows == 0) return {};
  const int cols = static_cast<int>(weights[0].size());
  if (cols == 0) return std::vector<int>(rows, -1);
  // The potential method below needs n <= m; solve the transpose otherwise.
  const bool transpose = rows > cols;
  const int n = transpose ? cols : rows;
  const int m = transpose ? rows : cols;
  double max_w = -std::numeric_limits<double>::infinity();
  for (const auto &r : weights) {
    if (static_cast<int>(r.size()) != cols) throw ShapeError("ragged assignment matrix");
    for (double w : r) max_w = std::max(max_w, w);
  }
  auto cost = [&](int i, int j) {
    const double w = transpose ? weights[j][i] : weights[i][j];
    return max_w - w;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> out(rows, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] == 0) continue;
    if (transpose) {
      out[j - 1] = p[j] - 1;
    } else {
      out[p[j] - 1] = j - 1;
    }
  }
  return out;
}

void CorefCounts::Add(const CorefCounts &o) {
  muc_p_num += o.muc_p_num;
  muc_p_den += o.muc_p_den;
  muc_r_num += o.muc_r_num;
  muc_r_den += o.muc_r_den;
  b3_p_num += o.b3_p_num;
  b3_p_den += o.b3_p_den;
  b3_r_num += o.b3_r_num;
  b3_r_den += o.b3_r_den;
  ceaf_num += o.ceaf_num;
  ceaf_p_den += o.ceaf_p_den;
  ceaf_r_den += o.ceaf_r_den;
}

namespace {

std::vector<Cluster> DropSingletons(const std::vector<Cluster> &clusters) {
  std::vector<Cluster> out;
  for (const auto &c : clusters) {
    if (c.size() >= 2) out.push_back(c);
  }
  return out;
}

std::map<Span, int> ClusterIndex(const std::vector<Cluster> &clusters) {
  std::map<Span, int> index;
  for (size_t i = 0; i < clusters.size(); ++i) {
    for (const Span &m : clusters[i]) index.emplace(m, static_cast<int>(i));
  }
  return index;
}

// MUC numerator and denominator for `key` partitioned by `response`.
std::pair<double, double> MucSide(const std::vector<Cluster> &key,
                                  const std::vector<Cluster> &response) {
  const auto index = ClusterIndex(response);
  double num = 0, den = 0;
  for (const auto &k : key) {
    std::set<int> parts;
    int unmatched = 0;
    for (const Span &m : k) {
      auto it = index.find(m);
      if (it == index.end()) {
        ++unmatched;
      } else {
        parts.insert(it->second);
      }
    }
    const double partitions = static_cast<double>(parts.size() + unmatched);
    num += static_cast<double>(k.size()) - partitions;
    den += static_cast<double>(k.size()) - 1.0;
  }
  return {num, den};
}

std::pair<double, double> BCubedSide(const std::vector<Cluster> &key,
                                     const std::vector<Cluster> &response) {
  const auto index = ClusterIndex(response);
  double num = 0, den = 0;
  for (const auto &k : key) {
    for (const Span &m : k) {
      den += 1.0;
      auto it = index.find(m);
      if (it == index.end()) continue;
      const Cluster &r = response[it->second];
      double overlap = 0;
      for (const Span &x : k) overlap += std::count(r.begin(), r.end(), x);
      num += overlap / static_cast<double>(k.size());
    }
  }
  return {num, den};
}

double Phi4(const Cluster &a, const Cluster &b) {
  double overlap = 0;
  for (const Span &x : a) overlap += std::count(b.begin(), b.end(), x);
  return 2.0 * overlap / static_cast<double>(a.size() + b.size());
}

}  // namespace

CorefCounts CountCoref(const std::vector<Cluster> &gold, const std::vector<Cluster> &predicted_in) {
  const std::vector<Cluster> predicted = DropSingletons(predicted_in);
  CorefCounts c;
  std::tie(c.muc_r_num, c.muc_r_den) = MucSide(gold, predicted);
  std::tie(c.muc_p_num, c.muc_p_den) = MucSide(predicted, gold);
  std::tie(c.b3_r_num, c.b3_r_den) = BCubedSide(gold, predicted);
  std::tie(c.b3_p_num, c.b3_p_den) = BCubedSide(predicted, gold);
  c.ceaf_r_den = static_cast<double>(gold.size());
  c.ceaf_p_den = static_cast<double>(predicted.size());
  if (!gold.empty() && !predicted.empty()) {
    std::vector<std::vector<double>> sim(gold.size(), std::vector<double>(predicted.size()));
    for (size_t i = 0; i < gold.size(); ++i) {
      for (size_t j = 0; j < predicted.size(); ++j) sim[i][j] = Phi4(gold[i], predicted[j]);
    }
    const auto assignment = Hungarian(sim);
    for (size_t i = 0; i < gold.size(); ++i) {
      if (assignment[i] >= 0) c.ceaf_num += sim[i][assignment[i]];
    }
  }
  return c;
}

CorefScores ScoresFromCounts(const CorefCounts &c) {
  CorefScores s;
  s.muc = MakePrf(c.muc_p_num, c.muc_p_den, c.muc_r_num, c.muc_r_den);
  s.b_cubed = MakePrf(c.b3_p_num, c.b3_p_den, c.b3_r_num, c.b3_r_den);
  s.ceaf_e = MakePrf(c.ceaf_num, c.ceaf_p_den, c.ceaf_num, c.ceaf_r_den);
  s.avg_f1 = (s.muc.f1 + s.b_cubed.f1 + s.ceaf_e.f1) / 3.0;
  return s;
}

PRF Muc(const std::vector<Cluster> &gold, const std::vector<Cluster> &predicted) {
  return ScoresFromCounts(CountCoref(gold, predicted)).muc;
}

PRF BCubed(const std::vector<Cluster> &gold, const std::vector<Cluster> &predicted) {
  return ScoresFromCounts(CountCoref(gold, predicted)).b_cubed;
}

PRF CeafE(const std::vector<Cluster> &gold, const std::vector<Cluster> &predicted) {
  return ScoresFromCounts(CountCoref(gold, predicted)).ceaf_e;
}

double CorefAvgF1(const std::vector<Cluster> &gold, const std::vector<Cluster> &predicted) {
  return ScoresFromCounts(CountCoref(gold, predicted)).avg_f1;
}

// ---------------------------------------------------------------------------
// SRL

void SrlCounts::Add(const SrlCounts &o) {
  token_tp += o.token_tp;
  token_pred += o.token_pred;
  token_gold += o.token_gold;
  span_tp += o.span_tp;
  span_pred += o.span_pred;
  span_gold += o.span_gold;
}

PRF SrlCounts::token_f1() const { return MakePrf(token_tp, token_pred, token_tp, token_gold); }
PRF SrlCounts::span_f1() const { return MakePrf(span_tp, span_pred, span_tp, span_gold); }

std::vector<std::string> FrameToBio(const Frame &frame, const Span &sentence) {
  std::vector<std::string> tags(sentence.width(), "O");
  for (const Argument &a : frame.args) {
    for (int t = std::max(a.span.start, sentence.start); t <= std::min(a.span.end, sentence.end);
         ++t) {
      tags[t - sentence.start] = (t == a.span.start ? "B-" : "I-") + a.role;
    }
  }
  return tags;
}

SrlCounts CountSrl(const std::vector<Frame> &gold, const std::vector<Frame> &predicted,
                   const Document &doc) {
  const auto sentences = doc.sentence_spans();
  std::map<Span, const Frame *> g, p;
  for (const Frame &f : gold) g[f.predicate] = &f;
  for (const Frame &f : predicted) p[f.predicate] = &f;
  std::set<Span> predicates;
  for (const auto &[s, f] : g) predicates.insert(s);
  for (const auto &[s, f] : p) predicates.insert(s);

  SrlCounts c;
  for (const Span &pred : predicates) {
    const int si = doc.sentence_of(pred.start);
    if (si < 0) throw ValidationError("predicate outside document");
    const Span sent = sentences[si];
    const Frame empty{pred, {}};
    const Frame &gf = g.count(pred) ? *g[pred] : empty;
    const Frame &pf = p.count(pred) ? *p[pred] : empty;
    const auto gt = FrameToBio(gf, sent);
    const auto pt = FrameToBio(pf, sent);
    for (size_t i = 0; i < gt.size(); ++i) {
      c.token_gold += gt[i] != "O";
      c.token_pred += pt[i] != "O";
      c.token_tp += gt[i] != "O" && gt[i] == pt[i];
    }
    std::set<std::pair<Span, std::string>> gs;
    for (const Argument &a : gf.args) gs.insert({a.span, a.role});
    c.span_gold += static_cast<double>(gs.size());
    c.span_pred += static_cast<double>(pf.args.size());
    for (const Argument &a : pf.args) c.span_tp += gs.count({a.span, a.role});
  }
  return c;
}

PRF SrlTokenF1(const std::vector<Frame> &gold, const std::vector<Frame> &predicted,
               const Document &doc) {
  return CountSrl(gold, predicted, doc).token_f1();
}

CorefScores CorpusCorefScores(const std::vector<Document> &gold,
                              const std::vector<Document> &predicted) {
  if (gold.size() != predicted.size()) throw ValidationError("gold/predicted corpus size mismatch");
  CorefCounts total;
  for (size_t i = 0; i < gold.size(); ++i) total.Add(CountCoref(gold[i].clusters, predicted[i].clusters));
  return ScoresFromCounts(total);
}

SrlCounts CorpusSrlCounts(const std::vector<Document> &gold,
                          const std::vector<Document> &predicted) {
  if (gold.size() != predicted.size()) throw ValidationError("gold/predicted corpus size mismatch");
  SrlCounts total;
  for (size_t i = 0; i < gold.size(); ++i) {
    total.Add(CountSrl(gold[i].frames, predicted[i].frames, gold[i]));
  }
  return total;
}

}  // namespace ssgc
