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

#ifndef SSGC_METRICS_H_
#define SSGC_METRICS_H_

#include <vector>

#include "ssgc/corpus.h"

namespace ssgc {

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// f1 = 2PR/(P+R), or 0 when P+R = 0. Zero denominators give zero scores.
PRF MakePrf(double p_num, double p_den, double r_num, double r_den);

// Maximum-weight one-to-one assignment for a rectangular matrix. Returns the
// column assigned to each row, or -1 for rows left unmatched (more rows than
// columns).
std::vector<int> Hungarian(const std::vector<std::vector<double>> &weights);

// Raw numerators and denominators, summed over documents for corpus scores.
struct CorefCounts {
  double muc_p_num = 0, muc_p_den = 0, muc_r_num = 0, muc_r_den = 0;
  double b3_p_num = 0, b3_p_den = 0, b3_r_num = 0, b3_r_den = 0;
  double ceaf_num = 0, ceaf_p_den = 0, ceaf_r_den = 0;

  void Add(const CorefCounts &o);
};

struct CorefScores {
  PRF muc;
  PRF b_cubed;
  PRF ceaf_e;
  double avg_f1 = 0.0;
};

// Singleton predicted clusters are dropped before counting.
CorefCounts CountCoref(const std::vector<Cluster> &gold, const std::vector<Cluster> &predicted);
CorefScores ScoresFromCounts(const CorefCounts &c);

PRF Muc(const std::vector<Cluster> &gold, const std::vector<Cluster> &predicted);
PRF BCubed(const std::vector<Cluster> &gold, const std::vector<Cluster> &predicted);
PRF CeafE(const std::vector<Cluster> &gold, const std::vector<Cluster> &predicted);
double CorefAvgF1(const std::vector<Cluster> &gold, const std::vector<Cluster> &predicted);

struct SrlCounts {
  double token_tp = 0, token_pred = 0, token_gold = 0;
  double span_tp = 0, span_pred = 0, span_gold = 0;

  void Add(const SrlCounts &o);
  PRF token_f1() const;
  PRF span_f1() const;
};

// Frames are expanded to per-(predicate, token) BIO tags over the predicate's
// sentence; non-O tags count with exact-label match. Span counts use exact
// (predicate, role, span) triples.
SrlCounts CountSrl(const std::vector<Frame> &gold, const std::vector<Frame> &predicted,
                   const Document &doc);
PRF SrlTokenF1(const std::vector<Frame> &gold, const std::vector<Frame> &predicted,
               const Document &doc);

// BIO tags of one frame over its sentence ("O" for the predicate itself).
std::vector<std::string> FrameToBio(const Frame &frame, const Span &sentence);

// Corpus-level scores, micro-averaged over documents aligned by position.
CorefScores CorpusCorefScores(const std::vector<Document> &gold,
                              const std::vector<Document> &predicted);
SrlCounts CorpusSrlCounts(const std::vector<Document> &gold,
                          const std::vector<Document> &predicted);

}  // namespace ssgc

#endif  // SSGC_METRICS_H_
