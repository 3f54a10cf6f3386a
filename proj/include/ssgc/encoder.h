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

#ifndef SSGC_ENCODER_H_
#define SSGC_ENCODER_H_

#include <istream>
#include <string>
#include <unordered_map>
#include <vector>

#include "ssgc/corpus.h"
#include "ssgc/optim.h"
#include "ssgc/rng.h"
#include "ssgc/tape.h"

namespace ssgc {

// Word ids; 0 is the learned UNK row.
class Vocabulary {
 public:
  Vocabulary();
  explicit Vocabulary(const std::vector<std::string> &words);

  static Vocabulary Build(const std::vector<Document> &docs, int min_count = 1);

  int id(const std::string &word) const;
  int size() const { return static_cast<int>(words_.size()); }
  // Index 0 is "<unk>".
  const std::vector<std::string> &words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

struct EncoderConfig {
  int token_dim = 64;
  bool context = true;
  int context_hidden = 64;  // per direction
  bool char_cnn = false;
  int char_dim = 8;
  int char_filters = 16;
  int char_width = 5;
  double init_std = 0.02;

  int output_dim() const;
  int span_dim() const { return 3 * output_dim(); }
};

void ValidateEncoderConfig(const EncoderConfig &cfg);

// Parameters live in a ParamStore under `prefix`; this object only holds the
// layout and the vocabulary.
class TokenEncoder {
 public:
  TokenEncoder() = default;
  TokenEncoder(std::string prefix, EncoderConfig cfg, Vocabulary vocab);

  const std::string &prefix() const { return prefix_; }
  const EncoderConfig &config() const { return cfg_; }
  const Vocabulary &vocab() const { return vocab_; }
  int output_dim() const { return cfg_.output_dim(); }
  int span_dim() const { return cfg_.span_dim(); }

  void InitParams(ParamStore &store, Rng &rng) const;

  // Overwrites embedding rows from "word v1 ... vD" lines. Returns the number
  // of rows replaced. Lines with the wrong width raise ParseError.
  int LoadPretrained(ParamStore &store, std::istream &in) const;

  // tokens x output_dim. The recurrent contextualizer runs per sentence.
  Var EncodeTokens(Tape &tape, const ParamStore &store, const Document &doc) const;

  // One row per span: [first, last, attention-weighted sum].
  Var EncodeSpans(Tape &tape, const ParamStore &store, Var tokens,
                  const std::vector<Span> &spans) const;
  Var EncodeSpan(Tape &tape, const ParamStore &store, Var tokens, const Span &span) const;
  // 1 x width softmax weights used inside EncodeSpans.
  Var SpanAttention(Tape &tape, const ParamStore &store, Var tokens, const Span &span) const;

  std::string name(const std::string &leaf) const { return prefix_ + "/" + leaf; }

 private:
  Var CharFeatures(Tape &tape, const ParamStore &store, const std::vector<std::string> &words) const;
  Var RunLstm(Tape &tape, const ParamStore &store, Var inputs, const std::string &dir,
              bool reverse) const;

  std::string prefix_ = "encoder";
  EncoderConfig cfg_;
  Vocabulary vocab_;
};

}  // namespace ssgc

#endif  // SSGC_ENCODER_H_
