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

#include "ssgc/encoder.h"

#include <cmath>
#include <map>
#include <sstream>

#include "ssgc/error.h"

namespace ssgc {

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(const std::vector<std::string> &words) {
  words_.push_back("<unk>");
  index_["<unk>"] = 0;
  for (const auto &w : words) {
    if (w == "<unk>" || index_.count(w)) continue;
    index_[w] = static_cast<int>(words_.size());
    words_.push_back(w);
  }
}

Vocabulary Vocabulary::Build(const std::vector<Document> &docs, int min_count) {
  std::map<std::string, int> counts;
  for (const auto &d : docs) {
    for (const auto &s : d.sentences) {
      for (const auto &w : s) ++counts[w];
    }
  }
  std::vector<std::string> words;
  for (const auto &[w, c] : counts) {
    if (c >= min_count) words.push_back(w);
  }
  return Vocabulary(words);
}

int Vocabulary::id(const std::string &word) const {
  auto it = index_.find(word);
  return it == index_.end() ? 0 : it->second;
}

int EncoderConfig::output_dim() const {
  if (context) return 2 * context_hidden;
  return token_dim + (char_cnn ? char_filters : 0);
}

void ValidateEncoderConfig(const EncoderConfig &cfg) {
  if (cfg.token_dim <= 0 || cfg.context_hidden <= 0 || cfg.char_dim <= 0 ||
      cfg.char_filters <= 0 || cfg.char_width <= 0 || cfg.char_width % 2 == 0) {
    throw ConfigError("encoder dims must be positive and char_width odd");
  }
  if (!(cfg.init_std > 0)) throw ConfigError("encoder init_std must be positive");
}

TokenEncoder::TokenEncoder(std::string prefix, EncoderConfig cfg, Vocabulary vocab)
    : prefix_(std::move(prefix)), cfg_(cfg), vocab_(std::move(vocab)) {
  ValidateEncoderConfig(cfg_);
}

namespace {
constexpr int kCharRows = 257;  // byte + 1, row 0 pads
}

void TokenEncoder::InitParams(ParamStore &store, Rng &rng) const {
  store.Add(name("emb"), Tensor::Gaussian(vocab_.size(), cfg_.token_dim, cfg_.init_std, rng));
  int in = cfg_.token_dim;
  if (cfg_.char_cnn) {
    store.Add(name("char_emb"), Tensor::Gaussian(kCharRows, cfg_.char_dim, 0.1, rng));
    const double s = 1.0 / std::sqrt(cfg_.char_dim * cfg_.char_width);
    for (int k = 0; k < cfg_.char_width; ++k) {
      store.Add(name("char_conv" + std::to_string(k)),
                Tensor::Gaussian(cfg_.char_dim, cfg_.char_filters, s, rng));
    }
    store.Add(name("char_bias"), Tensor::Zeros(1, cfg_.char_filters));
    in += cfg_.char_filters;
  }
  if (cfg_.context) {
    const int h = cfg_.context_hidden;
    const double s = 1.0 / std::sqrt(static_cast<double>(in + h));
    for (const char *dir : {"fw", "bw"}) {
      const std::string d = dir;
      store.Add(name("lstm_" + d + "_wx"), Tensor::Gaussian(in, 4 * h, s, rng));
      store.Add(name("lstm_" + d + "_wh"), Tensor::Gaussian(h, 4 * h, s, rng));
      Tensor b = Tensor::Zeros(1, 4 * h);
      for (int j = h; j < 2 * h; ++j) b.data[j] = 1.0;  // forget gate
      store.Add(name("lstm_" + d + "_b"), b);
    }
  }
  store.Add(name("attn"), Tensor::Gaussian(output_dim(), 1, 1.0 / std::sqrt(output_dim()), rng));
}

int TokenEncoder::LoadPretrained(ParamStore &store, std::istream &in) const {
  Tensor &emb = store.get(name("emb"));
  std::string line;
  int line_no = 0, loaded = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string word;
    if (!(ss >> word)) continue;
    std::vector<double> values;
    double v;
    while (ss >> v) values.push_back(v);
    if (!ss.eof()) throw ParseError("non-numeric vector component", line_no);
    if (static_cast<int>(values.size()) != cfg_.token_dim) {
      throw ParseError("expected " + std::to_string(cfg_.token_dim) + " components, got " +
                           std::to_string(values.size()),
                       line_no);
    }
    const int id = vocab_.id(word);
    if (id == 0) continue;
    for (int j = 0; j < cfg_.token_dim; ++j) emb.at(id, j) = values[j];
    ++loaded;
  }
  return loaded;
}

Var TokenEncoder::CharFeatures(Tape &tape, const ParamStore &store,
                               const std::vector<std::string> &words) const {
  // Convolution as a sum of shifted gathers: one matmul per filter offset for
  // all character positions of the document at once.
  const int half = cfg_.char_width / 2;
  std::vector<std::vector<int>> shifted(cfg_.char_width);
  std::vector<int> lengths;
  for (const auto &w : words) {
    const int len = std::max<int>(1, static_cast<int>(w.size()));
    lengths.push_back(len);
    for (int pos = 0; pos < len; ++pos) {
      for (int k = 0; k < cfg_.char_width; ++k) {
        const int c = pos + k - half;
        const int id = (c >= 0 && c < static_cast<int>(w.size()))
                           ? static_cast<unsigned char>(w[c]) + 1
                           : 0;
        shifted[k].push_back(id);
      }
    }
  }
  Var table = tape.Param(store, name("char_emb"));
  Var conv;
  for (int k = 0; k < cfg_.char_width; ++k) {
    Var term = tape.MatMul(tape.GatherRows(table, shifted[k]),
                           tape.Param(store, name("char_conv" + std::to_string(k))));
    conv = k == 0 ? term : tape.Add(conv, term);
  }
  conv = tape.Relu(tape.Add(conv, tape.Param(store, name("char_bias"))));
  std::vector<Var> rows;
  int offset = 0;
  for (int len : lengths) {
    rows.push_back(tape.MaxRows(tape.SliceRows(conv, offset, len)));
    offset += len;
  }
  return tape.ConcatRows(rows);
}

Var TokenEncoder::RunLstm(Tape &tape, const ParamStore &store, Var inputs, const std::string &dir,
                          bool reverse) const {
  const int h = cfg_.context_hidden;
  const int steps = tape.value(inputs).rows();
  Var xw = tape.Add(tape.MatMul(inputs, tape.Param(store, name("lstm_" + dir + "_wx"))),
                    tape.Param(store, name("lstm_" + dir + "_b")));
  Var wh = tape.Param(store, name("lstm_" + dir + "_wh"));
  Var hidden = tape.Constant(Tensor::Zeros(1, h));
  Var cell = tape.Constant(Tensor::Zeros(1, h));
  std::vector<Var> out(steps);
  for (int s = 0; s < steps; ++s) {
    const int t = reverse ? steps - 1 - s : s;
    Var z = tape.Add(tape.SliceRows(xw, t, 1), tape.MatMul(hidden, wh));
    Var i = tape.Sigmoid(tape.SliceCols(z, 0, h));
    Var f = tape.Sigmoid(tape.SliceCols(z, h, h));
    Var g = tape.Tanh(tape.SliceCols(z, 2 * h, h));
    Var o = tape.Sigmoid(tape.SliceCols(z, 3 * h, h));
    cell = tape.Add(tape.Mul(f, cell), tape.Mul(i, g));
    hidden = tape.Mul(o, tape.Tanh(cell));
    out[t] = hidden;
  }
  return tape.ConcatRows(out);
}

Var TokenEncoder::EncodeTokens(Tape &tape, const ParamStore &store, const Document &doc) const {
  const auto words = doc.tokens();
  if (words.empty()) throw ValidationError("cannot encode an empty document");
  std::vector<int> ids;
  ids.reserve(words.size());
  for (const auto &w : words) ids.push_back(vocab_.id(w));
  Var x = tape.GatherRows(tape.Param(store, name("emb")), ids);
  if (cfg_.char_cnn) x = tape.ConcatCols({x, CharFeatures(tape, store, words)});
  if (!cfg_.context) return x;
  std::vector<Var> blocks;
  for (const Span &s : doc.sentence_spans()) {
    Var part = tape.SliceRows(x, s.start, s.width());
    blocks.push_back(tape.ConcatCols(
        {RunLstm(tape, store, part, "fw", false), RunLstm(tape, store, part, "bw", true)}));
  }
  return blocks.size() == 1 ? blocks[0] : tape.ConcatRows(blocks);
}

Var TokenEncoder::SpanAttention(Tape &tape, const ParamStore &store, Var tokens,
                                const Span &span) const {
  const int n = tape.value(tokens).rows();
  if (span.start < 0 || span.end >= n || span.start > span.end) {
    throw ValidationError("span " + ToString(span) + " outside " + std::to_string(n) + " tokens");
  }
  Var scores = tape.MatMul(tape.SliceRows(tokens, span.start, span.width()),
                           tape.Param(store, name("attn")));
  return tape.SoftmaxRows(tape.Transpose(scores));
}

Var TokenEncoder::EncodeSpans(Tape &tape, const ParamStore &store, Var tokens,
                              const std::vector<Span> &spans) const {
  const int n = tape.value(tokens).rows();
  std::vector<int> first, last;
  for (const Span &s : spans) {
    if (s.start < 0 || s.end >= n || s.start > s.end) {
      throw ValidationError("span " + ToString(s) + " outside " + std::to_string(n) + " tokens");
    }
    first.push_back(s.start);
    last.push_back(s.end);
  }
  Var scores = tape.MatMul(tokens, tape.Param(store, name("attn")));
  std::vector<Var> pooled;
  pooled.reserve(spans.size());
  for (const Span &s : spans) {
    Var alpha = tape.SoftmaxRows(tape.Transpose(tape.SliceRows(scores, s.start, s.width())));
    pooled.push_back(tape.MatMul(alpha, tape.SliceRows(tokens, s.start, s.width())));
  }
  return tape.ConcatCols(
      {tape.GatherRows(tokens, first), tape.GatherRows(tokens, last), tape.ConcatRows(pooled)});
}

Var TokenEncoder::EncodeSpan(Tape &tape, const ParamStore &store, Var tokens,
                             const Span &span) const {
  return EncodeSpans(tape, store, tokens, {span});
}

}  // namespace ssgc
