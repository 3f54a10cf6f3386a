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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fixtures.h"
#include "gradcheck.h"
#include "ssgc/error.h"

namespace ssgc {
namespace {

Document TinyDoc() {
  Document d;
  d.id = "tiny";
  d.sentences = {{"Kim", "sees", "Lee"}};
  return d;
}

struct Setup {
  TokenEncoder enc;
  ParamStore store;
};

Setup Make(EncoderConfig cfg, const std::vector<Document> &docs, uint64_t seed = 1) {
  Setup s{TokenEncoder("enc", cfg, Vocabulary::Build(docs)), {}};
  Rng rng = MakeRng(seed);
  s.enc.InitParams(s.store, rng);
  return s;
}

EncoderConfig Small(bool context, bool chars) {
  EncoderConfig cfg;
  cfg.token_dim = 5;
  cfg.context = context;
  cfg.context_hidden = 3;
  cfg.char_cnn = chars;
  cfg.char_dim = 3;
  cfg.char_filters = 4;
  cfg.init_std = 0.5;
  return cfg;
}

TEST(Vocabulary, UnknownMapsToZero) {
  Vocabulary v = Vocabulary::Build({testing::NadineDocument()});
  EXPECT_EQ(v.id("zzz-never-seen"), 0);
  EXPECT_GT(v.id("Nadine"), 0);
  EXPECT_EQ(v.words()[v.id("tea")], "tea");
  Vocabulary copy(std::vector<std::string>(v.words().begin() + 1, v.words().end()));
  EXPECT_EQ(copy.words(), v.words());
}

TEST(Encoder, OutputDims) {
  EncoderConfig cfg;
  EXPECT_EQ(cfg.output_dim(), 128);
  EXPECT_EQ(cfg.span_dim(), 384);
  cfg.context = false;
  EXPECT_EQ(cfg.output_dim(), 64);
  cfg.char_cnn = true;
  EXPECT_EQ(cfg.output_dim(), 80);
  cfg.char_width = 4;
  EXPECT_THROW(ValidateEncoderConfig(cfg), ConfigError);
}

TEST(Encoder, IdenticalSentencesWithoutContext) {
  Document d;
  d.id = "rep";
  d.sentences = {{"a", "b", "c"}, {"a", "b", "c"}};
  for (bool chars : {false, true}) {
    auto s = Make(Small(false, chars), {d});
    Tape tape;
    const Tensor &t = tape.value(s.enc.EncodeTokens(tape, s.store, d));
    ASSERT_EQ(t.rows(), 6);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < t.cols(); ++c) EXPECT_EQ(t.at(r, c), t.at(r + 3, c));
    }
  }
}

TEST(Encoder, ContextRunsPerSentence) {
  Document d;
  d.id = "rep";
  d.sentences = {{"a", "b", "c"}, {"a", "b", "c"}};
  auto s = Make(Small(true, false), {d});
  Tape tape;
  const Tensor &t = tape.value(s.enc.EncodeTokens(tape, s.store, d));
  ASSERT_EQ(t.cols(), 6);
  for (int c = 0; c < t.cols(); ++c) EXPECT_EQ(t.at(0, c), t.at(3, c));
}

TEST(Encoder, DocumentOrderIrrelevant) {
  Document a = testing::NadineDocument();
  Document b = TinyDoc();
  auto s = Make(Small(true, true), {a, b});
  Tape t1, t2;
  Var a1 = s.enc.EncodeTokens(t1, s.store, a);
  Var b1 = s.enc.EncodeTokens(t1, s.store, b);
  Var b2 = s.enc.EncodeTokens(t2, s.store, b);
  Var a2 = s.enc.EncodeTokens(t2, s.store, a);
  EXPECT_EQ(t1.value(a1), t2.value(a2));
  EXPECT_EQ(t1.value(b1), t2.value(b2));
}

TEST(Encoder, WidthOneSpan) {
  Document d = TinyDoc();
  auto s = Make(Small(true, false), {d});
  Tape tape;
  Var tok = s.enc.EncodeTokens(tape, s.store, d);
  const Tensor &span = tape.value(s.enc.EncodeSpan(tape, s.store, tok, Span{1, 1}));
  const int D = s.enc.output_dim();
  ASSERT_EQ(span.cols(), 3 * D);
  for (int j = 0; j < D; ++j) {
    const double x = tape.value(tok).at(1, j);
    EXPECT_EQ(span.at(0, j), x);
    EXPECT_EQ(span.at(0, D + j), x);
    EXPECT_NEAR(span.at(0, 2 * D + j), x, 1e-15);
  }
}

TEST(Encoder, AttentionNormalized) {
  Document d = testing::NadineDocument();
  auto s = Make(Small(true, true), {d});
  Tape tape;
  Var tok = s.enc.EncodeTokens(tape, s.store, d);
  for (int a = 0; a < 10; ++a) {
    for (int b = a; b < 10; ++b) {
      const Tensor &alpha = tape.value(s.enc.SpanAttention(tape, s.store, tok, Span{a, b}));
      double sum = 0;
      for (double x : alpha.data) {
        EXPECT_GT(x, 0.0);
        sum += x;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(Encoder, UniformAttentionIsMean) {
  Document d = testing::NadineDocument();
  auto s = Make(Small(false, false), {d});
  Tensor &attn = s.store.get("enc/attn");
  std::fill(attn.data.begin(), attn.data.end(), 0.0);
  Tape tape;
  Var tok = s.enc.EncodeTokens(tape, s.store, d);
  const Tensor &span = tape.value(s.enc.EncodeSpan(tape, s.store, tok, Span{6, 8}));
  const int D = s.enc.output_dim();
  for (int j = 0; j < D; ++j) {
    const Tensor &t = tape.value(tok);
    const double mean = (t.at(6, j) + t.at(7, j) + t.at(8, j)) / 3.0;
    EXPECT_NEAR(span.at(0, 2 * D + j), mean, 1e-15);
  }
}

TEST(Encoder, SpanLocalWithoutContext) {
  Document d = testing::NadineDocument();
  Document other = d;
  other.sentences[0][0] = "Someone";
  other.sentences[1][5] = "!";
  auto s = Make(Small(false, true), {d, other});
  Tape tape;
  Var t1 = s.enc.EncodeTokens(tape, s.store, d);
  Var t2 = s.enc.EncodeTokens(tape, s.store, other);
  std::vector<Span> spans = {{1, 3}, {5, 8}, {2, 2}};
  EXPECT_EQ(tape.value(s.enc.EncodeSpans(tape, s.store, t1, spans)),
            tape.value(s.enc.EncodeSpans(tape, s.store, t2, spans)));
}

TEST(Encoder, SpanOutOfBounds) {
  Document d = TinyDoc();
  auto s = Make(Small(false, false), {d});
  Tape tape;
  Var tok = s.enc.EncodeTokens(tape, s.store, d);
  EXPECT_THROW(s.enc.EncodeSpan(tape, s.store, tok, Span{2, 3}), ValidationError);
  EXPECT_THROW(s.enc.EncodeSpan(tape, s.store, tok, Span{-1, 0}), ValidationError);
}

TEST(Encoder, PretrainedHook) {
  Document d = TinyDoc();
  auto s = Make(Small(false, false), {d});
  std::istringstream in("Kim 1 2 3 4 5\nnope 0 0 0 0 0\n\nLee 5 4 3 2 1\n");
  EXPECT_EQ(s.enc.LoadPretrained(s.store, in), 2);
  const Tensor &emb = s.store.get("enc/emb");
  EXPECT_EQ(emb.at(s.enc.vocab().id("Kim"), 1), 2.0);
  EXPECT_EQ(emb.at(s.enc.vocab().id("Lee"), 0), 5.0);
  std::istringstream bad("Kim 1 2 3\n");
  try {
    s.enc.LoadPretrained(s.store, bad);
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 1);
  }
}

TEST(Encoder, GradCheck) {
  Document d = TinyDoc();
  for (bool chars : {false, true}) {
    auto s = Make(Small(true, chars), {d}, 7);
    Rng rng = MakeRng(9);
    const Tensor probe = Tensor::Gaussian(4, 3 * s.enc.output_dim(), 1.0, rng);
    auto loss = [&](Tape &tape) {
      Var tok = s.enc.EncodeTokens(tape, s.store, d);
      Var spans = s.enc.EncodeSpans(tape, s.store, tok, {{0, 0}, {0, 2}, {1, 2}, {2, 2}});
      return tape.Sum(tape.Tanh(tape.Mul(spans, tape.Constant(probe))));
    };
    auto r = testing::GradCheck(s.store, loss);
    EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
    EXPECT_GT(r.checked, 100);
  }
}

}  // namespace
}  // namespace ssgc
