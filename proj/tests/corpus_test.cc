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

#include "ssgc/corpus.h"

#include <gtest/gtest.h>

#include "fixtures.h"
#include "ssgc/error.h"

namespace ssgc {
namespace {

using testing::kNadineColumns;
using testing::kNadineJsonl;
using testing::NadineDocument;

TEST(ParseJsonl, NadineDocument) {
  auto docs = ParseJsonlString(kNadineJsonl);
  ASSERT_EQ(docs.size(), 1u);
  const Document &d = docs[0];
  EXPECT_EQ(d.id, "nadine");
  EXPECT_EQ(d.token_count(), 10);
  EXPECT_EQ(d.clusters.size(), 2u);
  EXPECT_EQ(d.frames.size(), 2u);
  EXPECT_EQ(d.frames[1].args[2].role, "ARGM-TMP");
  EXPECT_EQ(d.frames[1].args[2].span, (Span{7, 8}));
  EXPECT_EQ(d.sentence_of(4), 1);
}

TEST(ParseJsonl, EmptyInput) { EXPECT_TRUE(ParseJsonlString("").empty()); }

TEST(ParseJsonl, ReversedSpanIsValidationError) {
  std::string line =
      R"({"id":"bad","sentences":[["a","b","c","d","e","f"]],"clusters":[[[5,3],[0,0]]],"frames":[]})";
  try {
    ParseJsonlString(line);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError &e) {
    EXPECT_NE(std::string(e.what()).find("bad"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("[5,3]"), std::string::npos);
  }
}

TEST(ParseJsonl, MalformedJsonReportsLine) {
  try {
    ParseJsonlString(kNadineJsonl + "{not json\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(ParseJsonl, RejectsInvariantViolations) {
  auto bad = [](const std::string &clusters, const std::string &frames) {
    std::string line = R"({"id":"x","sentences":[["a","b","c"],["d","e"]],"clusters":)" +
                       clusters + R"(,"frames":)" + frames + "}";
    EXPECT_THROW(ParseJsonlString(line), ValidationError) << clusters << " " << frames;
  };
  bad(R"([[[0,0]]])", "[]");                           // singleton cluster
  bad(R"([[[0,0],[0,0]]])", "[]");                     // duplicate mention
  bad(R"([[[0,0],[3,3]],[[3,3],[4,4]]])", "[]");       // span in two clusters
  bad(R"([[[2,3],[4,4]]])", "[]");                     // crosses sentences
  bad("[]", R"([{"predicate":[1,1],"args":[{"role":"ARG0","span":[3,3]}]}])");
  bad("[]", R"([{"predicate":[1,1],"args":[{"role":"ARG0","span":[0,1]}]}])");
  bad("[]", R"([{"predicate":[1,1],"args":[{"role":"ARG0","span":[0,0]},{"role":"ARG0","span":[2,2]}]}])");
  bad("[]", R"([{"predicate":[1,1],"args":[{"role":"ARG9X","span":[0,0]}]}])");
  bad("[]", R"([{"predicate":[0,0],"args":[{"role":"ARG1","span":[1,2]},{"role":"ARG2","span":[2,2]}]}])");
}

TEST(ParseConllColumns, MatchesJsonl) {
  auto from_columns = ParseConllColumnsString(kNadineColumns);
  ASSERT_EQ(from_columns.size(), 1u);
  EXPECT_EQ(from_columns[0], NadineDocument());
}

TEST(ParseConllColumns, SerializerRoundTrip) {
  auto docs = SynthesizeCorpus(SynthConfig::Default(), 3);
  docs.resize(10);
  EXPECT_EQ(ParseConllColumnsString(SerializeConllColumnsString(docs)), docs);
}

TEST(ParseConllColumns, NoPredicates) {
  auto docs = ParseConllColumnsString(
      "#begin document np\nHello\t-\t(0)\nthere\t-\t-\nhello\t-\t(0)\n\n#end document\n");
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_TRUE(docs[0].frames.empty());
  EXPECT_EQ(docs[0].clusters.size(), 1u);
}

TEST(ParseConllColumns, UnclosedBracket) {
  try {
    ParseConllColumnsString("#begin document u\na\t-\t(3\nb\t-\t-\n\n#end document\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_NE(std::string(e.what()).find("token 0"), std::string::npos) << e.what();
  }
}

TEST(ParseConllColumns, CloseWithoutOpen) {
  EXPECT_THROW(ParseConllColumnsString("#begin document u\na\t-\t3)\n\n#end document\n"),
               ParseError);
}

TEST(ParseConllColumns, InsideWithoutBegin) {
  EXPECT_THROW(ParseConllColumnsString("#begin document u\n"
                                       "a\t-\tI-ARG0\t-\n"
                                       "b\tbe\tB-V\t-\n\n#end document\n"),
               ParseError);
  EXPECT_THROW(ParseConllColumnsString("#begin document u\n"
                                       "a\t-\tB-ARG0\t-\n"
                                       "b\t-\tI-ARG1\t-\n"
                                       "c\tbe\tB-V\t-\n\n#end document\n"),
               ParseError);
}

TEST(ParseConllColumns, NestedMentions) {
  auto docs = ParseConllColumnsString(
      "#begin document n\n"
      "her\t-\t(1|(2)\n"
      "sister\t-\t1)\n"
      "saw\t-\t-\n"
      "her\t-\t(2)\n"
      "sister\t-\t(1)\n\n"
      "#end document\n");
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].clusters.size(), 2u);
  EXPECT_EQ(docs[0].clusters[0], (Cluster{{0, 0}, {3, 3}}));
  EXPECT_EQ(docs[0].clusters[1], (Cluster{{0, 1}, {4, 4}}));
}

TEST(SynthesizeCorpus, TwoSentenceDocument) {
  SynthConfig cfg = SynthConfig::Default();
  cfg.count = 1;
  cfg.min_sentences = cfg.max_sentences = 2;
  auto docs = SynthesizeCorpus(cfg, 7);
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].sentences.size(), 2u);
  EXPECT_GE(docs[0].clusters.size(), 1u);
  EXPECT_EQ(docs[0].frames.size(), 2u);
  EXPECT_NO_THROW(Validate(docs[0]));
}

TEST(SynthesizeCorpus, CountZero) {
  SynthConfig cfg = SynthConfig::Default();
  cfg.count = 0;
  EXPECT_TRUE(SynthesizeCorpus(cfg, 1).empty());
}

TEST(SynthesizeCorpus, Deterministic) {
  SynthConfig cfg = SynthConfig::Default();
  cfg.count = 25;
  EXPECT_EQ(SerializeJsonlString(SynthesizeCorpus(cfg, 11)),
            SerializeJsonlString(SynthesizeCorpus(cfg, 11)));
  EXPECT_NE(SerializeJsonlString(SynthesizeCorpus(cfg, 11)),
            SerializeJsonlString(SynthesizeCorpus(cfg, 12)));
}

TEST(SynthesizeCorpus, EmptyVocabularyIsConfigError) {
  SynthConfig cfg = SynthConfig::Default();
  cfg.verbs.clear();
  EXPECT_THROW(SynthesizeCorpus(cfg, 1), ConfigError);
}

TEST(SynthesizeCorpus, EveryVerbHasAFrame) {
  auto docs = SynthesizeCorpus(SynthConfig::Default(), 5);
  for (const auto &d : docs) {
    EXPECT_EQ(d.frames.size(), d.sentences.size());
    EXPECT_GE(d.clusters.size(), 1u);
  }
}

TEST(SerializeJsonl, RoundTripAndLineCount) {
  EXPECT_EQ(SerializeJsonlString({}), "");
  EXPECT_EQ(ParseJsonlString(SerializeJsonlString({NadineDocument()})),
            std::vector<Document>{NadineDocument()});
  auto docs = SynthesizeCorpus(SynthConfig::Default(), 2);
  std::string text = SerializeJsonlString(docs);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 100);
  EXPECT_EQ(ParseJsonlString(text), docs);
}

}  // namespace
}  // namespace ssgc
