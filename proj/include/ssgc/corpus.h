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

#ifndef SSGC_CORPUS_H_
#define SSGC_CORPUS_H_

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ssgc {

// Inclusive document-level token range [start, end].
struct Span {
  int start = 0;
  int end = 0;

  int width() const { return end - start + 1; }
  bool contains(int token) const { return token >= start && token <= end; }
  bool overlaps(const Span &o) const { return start <= o.end && o.start <= end; }

  auto operator<=>(const Span &) const = default;
};

std::string ToString(const Span &span);

using Cluster = std::vector<Span>;

// Symbolic semantic-role inventory. Fixed once a corpus is loaded.
class RoleInventory {
 public:
  // ARG0..ARG5 plus the common ARGM modifiers.
  static const RoleInventory &Default();

  explicit RoleInventory(std::vector<std::string> labels);

  const std::vector<std::string> &labels() const { return labels_; }
  int size() const { return static_cast<int>(labels_.size()); }
  bool contains(const std::string &label) const { return index_.count(label) > 0; }
  // Throws ValidationError for unknown labels.
  int index(const std::string &label) const;
  const std::string &label(int index) const { return labels_.at(index); }

  // ARG0..ARG5.
  static bool IsCore(const std::string &label);
  // Numeric position of a core role (ARG3 -> 3), -1 for modifiers.
  static int CoreNumber(const std::string &label);

 private:
  std::vector<std::string> labels_;
  std::map<std::string, int> index_;
};

struct Argument {
  std::string role;
  Span span;

  auto operator<=>(const Argument &) const = default;
};

struct Frame {
  Span predicate;
  std::vector<Argument> args;

  auto operator<=>(const Frame &) const = default;
};

struct Document {
  std::string id;
  std::vector<std::vector<std::string>> sentences;
  std::vector<Cluster> clusters;
  std::vector<Frame> frames;

  int token_count() const;
  std::vector<std::string> tokens() const;
  // Document-level spans of each sentence.
  std::vector<Span> sentence_spans() const;
  // Sentence index of a token, or -1 when out of range.
  int sentence_of(int token) const;

  bool operator==(const Document &) const = default;
};

// Throws ValidationError naming the document id and the offending span.
void Validate(const Document &doc, const RoleInventory &roles = RoleInventory::Default());

// Sorts spans within clusters, clusters by first mention, frames by predicate
// and arguments by span.
void Canonicalize(Document &doc);

// One JSON object per line. Blank lines are skipped.
std::vector<Document> ParseJsonl(std::istream &in,
                                 const RoleInventory &roles = RoleInventory::Default());
std::vector<Document> ParseJsonlString(const std::string &text,
                                       const RoleInventory &roles = RoleInventory::Default());
void SerializeJsonl(const std::vector<Document> &docs, std::ostream &out);
std::string SerializeJsonlString(const std::vector<Document> &docs);

// Tab-separated columns: token, predicate lemma or "-", one BIO column per
// predicate of the sentence, coreference brackets. Sentences are separated by
// blank lines and documents wrapped in "#begin document <id>" /
// "#end document".
std::vector<Document> ParseConllColumns(
    std::istream &in, const RoleInventory &roles = RoleInventory::Default());
std::vector<Document> ParseConllColumnsString(
    const std::string &text, const RoleInventory &roles = RoleInventory::Default());
// Predicate lemmas are not stored in Document; the token itself is written.
void SerializeConllColumns(const std::vector<Document> &docs, std::ostream &out);
std::string SerializeConllColumnsString(const std::vector<Document> &docs);

struct Adverbial {
  std::string text;  // space-separated tokens
  std::string role;
};

// Vocabulary and shape of the template corpus generator.
struct SynthConfig {
  std::vector<std::string> names;
  std::vector<std::string> nouns;
  std::vector<std::string> verbs;
  std::vector<std::string> person_pronouns;
  std::vector<std::string> thing_pronouns;
  std::vector<Adverbial> adverbials;
  int min_sentences = 3;
  int max_sentences = 5;
  int count = 100;
  // Probability that a follow-up sentence refers to the person by pronoun
  // rather than by repeating the name.
  double pronoun_subject_prob = 0.8;
  // Probability that a follow-up object refers back to the first thing.
  double pronoun_object_prob = 0.6;

  static SynthConfig Default();
};

// Template documents "NAME VERB the NOUN ADVP ." followed by sentences whose
// pronouns corefer with the earlier name and noun. Throws ConfigError for an
// empty vocabulary list.
std::vector<Document> SynthesizeCorpus(const SynthConfig &config, uint64_t seed);

}  // namespace ssgc

#endif  // SSGC_CORPUS_H_
