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

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ssgc/error.h"
#include "ssgc/rng.h"

namespace ssgc {

using json = nlohmann::json;

std::string ToString(const Span &span) {
  return "[" + std::to_string(span.start) + "," + std::to_string(span.end) + "]";
}

// ---------------------------------------------------------------------------
// RoleInventory

const RoleInventory &RoleInventory::Default() {
  static const RoleInventory inventory({"ARG0", "ARG1", "ARG2", "ARG3", "ARG4",
                                        "ARG5", "ARGM-TMP", "ARGM-LOC", "ARGM-MNR",
                                        "ARGM-NEG", "ARGM-MOD", "ARGM-ADV", "ARGM-DIS",
                                        "ARGM-DIR", "ARGM-PRP", "ARGM-EXT"});
  return inventory;
}

RoleInventory::RoleInventory(std::vector<std::string> labels) : labels_(std::move(labels)) {
  for (size_t i = 0; i < labels_.size(); ++i) {
    if (!index_.emplace(labels_[i], static_cast<int>(i)).second) {
      throw ConfigError("duplicate role label " + labels_[i]);
    }
  }
}

int RoleInventory::index(const std::string &label) const {
  auto it = index_.find(label);
  if (it == index_.end()) throw ValidationError("unknown role label '" + label + "'");
  return it->second;
}

bool RoleInventory::IsCore(const std::string &label) { return CoreNumber(label) >= 0; }

int RoleInventory::CoreNumber(const std::string &label) {
  if (label.size() == 4 && label.compare(0, 3, "ARG") == 0 && label[3] >= '0' &&
      label[3] <= '9') {
    return label[3] - '0';
  }
  return -1;
}

// ---------------------------------------------------------------------------
// Document

int Document::token_count() const {
  int n = 0;
  for (const auto &s : sentences) n += static_cast<int>(s.size());
  return n;
}

std::vector<std::string> Document::tokens() const {
  std::vector<std::string> out;
  for (const auto &s : sentences) out.insert(out.end(), s.begin(), s.end());
  return out;
}

std::vector<Span> Document::sentence_spans() const {
  std::vector<Span> out;
  int offset = 0;
  for (const auto &s : sentences) {
    int n = static_cast<int>(s.size());
    out.push_back({offset, offset + n - 1});
    offset += n;
  }
  return out;
}

int Document::sentence_of(int token) const {
  int offset = 0;
  for (size_t i = 0; i < sentences.size(); ++i) {
    int n = static_cast<int>(sentences[i].size());
    if (token >= offset && token < offset + n) return static_cast<int>(i);
    offset += n;
  }
  return -1;
}

namespace {

[[noreturn]] void Fail(const Document &doc, const std::string &what) {
  throw ValidationError("document '" + doc.id + "': " + what);
}

int CheckSpan(const Document &doc, const Span &span, int total, const char *what) {
  if (span.start < 0 || span.start > span.end || span.end >= total) {
    Fail(doc, std::string("invalid ") + what + " span " + ToString(span));
  }
  int s = doc.sentence_of(span.start);
  if (s != doc.sentence_of(span.end)) {
    Fail(doc, std::string(what) + " span " + ToString(span) + " crosses a sentence boundary");
  }
  return s;
}

}  // namespace

void Validate(const Document &doc, const RoleInventory &roles) {
  for (size_t i = 0; i < doc.sentences.size(); ++i) {
    if (doc.sentences[i].empty()) Fail(doc, "sentence " + std::to_string(i) + " is empty");
  }
  const int total = doc.token_count();

  std::set<Span> seen;
  for (const auto &cluster : doc.clusters) {
    if (cluster.size() < 2) {
      Fail(doc, "cluster with fewer than two mentions" +
                    (cluster.empty() ? std::string() : " at " + ToString(cluster.front())));
    }
    for (const Span &span : cluster) {
      CheckSpan(doc, span, total, "mention");
      if (!seen.insert(span).second) Fail(doc, "mention " + ToString(span) + " repeated");
    }
  }

  for (const auto &frame : doc.frames) {
    int sentence = CheckSpan(doc, frame.predicate, total, "predicate");
    std::set<std::string> core_seen;
    for (size_t i = 0; i < frame.args.size(); ++i) {
      const Argument &arg = frame.args[i];
      if (!roles.contains(arg.role)) {
        Fail(doc, "unknown role '" + arg.role + "' on span " + ToString(arg.span));
      }
      if (CheckSpan(doc, arg.span, total, "argument") != sentence) {
        Fail(doc, "argument " + ToString(arg.span) + " outside the predicate's sentence");
      }
      if (arg.span.overlaps(frame.predicate)) {
        Fail(doc, "argument " + ToString(arg.span) + " overlaps predicate " +
                      ToString(frame.predicate));
      }
      for (size_t j = 0; j < i; ++j) {
        if (arg.span.overlaps(frame.args[j].span)) {
          Fail(doc, "arguments " + ToString(frame.args[j].span) + " and " +
                        ToString(arg.span) + " overlap");
        }
      }
      if (RoleInventory::IsCore(arg.role) && !core_seen.insert(arg.role).second) {
        Fail(doc, "core role " + arg.role + " repeated at " + ToString(arg.span));
      }
    }
  }
}

void Canonicalize(Document &doc) {
  for (auto &cluster : doc.clusters) std::sort(cluster.begin(), cluster.end());
  std::sort(doc.clusters.begin(), doc.clusters.end());
  for (auto &frame : doc.frames) {
    std::sort(frame.args.begin(), frame.args.end(),
              [](const Argument &a, const Argument &b) {
                return std::tie(a.span, a.role) < std::tie(b.span, b.role);
              });
  }
  std::sort(doc.frames.begin(), doc.frames.end(),
            [](const Frame &a, const Frame &b) { return a.predicate < b.predicate; });
}

// ---------------------------------------------------------------------------
// JSONL

namespace {

Span SpanFromJson(const json &j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() ||
      !j[1].is_number_integer()) {
    throw ParseError("span must be a two-element integer array, got " + j.dump());
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

json SpanToJson(const Span &s) { return json::array({s.start, s.end}); }

Document DocumentFromJson(const json &j) {
  Document doc;
  doc.id = j.at("id").get<std::string>();
  doc.sentences = j.at("sentences").get<std::vector<std::vector<std::string>>>();
  for (const auto &c : j.at("clusters")) {
    Cluster cluster;
    for (const auto &s : c) cluster.push_back(SpanFromJson(s));
    doc.clusters.push_back(std::move(cluster));
  }
  for (const auto &f : j.at("frames")) {
    Frame frame;
    frame.predicate = SpanFromJson(f.at("predicate"));
    for (const auto &a : f.at("args")) {
      frame.args.push_back({a.at("role").get<std::string>(), SpanFromJson(a.at("span"))});
    }
    doc.frames.push_back(std::move(frame));
  }
  return doc;
}

json DocumentToJson(const Document &doc) {
  json clusters = json::array();
  for (const auto &c : doc.clusters) {
    json cluster = json::array();
    for (const auto &s : c) cluster.push_back(SpanToJson(s));
    clusters.push_back(std::move(cluster));
  }
  json frames = json::array();
  for (const auto &f : doc.frames) {
    json args = json::array();
    for (const auto &a : f.args) args.push_back({{"role", a.role}, {"span", SpanToJson(a.span)}});
    frames.push_back({{"predicate", SpanToJson(f.predicate)}, {"args", std::move(args)}});
  }
  json j;
  j["id"] = doc.id;
  j["sentences"] = doc.sentences;
  j["clusters"] = std::move(clusters);
  j["frames"] = std::move(frames);
  return j;
}

}  // namespace

std::vector<Document> ParseJsonl(std::istream &in, const RoleInventory &roles) {
  std::vector<Document> docs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Document doc;
    try {
      doc = DocumentFromJson(json::parse(line));
    } catch (const json::exception &e) {
      throw ParseError(e.what(), lineno);
    } catch (const ParseError &e) {
      throw ParseError(e.what(), lineno);
    }
    Validate(doc, roles);
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> ParseJsonlString(const std::string &text, const RoleInventory &roles) {
  std::istringstream in(text);
  return ParseJsonl(in, roles);
}

void SerializeJsonl(const std::vector<Document> &docs, std::ostream &out) {
  for (const auto &doc : docs) out << DocumentToJson(doc).dump() << '\n';
}

std::string SerializeJsonlString(const std::vector<Document> &docs) {
  std::ostringstream out;
  SerializeJsonl(docs, out);
  return out.str();
}

// ---------------------------------------------------------------------------
// Column format

namespace {

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, '\t')) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    out.push_back(field);
  }
  return out;
}

struct Row {
  std::vector<std::string> cols;
  int line;
};

class ColumnReader {
 public:
  explicit ColumnReader(const RoleInventory &roles) : roles_(roles) {}

  void Begin(const std::string &id, int line) {
    if (open_) throw ParseError("nested #begin document", line);
    open_ = true;
    doc_ = Document{};
    doc_.id = id;
    open_mentions_.clear();
    clusters_.clear();
    rows_.clear();
  }

  void AddRow(std::vector<std::string> cols, int line) {
    if (!open_) throw ParseError("token row outside a document", line);
    if (cols.size() < 3) throw ParseError("expected at least 3 columns", line);
    rows_.push_back({std::move(cols), line});
  }

  void EndSentence() {
    if (rows_.empty()) return;
    const int offset = doc_.token_count();
    const size_t ncols = rows_.front().cols.size();
    std::vector<int> predicates;
    std::vector<std::string> words;
    for (size_t i = 0; i < rows_.size(); ++i) {
      const Row &row = rows_[i];
      if (row.cols.size() != ncols) throw ParseError("inconsistent column count", row.line);
      words.push_back(row.cols[0]);
      if (row.cols[1] != "-") predicates.push_back(static_cast<int>(i));
    }
    if (ncols != predicates.size() + 3) {
      throw ParseError("expected " + std::to_string(predicates.size()) +
                           " role columns for this sentence",
                       rows_.front().line);
    }
    for (size_t p = 0; p < predicates.size(); ++p) {
      doc_.frames.push_back(ReadFrame(offset, predicates[p], 2 + p));
    }
    for (size_t i = 0; i < rows_.size(); ++i) {
      ReadCoref(rows_[i].cols.back(), offset + static_cast<int>(i), rows_[i].line);
    }
    doc_.sentences.push_back(std::move(words));
    rows_.clear();
  }

  Document End(int line) {
    if (!open_) throw ParseError("#end document without #begin", line);
    EndSentence();
    for (const auto &[id, starts] : open_mentions_) {
      if (!starts.empty()) {
        throw ParseError("unbalanced coreference bracket '(" + id + "' opened at token " +
                             std::to_string(starts.back()),
                         line);
      }
    }
    for (auto &[id, cluster] : clusters_) doc_.clusters.push_back(cluster);
    Canonicalize(doc_);
    open_ = false;
    Validate(doc_, roles_);
    return std::move(doc_);
  }

  bool open() const { return open_; }

 private:
  Frame ReadFrame(int offset, int predicate_row, size_t col) {
    Frame frame;
    frame.predicate = {offset + predicate_row, offset + predicate_row};
    std::string current;
    int start = -1;
    auto close = [&](int end) {
      if (start >= 0 && current != "V") {
        frame.args.push_back({current, {offset + start, offset + end}});
      }
      start = -1;
      current.clear();
    };
    for (size_t i = 0; i < rows_.size(); ++i) {
      const std::string &tag = rows_[i].cols[col];
      const int line = rows_[i].line;
      if (tag == "O" || tag == "-" || tag == "*") {
        close(static_cast<int>(i) - 1);
      } else if (tag.size() > 2 && tag.compare(0, 2, "B-") == 0) {
        close(static_cast<int>(i) - 1);
        current = tag.substr(2);
        start = static_cast<int>(i);
        if (current != "V" && !roles_.contains(current)) {
          throw ParseError("unknown role label '" + current + "'", line);
        }
      } else if (tag.size() > 2 && tag.compare(0, 2, "I-") == 0) {
        if (start < 0 || current != tag.substr(2)) {
          throw ParseError("tag " + tag + " at token " + std::to_string(offset + i) +
                               " without preceding B-/I-" + tag.substr(2),
                           line);
        }
      } else {
        throw ParseError("malformed BIO tag '" + tag + "'", line);
      }
    }
    close(static_cast<int>(rows_.size()) - 1);
    return frame;
  }

  void ReadCoref(const std::string &field, int token, int line) {
    if (field == "-" || field.empty()) return;
    std::istringstream parts(field);
    std::string part;
    while (std::getline(parts, part, '|')) {
      bool opens = !part.empty() && part.front() == '(';
      bool closes = !part.empty() && part.back() == ')';
      std::string id = part.substr(opens ? 1 : 0);
      if (closes && !id.empty()) id.pop_back();
      if (id.empty() || (!opens && !closes)) {
        throw ParseError("malformed coreference field '" + field + "'", line);
      }
      if (opens && closes) {
        clusters_[id].push_back({token, token});
      } else if (opens) {
        open_mentions_[id].push_back(token);
      } else {
        auto &starts = open_mentions_[id];
        if (starts.empty()) {
          throw ParseError("unbalanced coreference bracket '" + part + "' at token " +
                               std::to_string(token),
                           line);
        }
        clusters_[id].push_back({starts.back(), token});
        starts.pop_back();
      }
    }
  }

  const RoleInventory &roles_;
  bool open_ = false;
  Document doc_;
  std::vector<Row> rows_;
  std::map<std::string, std::vector<int>> open_mentions_;
  std::map<std::string, Cluster> clusters_;
};

}  // namespace

std::vector<Document> ParseConllColumns(std::istream &in, const RoleInventory &roles) {
  std::vector<Document> docs;
  ColumnReader reader(roles);
  std::string line;
  int lineno = 0;
  static const std::string kBegin = "#begin document";
  static const std::string kEnd = "#end document";
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.compare(0, kBegin.size(), kBegin) == 0) {
      std::string id = line.substr(kBegin.size());
      id.erase(0, id.find_first_not_of(" \t"));
      reader.Begin(id, lineno);
    } else if (line.compare(0, kEnd.size(), kEnd) == 0) {
      docs.push_back(reader.End(lineno));
    } else if (line.find_first_not_of(" \t") == std::string::npos) {
      if (reader.open()) reader.EndSentence();
    } else if (line[0] == '#') {
      continue;
    } else {
      reader.AddRow(SplitTabs(line), lineno);
    }
  }
  if (reader.open()) throw ParseError("missing #end document", lineno);
  return docs;
}

std::vector<Document> ParseConllColumnsString(const std::string &text,
                                              const RoleInventory &roles) {
  std::istringstream in(text);
  return ParseConllColumns(in, roles);
}

void SerializeConllColumns(const std::vector<Document> &docs, std::ostream &out) {
  for (const Document &doc : docs) {
    out << "#begin document " << doc.id << '\n';
    const int total = doc.token_count();
    // Coreference fields per token.
    std::vector<std::string> coref(total);
    auto append = [&](int token, const std::string &part) {
      if (!coref[token].empty()) coref[token] += '|';
      coref[token] += part;
    };
    for (size_t c = 0; c < doc.clusters.size(); ++c) {
      const std::string id = std::to_string(c);
      for (const Span &s : doc.clusters[c]) {
        if (s.start == s.end) {
          append(s.start, "(" + id + ")");
        } else {
          append(s.start, "(" + id);
          append(s.end, id + ")");
        }
      }
    }
    const auto spans = doc.sentence_spans();
    for (size_t si = 0; si < spans.size(); ++si) {
      const Span sent = spans[si];
      std::vector<const Frame *> frames;
      for (const Frame &f : doc.frames) {
        if (sent.contains(f.predicate.start)) frames.push_back(&f);
      }
      std::sort(frames.begin(), frames.end(), [](const Frame *a, const Frame *b) {
        return a->predicate < b->predicate;
      });
      for (int t = sent.start; t <= sent.end; ++t) {
        const std::string &word = doc.sentences[si][t - sent.start];
        bool is_pred = false;
        for (const Frame *f : frames) is_pred |= f->predicate.start == t;
        out << word << '\t' << (is_pred ? word : "-");
        for (const Frame *f : frames) {
          std::string tag = "O";
          if (f->predicate.contains(t)) {
            tag = t == f->predicate.start ? "B-V" : "I-V";
          }
          for (const Argument &a : f->args) {
            if (a.span.contains(t)) tag = (t == a.span.start ? "B-" : "I-") + a.role;
          }
          out << '\t' << tag;
        }
        out << '\t' << (coref[t].empty() ? "-" : coref[t]) << '\n';
      }
      out << '\n';
    }
    out << "#end document\n";
  }
}

std::string SerializeConllColumnsString(const std::vector<Document> &docs) {
  std::ostringstream out;
  SerializeConllColumns(docs, out);
  return out.str();
}

// ---------------------------------------------------------------------------
// Synthetic corpus

SynthConfig SynthConfig::Default() {
  SynthConfig c;
  c.names = {"Nadine", "Omar",  "Priya", "Lukas", "Mei",   "Tomas", "Aisha",
             "Jonas",  "Elena", "Kofi",  "Sara",  "Diego", "Yuki",  "Pavel"};
  c.nouns = {"tea",    "book",  "bicycle", "garden", "letter", "violin", "painting",
             "coffee", "piano", "camera",  "recipe", "kite",   "lamp",   "puzzle"};
  c.verbs = {"likes",  "drinks", "reads",  "repairs", "paints", "cleans",
             "plays",  "sells",  "buys",   "carries", "studies", "finds"};
  c.person_pronouns = {"She", "He"};
  c.thing_pronouns = {"it"};
  c.adverbials = {{"every day", "ARGM-TMP"},     {"in the morning", "ARGM-TMP"},
                  {"at night", "ARGM-TMP"},      {"in the kitchen", "ARGM-LOC"},
                  {"at home", "ARGM-LOC"},       {"with great care", "ARGM-MNR"},
                  {"very slowly", "ARGM-MNR"},   {"on weekends", "ARGM-TMP"}};
  return c;
}

namespace {

template <typename T>
const T &Pick(Rng &rng, const std::vector<T> &items) {
  return items[UniformInt(rng, 0, static_cast<int>(items.size()) - 1)];
}

std::vector<std::string> SplitWords(const std::string &text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

}  // namespace

std::vector<Document> SynthesizeCorpus(const SynthConfig &config, uint64_t seed) {
  auto require = [](bool ok, const char *what) {
    if (!ok) throw ConfigError(std::string("synth config: empty ") + what + " list");
  };
  require(!config.names.empty(), "names");
  require(!config.nouns.empty(), "nouns");
  require(!config.verbs.empty(), "verbs");
  require(!config.person_pronouns.empty(), "person_pronouns");
  require(!config.thing_pronouns.empty(), "thing_pronouns");
  require(!config.adverbials.empty(), "adverbials");
  if (config.min_sentences < 1 || config.max_sentences < config.min_sentences) {
    throw ConfigError("synth config: invalid sentence range");
  }
  if (config.count < 0) throw ConfigError("synth config: negative count");
  for (const Adverbial &a : config.adverbials) {
    if (SplitWords(a.text).empty()) throw ConfigError("synth config: empty adverbial");
    RoleInventory::Default().index(a.role);
  }

  Rng rng = MakeRng(seed, 0x5e17);
  std::vector<Document> docs;
  for (int d = 0; d < config.count; ++d) {
    Document doc;
    doc.id = "synth-" + std::to_string(seed) + "-" + std::to_string(d);
    const int name_index = UniformInt(rng, 0, static_cast<int>(config.names.size()) - 1);
    const std::string &name = config.names[name_index];
    const std::string &pronoun =
        config.person_pronouns[name_index % config.person_pronouns.size()];
    const std::string &thing = Pick(rng, config.nouns);
    const int nsent = UniformInt(rng, config.min_sentences, config.max_sentences);

    Cluster person, object;
    int offset = 0;
    for (int s = 0; s < nsent; ++s) {
      std::vector<std::string> words;
      Frame frame;
      // Subject.
      if (s == 0 || !Bernoulli(rng, config.pronoun_subject_prob)) {
        words.push_back(name);
      } else {
        words.push_back(pronoun);
      }
      Span subject{offset, offset};
      person.push_back(subject);
      // Verb.
      words.push_back(Pick(rng, config.verbs));
      frame.predicate = {offset + 1, offset + 1};
      // Object.
      Span obj;
      if (s == 0) {
        words.push_back("the");
        words.push_back(thing);
        obj = {offset + 2, offset + 3};
        object.push_back(obj);
      } else if (Bernoulli(rng, config.pronoun_object_prob)) {
        words.push_back(Pick(rng, config.thing_pronouns));
        obj = {offset + 2, offset + 2};
        object.push_back(obj);
      } else {
        std::string other = Pick(rng, config.nouns);
        while (config.nouns.size() > 1 && other == thing) other = Pick(rng, config.nouns);
        words.push_back("the");
        words.push_back(other);
        obj = {offset + 2, offset + 3};
      }
      // Adverbial.
      const Adverbial &adv = Pick(rng, config.adverbials);
      const auto adv_words = SplitWords(adv.text);
      const int adv_start = offset + static_cast<int>(words.size());
      words.insert(words.end(), adv_words.begin(), adv_words.end());
      const Span adv_span{adv_start, adv_start + static_cast<int>(adv_words.size()) - 1};
      words.push_back(".");

      frame.args = {{"ARG0", subject}, {"ARG1", obj}, {adv.role, adv_span}};
      doc.frames.push_back(std::move(frame));
      offset += static_cast<int>(words.size());
      doc.sentences.push_back(std::move(words));
    }
    if (person.size() >= 2) doc.clusters.push_back(person);
    if (object.size() >= 2) doc.clusters.push_back(object);
    Canonicalize(doc);
    Validate(doc);
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace ssgc
