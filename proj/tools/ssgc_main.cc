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


// Command-line driver for corpus handling, training, fine-tuning and scoring.

#include <malloc.h>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ssgc/coherence.h"
#include "ssgc/config.h"
#include "ssgc/corpus.h"
#include "ssgc/error.h"
#include "ssgc/metrics.h"
#include "ssgc/perturb.h"
#include "ssgc/pipeline.h"
#include "ssgc/rl.h"
#include "ssgc/ssg.h"
#include "ssgc/taggers.h"

namespace ssgc {
namespace {

struct Paths {
  std::string corpus, dev, unlabeled, coherence_corpus, checkpoints, outputs;
};

struct RunConfig {
  std::optional<uint64_t> seed;
  int threads = 1;
  Paths paths;
  PipelineConfig pipeline = PipelineConfig::Default();
};

void Log(const std::string &event, Json payload = Json::object()) {
  payload["event"] = event;
  std::cerr << payload.dump() << '\n';
}

RunConfig LoadRunConfig(const std::string &path) {
  RunConfig rc;
  if (path.empty()) return rc;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception &e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config " + path + ": expected an object");
  if (j.contains("seed")) {
    uint64_t s = 0;
    ReadKey(j, "seed", &s);
    rc.seed = s;
    j.erase("seed");
  }
  if (j.contains("threads")) {
    ReadKey(j, "threads", &rc.threads);
    j.erase("threads");
  }
  if (j.contains("paths")) {
    const Json &p = j.at("paths");
    CheckKeys(p, {"corpus", "dev", "unlabeled", "coherence_corpus", "checkpoints", "outputs"},
              "paths");
    ReadKey(p, "corpus", &rc.paths.corpus);
    ReadKey(p, "dev", &rc.paths.dev);
    ReadKey(p, "unlabeled", &rc.paths.unlabeled);
    ReadKey(p, "coherence_corpus", &rc.paths.coherence_corpus);
    ReadKey(p, "checkpoints", &rc.paths.checkpoints);
    ReadKey(p, "outputs", &rc.paths.outputs);
    j.erase("paths");
  }
  FromJson(j, &rc.pipeline);
  return rc;
}

std::vector<Document> ReadCorpus(const std::string &path) {
  if (path.empty()) throw ConfigError("missing corpus path");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return ParseJsonl(in);
}

// Writes to `path`, or standard output when it is empty or "-".
void WriteOutput(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

std::string ReadInput(const std::string &path) {
  std::stringstream ss;
  if (path.empty() || path == "-") {
    ss << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    ss << in.rdbuf();
  }
  return ss.str();
}

Json PrfJson(const PRF &p) { return {{"p", p.precision}, {"r", p.recall}, {"f1", p.f1}}; }

Json CorefJson(const CorefScores &s) {
  return {{"muc", PrfJson(s.muc)},
          {"b3", PrfJson(s.b_cubed)},
          {"ceaf_e", PrfJson(s.ceaf_e)},
          {"avg_f1", s.avg_f1}};
}

// Orders `pred` like `gold` by document id.
std::vector<Document> AlignById(const std::vector<Document> &gold,
                                const std::vector<Document> &pred) {
  std::map<std::string, const Document *> by_id;
  for (const Document &d : pred) by_id[d.id] = &d;
  std::vector<Document> out;
  for (const Document &g : gold) {
    auto it = by_id.find(g.id);
    if (it == by_id.end()) throw ValidationError("no prediction for document " + g.id);
    if (it->second->token_count() != g.token_count())
      throw ValidationError("token mismatch for document " + g.id);
    out.push_back(*it->second);
  }
  return out;
}

std::string SixDecimals(double x) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << x;
  return os.str();
}

class Cli {
 public:
  int Run(int argc, char **argv);

 private:
  uint64_t RequireSeed(const char *command) {
    if (seed_ >= 0) return static_cast<uint64_t>(seed_);
    if (rc_.seed) return *rc_.seed;
    throw ConfigError(std::string(command) + " needs a seed (--seed or config \"seed\")");
  }
  void Prepare(const char *command, bool randomized) {
    rc_ = LoadRunConfig(config_path_);
    if (threads_ > 0) rc_.threads = threads_;
    if (rc_.threads < 1) throw ConfigError("threads must be >= 1");
    rc_.pipeline.coherence.threads = rc_.threads;
    Json start = {{"command", command}, {"threads", rc_.threads}};
    if (randomized) start["seed"] = RequireSeed(command);
    Log("start", start);
  }
  static std::string Or(const std::string &flag, const std::string &fallback) {
    return flag.empty() ? fallback : flag;
  }

  void Ingest();
  void Synth();
  void BuildSsgCmd();
  void Perturb();
  void TrainCoherenceCmd();
  void TrainSupervisedCmd();
  void FinetuneCmd();
  void Evaluate();
  void Score();
  void Pipeline();

  std::string config_path_;
  long long seed_ = -1;
  int threads_ = 0;
  RunConfig rc_;

  // Flag values; empty means "take it from the config".
  std::string input_, format_ = "conll", out_, corpus_, dev_, unlabeled_, coherence_, ckpt_,
      pred_, gold_, report_, trace_, sidecar_, task_, type_, doc_, emit_csv_;
  int count_ = -1;
  double decay_ = -1.0;
  double heldout_ = 0.2;
};

void Cli::Ingest() {
  Prepare("ingest", false);
  const std::string text = ReadInput(input_);
  std::vector<Document> docs =
      format_ == "jsonl" ? ParseJsonlString(text) : ParseConllColumnsString(text);
  for (Document &d : docs) {
    Canonicalize(d);
    Validate(d);
  }
  WriteOutput(out_, SerializeJsonlString(docs));
  Log("done", {{"documents", docs.size()}});
}

void Cli::Synth() {
  Prepare("synth", true);
  SynthConfig sc = rc_.pipeline.synth;
  if (count_ >= 0) sc.count = count_;
  const auto docs = SynthesizeCorpus(sc, RequireSeed("synth"));
  WriteOutput(out_, SerializeJsonlString(docs));
  Log("done", {{"documents", docs.size()}});
}

void Cli::BuildSsgCmd() {
  Prepare("build-ssg", false);
  std::string text;
  for (const Document &d : ReadCorpus(Or(corpus_, rc_.paths.corpus))) {
    Ssg g = BuildSsg(d);
    ValidateStructure(g);
    text += SerializeSsg(g) + "\n";
  }
  WriteOutput(out_, text);
}

void Cli::Perturb() {
  Prepare("perturb", true);
  if (type_.empty()) throw ConfigError("perturb needs --type");
  const PerturbationType type = ParsePerturbationType(type_);
  const PerturbationConfig &pc = rc_.pipeline.coherence.perturb;
  const double decay = decay_ >= 0.0 ? decay_ : pc.decay_start;
  if (decay > 1.0) throw ConfigError("decay must lie in [0, 1]");
  Ssg g = ParseSsg(ReadInput(input_));
  ValidateStructure(g);
  Rng rng = MakeRng(RequireSeed("perturb"));
  PerturbationResult r = ApplyPerturbation(g, type, decay, rng, pc);
  const Json side = {{"type", PerturbationName(type)}, {"changed", r.changed}, {"edits", r.edits}};
  const std::string graph = SerializeSsg(r.graph) + "\n";
  if (sidecar_.empty() && (out_.empty() || out_ == "-")) {
    WriteOutput("", graph + side.dump() + "\n");
  } else {
    WriteOutput(out_, graph);
    WriteOutput(sidecar_.empty() ? out_ + ".sidecar.json" : sidecar_, side.dump() + "\n");
  }
  Log("done", {{"changed", r.changed}, {"edits", r.edits.size()}});
}

void Cli::TrainCoherenceCmd() {
  Prepare("train-coherence", true);
  const uint64_t seed = RequireSeed("train-coherence");
  const std::string out = Or(out_, rc_.paths.checkpoints.empty()
                                       ? ""
                                       : rc_.paths.checkpoints + "/coherence.ckpt");
  if (out.empty()) throw ConfigError("train-coherence needs --out");
  std::vector<Document> train, held;
  for (Document &d : ReadCorpus(Or(corpus_, rc_.paths.coherence_corpus.empty()
                                                ? rc_.paths.corpus
                                                : rc_.paths.coherence_corpus))) {
    (heldout_ > 0.0 && IsHeldOut(d.id, heldout_) ? held : train).push_back(std::move(d));
  }
  if (train.empty()) throw ValidationError("no training documents after the held-out split");
  Log("split", {{"train", train.size()}, {"held_out", held.size()}});
  CoherenceModel model = TrainPipelineCoherence(rc_.pipeline, train, seed);
  model.Save(out);
  Json report = Json::object();
  if (!held.empty()) {
    CoherenceEvaluation ev = EvaluateCoherence(model, held, SplitSeed(seed, 99));
    for (const auto &[t, acc] : ev.accuracy) report[PerturbationName(t)] = acc;
    Log("evaluated", {{"mean_gold_score", ev.mean_gold_score},
                      {"mean_perturbed_score", ev.mean_perturbed_score},
                      {"paired_win_rate", ev.paired_win_rate}});
  }
  WriteOutput(report_, report.dump(2) + "\n");
  Log("done", {{"checkpoint", out}});
}

void Cli::TrainSupervisedCmd() {
  Prepare("train-supervised", true);
  const uint64_t seed = RequireSeed("train-supervised");
  const TaggerTask task = ParseTaggerTask(task_.empty() ? "multi" : task_);
  const std::string ckpt = Or(ckpt_, rc_.paths.checkpoints.empty()
                                         ? ""
                                         : rc_.paths.checkpoints + "/taggers.ckpt");
  if (ckpt.empty()) throw ConfigError("train-supervised needs --ckpt");
  const auto train = ReadCorpus(Or(corpus_, rc_.paths.corpus));
  const auto dev = ReadCorpus(Or(dev_, rc_.paths.dev));
  Taggers taggers(rc_.pipeline.taggers, Vocabulary::Build(train));
  ParamStore store;
  Rng rng = MakeRng(seed, 5);
  taggers.InitParams(store, rng);
  auto h = TrainSupervised(taggers, store, train, dev, task, rc_.pipeline.schedule, seed);
  for (size_t e = 0; e < h.dev_metric.size(); ++e)
    Log("epoch", {{"epoch", e}, {"train_loss", h.train_loss[e]}, {"dev_metric", h.dev_metric[e]}});
  taggers.Save(ckpt, store);
  if (!pred_.empty()) {
    std::vector<Document> out;
    for (const Document &d : dev) out.push_back(taggers.Predict(store, StripAnnotations(d)));
    WriteOutput(pred_, SerializeJsonlString(out));
  }
  Log("done", {{"checkpoint", ckpt}, {"best_epoch", h.best_epoch}, {"dev_metric", h.best_metric}});
}

void Cli::FinetuneCmd() {
  Prepare("finetune", true);
  const uint64_t seed = RequireSeed("finetune");
  FinetuneConfig fc = rc_.pipeline.finetune;
  if (!task_.empty()) fc.task = ParseTaggerTask(task_);
  ValidateFinetuneConfig(fc);
  if (ckpt_.empty()) throw ConfigError("finetune needs --ckpt (the supervised taggers)");
  if (coherence_.empty()) throw ConfigError("finetune needs --coherence");
  auto [taggers, store] = Taggers::Load(ckpt_);
  CoherenceModel coherence = CoherenceModel::Load(coherence_);
  const auto unlabeled = ReadCorpus(Or(unlabeled_, rc_.paths.unlabeled));
  std::vector<Document> stripped;
  for (const Document &d : unlabeled) stripped.push_back(StripAnnotations(d));
  const auto dev = ReadCorpus(Or(dev_, rc_.paths.dev));
  FinetuneResult r = Finetune(taggers, store, stripped, dev, coherence, fc, seed);
  std::ostringstream csv;
  WriteTraceCsv(r, csv);
  WriteOutput(trace_, csv.str());
  if (!out_.empty()) taggers.Save(out_, store);
  Log("done", {{"task", TaggerTaskName(fc.task)},
               {"baseline_metric", r.baseline_metric},
               {"best_metric", r.best_metric}});
}

void Cli::Evaluate() {
  Prepare("evaluate", false);
  const TaggerTask task = ParseTaggerTask(task_.empty() ? "coref" : task_);
  if (task == TaggerTask::kMulti) throw ConfigError("evaluate takes --task coref or srl");
  const auto gold = ReadCorpus(gold_);
  const auto pred = AlignById(gold, ReadCorpus(pred_));
  Json result;
  std::ostringstream csv;
  if (task == TaggerTask::kCoref) {
    result = CorefJson(CorpusCorefScores(gold, pred));
    csv << "doc_id,muc_f1,b3_f1,ceaf_e_f1,avg_f1\n";
    for (size_t i = 0; i < gold.size(); ++i) {
      const CorefScores s = ScoresFromCounts(CountCoref(gold[i].clusters, pred[i].clusters));
      csv << gold[i].id << ',' << SixDecimals(s.muc.f1) << ',' << SixDecimals(s.b_cubed.f1) << ','
          << SixDecimals(s.ceaf_e.f1) << ',' << SixDecimals(s.avg_f1) << '\n';
    }
  } else {
    const SrlCounts c = CorpusSrlCounts(gold, pred);
    result = {{"token_f1", PrfJson(c.token_f1())}, {"span_f1", PrfJson(c.span_f1())}};
    csv << "doc_id,token_p,token_r,token_f1,span_f1\n";
    for (size_t i = 0; i < gold.size(); ++i) {
      const SrlCounts d = CountSrl(gold[i].frames, pred[i].frames, gold[i]);
      const PRF t = d.token_f1();
      csv << gold[i].id << ',' << SixDecimals(t.precision) << ',' << SixDecimals(t.recall) << ','
          << SixDecimals(t.f1) << ',' << SixDecimals(d.span_f1().f1) << '\n';
    }
  }
  if (!emit_csv_.empty()) WriteOutput(emit_csv_, csv.str());
  WriteOutput(out_, result.dump(2) + "\n");
}

void Cli::Score() {
  Prepare("score", false);
  if (coherence_.empty()) throw ConfigError("score needs --coherence");
  CoherenceModel model = CoherenceModel::Load(coherence_);
  std::string text;
  int matched = 0;
  for (const Document &d : ReadCorpus(Or(corpus_, rc_.paths.corpus))) {
    if (!doc_.empty() && d.id != doc_) continue;
    ++matched;
    const double s = model.Score(BuildSsg(d), d);
    text += doc_.empty() ? d.id + "\t" + SixDecimals(s) + "\n" : SixDecimals(s) + "\n";
  }
  if (!doc_.empty() && matched == 0) throw ValidationError("no document with id " + doc_);
  WriteOutput(out_, text);
}

void Cli::Pipeline() {
  Prepare("pipeline", true);
  const uint64_t seed = RequireSeed("pipeline");
  PipelineConfig cfg = rc_.pipeline;
  if (!task_.empty()) cfg.finetune.task = ParseTaggerTask(task_);
  const PipelineSummary s =
      RunPipeline(cfg, seed, [](const std::string &event, const std::string &payload) {
        Log(event, Json::parse(payload));
      });
  int accepted = 0;
  for (const auto &row : s.finetune.trace) accepted += row.accepted;
  const std::string metric = s.task == TaggerTask::kCoref ? "avg_f1" : "token_f1";
  const Json summary = {{"task", TaggerTaskName(s.task)},
                        {"seed", seed},
                        {"baseline_" + metric, s.baseline_metric},
                        {"finetuned_" + metric, s.finetuned_metric},
                        {"batches", s.finetune.trace.size()},
                        {"accepted_batches", accepted}};
  std::string out = out_;
  if (out.empty() && !rc_.paths.outputs.empty()) out = rc_.paths.outputs + "/summary.json";
  WriteOutput(out, summary.dump(2) + "\n");
  if (!trace_.empty()) {
    std::ostringstream csv;
    WriteTraceCsv(s.finetune, csv);
    WriteOutput(trace_, csv.str());
  }
  if (s.finetuned_metric < s.baseline_metric)
    throw ValidationError("fine-tuned metric fell below the baseline");
}

int Cli::Run(int argc, char **argv) {
  CLI::App app{"Shallow semantic graph coherence: taggers, coherence classifiers, fine-tuning"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", config_path_, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed_, "Random seed (overrides the config)")->check(CLI::NonNegativeNumber);
  app.add_option("--threads", threads_, "Worker cap; 1 is bit-deterministic")->check(CLI::PositiveNumber);

  auto *ingest = app.add_subcommand("ingest", "CoNLL columns or JSONL to canonical JSONL");
  ingest->add_option("--input", input_, "Input file (default stdin)");
  ingest->add_option("--format", format_)->check(CLI::IsMember({"conll", "jsonl"}));
  ingest->add_option("--out", out_);

  auto *synth = app.add_subcommand("synth", "Generate a synthetic annotated corpus");
  synth->add_option("--count", count_);
  synth->add_option("--out", out_);

  auto *build = app.add_subcommand("build-ssg", "One graph JSON per document line");
  build->add_option("--corpus", corpus_);
  build->add_option("--out", out_);

  auto *perturb = app.add_subcommand("perturb", "Apply one perturbation to a graph");
  perturb->add_option("--type", type_)->required();
  perturb->add_option("--decay", decay_);
  perturb->add_option("--input", input_, "Graph JSON (default stdin)");
  perturb->add_option("--out", out_);
  perturb->add_option("--sidecar", sidecar_);

  auto *coh = app.add_subcommand("train-coherence", "Train the per-type coherence classifiers");
  coh->add_option("--corpus", corpus_);
  coh->add_option("--out", out_);
  coh->add_option("--report", report_, "Held-out accuracy JSON (default stdout)");
  coh->add_option("--heldout", heldout_)->check(CLI::Range(0.0, 0.9));

  auto *sup = app.add_subcommand("train-supervised", "Supervised coref and/or SRL training");
  sup->add_option("--task", task_)->check(CLI::IsMember({"coref", "srl", "multi"}));
  sup->add_option("--corpus", corpus_);
  sup->add_option("--dev", dev_);
  sup->add_option("--ckpt", ckpt_);
  sup->add_option("--pred", pred_, "Write dev predictions as JSONL");

  auto *ft = app.add_subcommand("finetune", "Policy-gradient fine-tuning with hill climbing");
  ft->add_option("--task", task_)->check(CLI::IsMember({"coref", "srl"}));
  ft->add_option("--unlabeled", unlabeled_);
  ft->add_option("--dev", dev_);
  ft->add_option("--coherence", coherence_);
  ft->add_option("--ckpt", ckpt_, "Supervised taggers checkpoint");
  ft->add_option("--out", out_, "Fine-tuned checkpoint");
  ft->add_option("--trace", trace_, "CSV trace (default stdout)");

  auto *ev = app.add_subcommand("evaluate", "Coreference or SRL metrics");
  ev->add_option("--task", task_)->check(CLI::IsMember({"coref", "srl"}));
  ev->add_option("--gold", gold_)->required();
  ev->add_option("--pred", pred_)->required();
  ev->add_option("--emit-csv", emit_csv_, "Per-document rows");
  ev->add_option("--out", out_);

  auto *score = app.add_subcommand("score", "Coherence score of each document's gold graph");
  score->add_option("--coherence", coherence_)->required();
  score->add_option("--corpus", corpus_);
  score->add_option("--doc", doc_, "Only this document; prints the bare score");
  score->add_option("--out", out_);

  auto *pipe = app.add_subcommand("pipeline", "Synth, train, fine-tune, evaluate");
  pipe->add_option("--task", task_)->check(CLI::IsMember({"coref", "srl"}));
  pipe->add_option("--out", out_, "Summary JSON (default stdout)");
  pipe->add_option("--trace", trace_);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }

  try {
    if (*ingest) Ingest();
    if (*synth) Synth();
    if (*build) BuildSsgCmd();
    if (*perturb) Perturb();
    if (*coh) TrainCoherenceCmd();
    if (*sup) TrainSupervisedCmd();
    if (*ft) FinetuneCmd();
    if (*ev) Evaluate();
    if (*score) Score();
    if (*pipe) Pipeline();
  } catch (const std::exception &e) {
    Log("error", {{"message", e.what()}});
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace
}  // namespace ssgc

int main(int argc, char **argv) {
  // Keep freed training buffers mapped; trimming them dominates run time.
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  ssgc::Cli cli;
  return cli.Run(argc, argv);
}
