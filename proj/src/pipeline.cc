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

#include "ssgc/pipeline.h"

#include "json.hpp"
#include "ssgc/error.h"
#include "ssgc/rng.h"

namespace ssgc {

PipelineConfig PipelineConfig::Default() {
  PipelineConfig cfg;
  cfg.synth.count = cfg.split.total();
  cfg.coherence_encoder.token_dim = 32;
  cfg.coherence_encoder.context_hidden = 32;
  cfg.coherence.gcn.hidden = 64;
  cfg.taggers.encoder.token_dim = 32;
  cfg.taggers.encoder.context_hidden = 32;
  cfg.schedule.max_epochs = 5;
  cfg.counterpart_schedule.max_epochs = 10;
  return cfg;
}

void ValidatePipelineConfig(const PipelineConfig &cfg) {
  const CorpusSplit &s = cfg.split;
  if (s.train < 1 || s.dev < 1 || s.coherence < 1 || s.unlabeled < 1)
    throw ConfigError("pipeline split: every slice needs at least one document");
  if (cfg.synth.count < s.total())
    throw ConfigError("pipeline split needs " + std::to_string(s.total()) +
                      " documents but synth.count is " + std::to_string(cfg.synth.count));
  ValidateEncoderConfig(cfg.coherence_encoder);
  ValidateCoherenceConfig(cfg.coherence);
  ValidateSchedule(cfg.schedule);
  ValidateSchedule(cfg.counterpart_schedule);
  ValidateFinetuneConfig(cfg.finetune);
}

PipelineData MakePipelineData(const PipelineConfig &cfg) {
  ValidatePipelineConfig(cfg);
  std::vector<Document> all = SynthesizeCorpus(cfg.synth, cfg.corpus_seed);
  PipelineData d;
  auto it = all.begin();
  auto take = [&](int n, std::vector<Document> *out) {
    out->assign(it, it + n);
    it += n;
  };
  take(cfg.split.train, &d.train);
  take(cfg.split.dev, &d.dev);
  take(cfg.split.coherence, &d.coherence);
  take(cfg.split.unlabeled, &d.unlabeled);
  for (Document &doc : d.unlabeled) doc = StripAnnotations(doc);
  return d;
}

CoherenceModel TrainPipelineCoherence(const PipelineConfig &cfg,
                                      const std::vector<Document> &docs, uint64_t seed) {
  TokenEncoder enc("encoder", cfg.coherence_encoder, Vocabulary::Build(docs));
  ParamStore params;
  Rng rng = MakeRng(seed, 3);
  enc.InitParams(params, rng);
  return TrainCoherence(docs, enc, params, cfg.coherence, seed).model;
}

PipelineSummary RunTaggerStages(const PipelineConfig &cfg, const PipelineData &data,
                                const CoherenceModel &coherence, uint64_t seed,
                                const PipelineLogger &log) {
  ValidatePipelineConfig(cfg);
  const TaggerTask task = cfg.finetune.task;
  const TaggerTask other = task == TaggerTask::kCoref ? TaggerTask::kSrl : TaggerTask::kCoref;
  Taggers taggers(cfg.taggers, Vocabulary::Build(data.train));
  ParamStore store;
  Rng rng = MakeRng(seed, 5);
  taggers.InitParams(store, rng);
  auto h = TrainSupervised(taggers, store, data.train, data.dev, other, cfg.counterpart_schedule,
                           seed);
  if (log) {
    log("counterpart_trained", nlohmann::json{{"task", TaggerTaskName(other)},
                                              {"dev_metric", h.best_metric},
                                              {"epochs", h.dev_metric.size()}}
                                   .dump());
  }
  h = TrainSupervised(taggers, store, data.train, data.dev, task, cfg.schedule, seed);
  if (log) {
    log("baseline_trained", nlohmann::json{{"task", TaggerTaskName(task)},
                                           {"dev_metric", h.best_metric},
                                           {"epochs", h.dev_metric.size()}}
                                .dump());
  }
  PipelineSummary out;
  out.task = task;
  out.finetune = Finetune(taggers, store, data.unlabeled, data.dev, coherence, cfg.finetune, seed);
  out.baseline_metric = out.finetune.baseline_metric;
  out.finetuned_metric = DevMetric(taggers, store, data.dev, task);
  if (log) {
    int accepted = 0;
    for (const auto &row : out.finetune.trace) accepted += row.accepted;
    log("finetuned", nlohmann::json{{"baseline", out.baseline_metric},
                                    {"finetuned", out.finetuned_metric},
                                    {"batches", out.finetune.trace.size()},
                                    {"accepted", accepted}}
                         .dump());
  }
  return out;
}

PipelineSummary RunPipeline(const PipelineConfig &cfg, uint64_t seed, const PipelineLogger &log) {
  PipelineData data = MakePipelineData(cfg);
  if (log) {
    log("synthesized", nlohmann::json{{"corpus_seed", cfg.corpus_seed},
                                      {"train", data.train.size()},
                                      {"dev", data.dev.size()},
                                      {"coherence", data.coherence.size()},
                                      {"unlabeled", data.unlabeled.size()}}
                           .dump());
  }
  CoherenceModel coherence = TrainPipelineCoherence(cfg, data.coherence, seed);
  if (log) log("coherence_trained", nlohmann::json{{"classifiers", coherence.classifier_count()}}.dump());
  return RunTaggerStages(cfg, data, coherence, seed, log);
}

}  // namespace ssgc
