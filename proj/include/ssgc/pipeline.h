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

#ifndef SSGC_PIPELINE_H_
#define SSGC_PIPELINE_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ssgc/coherence.h"
#include "ssgc/corpus.h"
#include "ssgc/encoder.h"
#include "ssgc/metrics.h"
#include "ssgc/optim.h"
#include "ssgc/rl.h"
#include "ssgc/taggers.h"

namespace ssgc {

// How one synthetic corpus is cut into the four roles. Slices are taken in
// this order from a single corpus.
struct CorpusSplit {
  int train = 40;
  int dev = 40;
  int coherence = 100;
  int unlabeled = 80;
  int total() const { return train + dev + coherence + unlabeled; }
};

struct PipelineConfig {
  SynthConfig synth = SynthConfig::Default();
  uint64_t corpus_seed = 7;
  CorpusSplit split;
  EncoderConfig coherence_encoder;
  CoherenceConfig coherence;
  TaggerConfig taggers;
  // Short on purpose: the fine-tuned task starts from an under-trained model.
  TrainSchedule schedule;
  // The other task, which supplies the frozen half of every graph.
  TrainSchedule counterpart_schedule;
  FinetuneConfig finetune;

  static PipelineConfig Default();
};

void ValidatePipelineConfig(const PipelineConfig &cfg);

struct PipelineData {
  std::vector<Document> train, dev, coherence, unlabeled;
};

// Unlabeled documents keep only tokens and predicates.
PipelineData MakePipelineData(const PipelineConfig &cfg);

struct PipelineSummary {
  TaggerTask task = TaggerTask::kCoref;
  double baseline_metric = 0.0;
  double finetuned_metric = 0.0;
  FinetuneResult finetune;
};

// Event name plus a JSON payload, for run logs.
using PipelineLogger = std::function<void(const std::string &, const std::string &)>;

// Trains the counterpart task fully, the fine-tuned task briefly, then
// fine-tunes it against `coherence`.
PipelineSummary RunTaggerStages(const PipelineConfig &cfg, const PipelineData &data,
                                const CoherenceModel &coherence, uint64_t seed,
                                const PipelineLogger &log = {});

CoherenceModel TrainPipelineCoherence(const PipelineConfig &cfg,
                                      const std::vector<Document> &docs, uint64_t seed);

// Synth, supervised training, coherence training, fine-tuning, evaluation.
PipelineSummary RunPipeline(const PipelineConfig &cfg, uint64_t seed,
                            const PipelineLogger &log = {});

}  // namespace ssgc

#endif  // SSGC_PIPELINE_H_
