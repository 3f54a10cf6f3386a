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

#ifndef SSGC_CONFIG_H_
#define SSGC_CONFIG_H_

// JSON mapping for the module configs. Reading overlays the keys present onto
// the current values; unknown keys raise ConfigError.

#include "json.hpp"
#include "ssgc/coherence.h"
#include "ssgc/error.h"
#include "ssgc/encoder.h"
#include "ssgc/gcn.h"
#include "ssgc/optim.h"
#include "ssgc/perturb.h"
#include "ssgc/pipeline.h"
#include "ssgc/rl.h"
#include "ssgc/taggers.h"

namespace ssgc {

using Json = nlohmann::json;

Json ToJson(const EncoderConfig &c);
Json ToJson(const GcnConfig &c);
Json ToJson(const PerturbationConfig &c);
Json ToJson(const DgiOptions &c);
Json ToJson(const LogisticOptions &c);
Json ToJson(const CoherenceConfig &c);
Json ToJson(const TrainSchedule &c);
Json ToJson(const CorefConfig &c);
Json ToJson(const SrlConfig &c);
Json ToJson(const TaggerConfig &c);
Json ToJson(const FinetuneConfig &c);
Json ToJson(const SynthConfig &c);
Json ToJson(const CorpusSplit &c);
Json ToJson(const PipelineConfig &c);

void FromJson(const Json &j, EncoderConfig *c);
void FromJson(const Json &j, GcnConfig *c);
void FromJson(const Json &j, PerturbationConfig *c);
void FromJson(const Json &j, DgiOptions *c);
void FromJson(const Json &j, LogisticOptions *c);
void FromJson(const Json &j, CoherenceConfig *c);
void FromJson(const Json &j, TrainSchedule *c);
void FromJson(const Json &j, CorefConfig *c);
void FromJson(const Json &j, SrlConfig *c);
void FromJson(const Json &j, TaggerConfig *c);
void FromJson(const Json &j, FinetuneConfig *c);
// Scalar knobs only; the word lists keep their defaults unless given.
void FromJson(const Json &j, SynthConfig *c);
void FromJson(const Json &j, CorpusSplit *c);
// Keys absent from `j` keep the values already in `c`.
void FromJson(const Json &j, PipelineConfig *c);

// Throws ConfigError naming the first key of `j` not in `allowed`.
void CheckKeys(const Json &j, std::initializer_list<const char *> allowed, const char *where);

template <typename T>
void ReadKey(const Json &j, const char *key, T *out) {
  if (!j.contains(key)) return;
  try {
    *out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace ssgc

#endif  // SSGC_CONFIG_H_
