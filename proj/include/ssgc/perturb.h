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

#ifndef SSGC_PERTURB_H_
#define SSGC_PERTURB_H_

#include <array>
#include <map>
#include <string>
#include <vector>

#include "ssgc/corpus.h"
#include "ssgc/rng.h"
#include "ssgc/ssg.h"

namespace ssgc {

enum class PerturbationType {
  kSrlChangeLabel,
  kSrlMoveArgument,
  kSrlSplitSpans,
  kSrlMergeSpans,
  kSrlChangeBoundary,
  kSrlAddArgument,
  kSrlDropArgument,
  kCorefAddAntecedent,
  kCorefDropAntecedent,
};

inline constexpr int kPerturbationTypeCount = 9;
inline constexpr std::array<PerturbationType, kPerturbationTypeCount> kAllPerturbationTypes = {
    PerturbationType::kSrlChangeLabel,     PerturbationType::kSrlMoveArgument,
    PerturbationType::kSrlSplitSpans,      PerturbationType::kSrlMergeSpans,
    PerturbationType::kSrlChangeBoundary,  PerturbationType::kSrlAddArgument,
    PerturbationType::kSrlDropArgument,    PerturbationType::kCorefAddAntecedent,
    PerturbationType::kCorefDropAntecedent};

inline bool IsSrlPerturbation(PerturbationType t) {
  return t != PerturbationType::kCorefAddAntecedent && t != PerturbationType::kCorefDropAntecedent;
}

// Kebab-case names used on the command line and in reports
// ("srl-change-label", ..., "coref-drop-antecedent").
const char *PerturbationName(PerturbationType t);
PerturbationType ParsePerturbationType(const std::string &name);

struct PerturbationConfig {
  // Relative frequency of each SRL error class; normalized when sampling.
  std::map<PerturbationType, double> srl_frequencies;
  double srl_weight = 3.0;
  double coref_weight = 1.0;
  double decay_start = 0.8;
  double decay_floor = 0.1;
  double decay_factor = 0.8;
  // Replacement-label distribution per gold label; zero diagonal.
  std::map<std::string, std::map<std::string, double>> confusion;
  RoleInventory roles = RoleInventory::Default();

  // Error frequencies 29.3 / 4.5 / 10.6 / 14.7 / 18 / 7.4 / 11, 3:1 SRL to
  // coreference, decay 0.8 -> 0.1 by a factor of 0.8 per epoch.
  static PerturbationConfig Default();
  // Uniform over the other core roles, adjacent core roles weighted twice.
  static std::map<std::string, std::map<std::string, double>> DefaultConfusion(
      const RoleInventory &roles);
};

// Throws ConfigError.
void ValidateConfig(const PerturbationConfig &cfg);

// Probability of each of the nine types under the mixed sampler.
std::array<double, kPerturbationTypeCount> MixedDistribution(const PerturbationConfig &cfg);

PerturbationType SampleMixedPerturbation(Rng &rng, const PerturbationConfig &cfg);

// max(floor, start * factor^epoch).
double DecaySchedule(int epoch, const PerturbationConfig &cfg);

struct PerturbationResult {
  Ssg graph;
  bool changed = false;
  // One human-readable line per applied edit.
  std::vector<std::string> edits;
};

// Perturbs each sentence independently with probability `decay`. Sentences
// offering no applicable site are left alone; `changed` reports whether the
// output differs from the input.
PerturbationResult ApplyPerturbation(const Ssg &g, PerturbationType type, double decay, Rng &rng,
                                     const PerturbationConfig &cfg);

// Retries ApplyPerturbation until the graph changes, up to `attempts` times.
PerturbationResult ApplyPerturbationChanged(const Ssg &g, PerturbationType type, double decay,
                                            Rng &rng, const PerturbationConfig &cfg,
                                            int attempts = 16);

}  // namespace ssgc

#endif  // SSGC_PERTURB_H_
