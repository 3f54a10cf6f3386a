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

#ifndef SSGC_RNG_H_
#define SSGC_RNG_H_

#include <cstdint>
#include <random>
#include <vector>

namespace ssgc {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent streams from one seed.
inline uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t SplitSeed(uint64_t seed, uint64_t stream) {
  return Mix64(Mix64(seed) ^ Mix64(stream + 0x632be59bd9b4e019ULL));
}

inline Rng MakeRng(uint64_t seed, uint64_t stream = 0) {
  return Rng(SplitSeed(seed, stream));
}

// Uniform integer in [lo, hi].
inline int UniformInt(Rng &rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double Uniform01(Rng &rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline bool Bernoulli(Rng &rng, double p) { return Uniform01(rng) < p; }

// Draws an index proportionally to non-negative weights. Returns -1 when all
// weights are zero.
inline int SampleIndex(Rng &rng, const std::vector<double> &weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (total <= 0.0) return -1;
  double u = Uniform01(rng) * total;
  int last = -1;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last = static_cast<int>(i);
    if (u < weights[i]) return last;
    u -= weights[i];
  }
  return last;
}

}  // namespace ssgc

#endif  // SSGC_RNG_H_
