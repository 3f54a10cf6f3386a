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

#include "ssgc/optim.h"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

#include "ssgc/error.h"

namespace ssgc {

Tensor &ParamStore::Add(const std::string &name, Tensor init) {
  if (contains(name)) throw ConfigError("parameter '" + name + "' already exists");
  return AddOrGet(name, std::move(init));
}

Tensor &ParamStore::AddOrGet(const std::string &name, Tensor init) {
  auto it = slots_.find(name);
  if (it != slots_.end()) return it->second.value;
  Slot slot;
  slot.m = Tensor::ZerosLike(init);
  slot.v = Tensor::ZerosLike(init);
  slot.value = std::move(init);
  return slots_.emplace(name, std::move(slot)).first->second.value;
}

const Tensor &ParamStore::get(const std::string &name) const {
  auto it = slots_.find(name);
  if (it == slots_.end()) throw ConfigError("unknown parameter '" + name + "'");
  return it->second.value;
}

Tensor &ParamStore::get(const std::string &name) { return slot(name).value; }

ParamStore::Slot &ParamStore::slot(const std::string &name) {
  auto it = slots_.find(name);
  if (it == slots_.end()) throw ConfigError("unknown parameter '" + name + "'");
  return it->second;
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  for (const auto &[name, slot] : slots_) out.push_back(name);
  return out;
}

std::vector<std::string> ParamStore::names_with_prefix(const std::string &prefix) const {
  std::vector<std::string> out;
  for (auto it = slots_.lower_bound(prefix); it != slots_.end(); ++it) {
    if (it->first.compare(0, prefix.size(), prefix) != 0) break;
    out.push_back(it->first);
  }
  return out;
}

size_t ParamStore::parameter_count() const {
  size_t n = 0;
  for (const auto &[name, slot] : slots_) n += slot.value.size();
  return n;
}

ParamStore ParamStore::CopyValues() const {
  ParamStore out;
  for (const auto &[name, slot] : slots_) out.Add(name, slot.value);
  return out;
}

void ParamStore::AssignValues(const ParamStore &other) {
  for (const auto &[name, slot] : other.slots_) {
    Tensor &dst = get(name);
    if (!dst.same_shape(slot.value)) throw ShapeError("shape mismatch assigning " + name);
    dst.data = slot.value.data;
  }
}

void ParamStore::ResetOptimizerState() {
  for (auto &[name, slot] : slots_) {
    slot.m = Tensor::ZerosLike(slot.value);
    slot.v = Tensor::ZerosLike(slot.value);
    slot.step = 0;
  }
}

void AdamStep(ParamStore &store, const Gradients &grads, double lr, double weight_decay,
              const AdamOptions &options) {
  for (const auto &[name, g] : grads.all()) {
    ParamStore::Slot &s = store.slot(name);
    if (!s.value.same_shape(g) || s.value.size() != g.size()) {
      throw ShapeError("gradient for '" + name + "' has shape " + ShapeString(g) +
                       ", parameter has " + ShapeString(s.value));
    }
    ++s.step;
    const double c1 = 1.0 - std::pow(options.beta1, static_cast<double>(s.step));
    const double c2 = 1.0 - std::pow(options.beta2, static_cast<double>(s.step));
    const double b1 = options.beta1, b2 = options.beta2, eps = options.epsilon;
    const double shrink = 1.0 - lr * weight_decay;
    double *__restrict theta = s.value.data.data();
    double *__restrict m = s.m.data.data();
    double *__restrict v = s.v.data.data();
    const double *__restrict gd = g.data.data();
    const size_t n = g.size();
    for (size_t i = 0; i < n; ++i) {
      const double t = theta[i] * shrink;
      m[i] = b1 * m[i] + (1.0 - b1) * gd[i];
      v[i] = b2 * v[i] + (1.0 - b2) * gd[i] * gd[i];
      theta[i] = t - lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
  }
}

void ValidateSchedule(const TrainSchedule &s) {
  if (!(s.min_lr > 0.0 && s.min_lr <= s.base_lr)) throw ConfigError("need 0 < min_lr <= base_lr");
  if (!(s.plateau_factor > 0.0 && s.plateau_factor < 1.0)) {
    throw ConfigError("plateau_factor must lie in (0, 1)");
  }
  if (s.plateau_patience < 1) throw ConfigError("plateau_patience must be >= 1");
  if (s.max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (s.weight_decay < 0.0) throw ConfigError("weight_decay must be >= 0");
}

PlateauScheduler::PlateauScheduler(const TrainSchedule &schedule)
    : schedule_(schedule),
      lr_(schedule.base_lr),
      best_(-std::numeric_limits<double>::infinity()) {
  ValidateSchedule(schedule);
}

PlateauScheduler::Decision PlateauScheduler::Step(double dev_metric) {
  ++epoch_;
  history_.push_back(dev_metric);
  if (dev_metric > best_) {
    best_ = dev_metric;
    bad_epochs_ = 0;
  } else if (++bad_epochs_ >= schedule_.plateau_patience) {
    lr_ *= schedule_.plateau_factor;
    bad_epochs_ = 0;
  }
  const bool stop = epoch_ >= schedule_.max_epochs || lr_ < schedule_.min_lr;
  return {lr_, stop};
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr char kMagic[] = "SSGC1\n";

template <typename T>
void WritePod(std::ostream &out, T value) {
  out.write(reinterpret_cast<const char *>(&value), sizeof(T));
}

template <typename T>
T ReadPod(std::istream &in) {
  T value;
  in.read(reinterpret_cast<char *>(&value), sizeof(T));
  if (!in) throw ParseError("truncated checkpoint");
  return value;
}

void WriteString(std::ostream &out, const std::string &s) {
  WritePod<uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string ReadString(std::istream &in) {
  const auto n = ReadPod<uint64_t>(in);
  if (n > (1ULL << 32)) throw ParseError("corrupt checkpoint string length");
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw ParseError("truncated checkpoint");
  return s;
}

}  // namespace

void SaveCheckpoint(const std::string &path, const ParamStore &store, const std::string &meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write checkpoint " + path);
  out.write(kMagic, sizeof(kMagic) - 1);
  WriteString(out, meta);
  const auto names = store.names();
  WritePod<uint64_t>(out, names.size());
  for (const auto &name : names) {
    const Tensor &t = store.get(name);
    WriteString(out, name);
    WritePod<uint32_t>(out, static_cast<uint32_t>(t.shape.size()));
    for (int d : t.shape) WritePod<int64_t>(out, d);
    out.write(reinterpret_cast<const char *>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  }
  if (!out) throw ConfigError("failed writing checkpoint " + path);
}

ParamStore LoadCheckpoint(const std::string &path, std::string *meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint " + path);
  char magic[sizeof(kMagic) - 1];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw ParseError("not an SSGC1 checkpoint: " + path);
  }
  std::string m = ReadString(in);
  if (meta) *meta = std::move(m);
  ParamStore store;
  const auto count = ReadPod<uint64_t>(in);
  for (uint64_t i = 0; i < count; ++i) {
    std::string name = ReadString(in);
    const auto rank = ReadPod<uint32_t>(in);
    if (rank > 2) throw ParseError("unsupported tensor rank in checkpoint");
    std::vector<int> shape;
    size_t n = 1;
    for (uint32_t r = 0; r < rank; ++r) {
      shape.push_back(static_cast<int>(ReadPod<int64_t>(in)));
      n *= static_cast<size_t>(shape.back());
    }
    std::vector<double> data(n);
    in.read(reinterpret_cast<char *>(data.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw ParseError("truncated checkpoint tensor " + name);
    store.Add(name, Tensor(std::move(shape), std::move(data)));
  }
  return store;
}

}  // namespace ssgc
