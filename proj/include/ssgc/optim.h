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

#ifndef SSGC_OPTIM_H_
#define SSGC_OPTIM_H_

#include <map>
#include <string>
#include <vector>

#include "ssgc/tape.h"
#include "ssgc/tensor.h"

namespace ssgc {

// Named parameters with their Adam moments.
class ParamStore {
 public:
  struct Slot {
    Tensor value;
    Tensor m;
    Tensor v;
    long step = 0;
  };

  // Throws ConfigError if the name is taken.
  Tensor &Add(const std::string &name, Tensor init);
  // Adds the parameter unless it already exists.
  Tensor &AddOrGet(const std::string &name, Tensor init);
  bool contains(const std::string &name) const { return slots_.count(name) > 0; }
  const Tensor &get(const std::string &name) const;
  Tensor &get(const std::string &name);
  Slot &slot(const std::string &name);
  std::vector<std::string> names() const;
  // Names under "<prefix>".
  std::vector<std::string> names_with_prefix(const std::string &prefix) const;
  size_t size() const { return slots_.size(); }
  // Total scalar count.
  size_t parameter_count() const;
  // Values only; Adam state is reset.
  ParamStore CopyValues() const;
  // Overwrites the values of every parameter found in `other`.
  void AssignValues(const ParamStore &other);
  void ResetOptimizerState();

 private:
  std::map<std::string, Slot> slots_;
};

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// One Adam step over every parameter that has an entry in `grads`, with
// decoupled weight decay (theta <- theta - lr * wd * theta before the Adam
// delta). Throws ShapeError on mismatched shapes.
void AdamStep(ParamStore &store, const Gradients &grads, double lr, double weight_decay,
              const AdamOptions &options = {});

struct TrainSchedule {
  double base_lr = 1e-3;
  double weight_decay = 0.01;
  double plateau_factor = 0.5;
  int plateau_patience = 2;
  double min_lr = 1e-7;
  int max_epochs = 100;
};

void ValidateSchedule(const TrainSchedule &s);

// Reduce-on-plateau learning rate with a stop condition.
class PlateauScheduler {
 public:
  explicit PlateauScheduler(const TrainSchedule &schedule);

  struct Decision {
    double lr;
    bool stop;
  };

  // Records the dev metric (higher is better) of the epoch that just ended.
  Decision Step(double dev_metric);

  double lr() const { return lr_; }
  int epoch() const { return epoch_; }
  const std::vector<double> &history() const { return history_; }

 private:
  TrainSchedule schedule_;
  double lr_;
  double best_;
  int bad_epochs_ = 0;
  int epoch_ = 0;
  std::vector<double> history_;
};

// Binary checkpoint: "SSGC1\n", a JSON metadata blob, then name/shape/data
// records in little-endian float64.
void SaveCheckpoint(const std::string &path, const ParamStore &store, const std::string &meta);
ParamStore LoadCheckpoint(const std::string &path, std::string *meta = nullptr);

}  // namespace ssgc

#endif  // SSGC_OPTIM_H_
