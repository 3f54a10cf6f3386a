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

#include "ssgc/config.h"

#include <string>

#include "ssgc/error.h"

namespace ssgc {

void CheckKeys(const Json &j, std::initializer_list<const char *> allowed, const char *where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char *a : allowed) ok |= it.key() == a;
    if (!ok) throw ConfigError(std::string(where) + ": unknown key '" + it.key() + "'");
  }
}

Json ToJson(const EncoderConfig &c) {
  return {{"token_dim", c.token_dim},       {"context", c.context},
          {"context_hidden", c.context_hidden}, {"char_cnn", c.char_cnn},
          {"char_dim", c.char_dim},         {"char_filters", c.char_filters},
          {"char_width", c.char_width},     {"init_std", c.init_std}};
}

void FromJson(const Json &j, EncoderConfig *c) {
  CheckKeys(j,
            {"token_dim", "context", "context_hidden", "char_cnn", "char_dim", "char_filters",
             "char_width", "init_std"},
            "encoder");
  ReadKey(j, "token_dim", &c->token_dim);
  ReadKey(j, "context", &c->context);
  ReadKey(j, "context_hidden", &c->context_hidden);
  ReadKey(j, "char_cnn", &c->char_cnn);
  ReadKey(j, "char_dim", &c->char_dim);
  ReadKey(j, "char_filters", &c->char_filters);
  ReadKey(j, "char_width", &c->char_width);
  ReadKey(j, "init_std", &c->init_std);
  ValidateEncoderConfig(*c);
}

Json ToJson(const GcnConfig &c) {
  return {{"hidden", c.hidden},
          {"layers", c.layers},
          {"type_dim", c.type_dim},
          {"split_edge_kinds", c.split_edge_kinds},
          {"edge_labels", c.edge_labels},
          {"edge_label_dim", c.edge_label_dim}};
}

void FromJson(const Json &j, GcnConfig *c) {
  CheckKeys(j, {"hidden", "layers", "type_dim", "split_edge_kinds", "edge_labels", "edge_label_dim"},
            "gcn");
  ReadKey(j, "hidden", &c->hidden);
  ReadKey(j, "layers", &c->layers);
  ReadKey(j, "type_dim", &c->type_dim);
  ReadKey(j, "split_edge_kinds", &c->split_edge_kinds);
  ReadKey(j, "edge_labels", &c->edge_labels);
  ReadKey(j, "edge_label_dim", &c->edge_label_dim);
  ValidateGcnConfig(*c);
}

Json ToJson(const PerturbationConfig &c) {
  Json freq = Json::object();
  for (const auto &[t, f] : c.srl_frequencies) freq[PerturbationName(t)] = f;
  return {{"srl_frequencies", freq},     {"srl_weight", c.srl_weight},
          {"coref_weight", c.coref_weight}, {"decay_start", c.decay_start},
          {"decay_floor", c.decay_floor},   {"decay_factor", c.decay_factor},
          {"confusion", c.confusion}};
}

void FromJson(const Json &j, PerturbationConfig *c) {
  CheckKeys(j,
            {"srl_frequencies", "srl_weight", "coref_weight", "decay_start", "decay_floor",
             "decay_factor", "confusion"},
            "perturb");
  if (j.contains("srl_frequencies")) {
    const Json &f = j.at("srl_frequencies");
    if (!f.is_object()) throw ConfigError("perturb.srl_frequencies: expected an object");
    c->srl_frequencies.clear();
    for (auto it = f.begin(); it != f.end(); ++it) {
      if (!it.value().is_number()) throw ConfigError("perturb.srl_frequencies: expected numbers");
      c->srl_frequencies[ParsePerturbationType(it.key())] = it.value().get<double>();
    }
  }
  ReadKey(j, "srl_weight", &c->srl_weight);
  ReadKey(j, "coref_weight", &c->coref_weight);
  ReadKey(j, "decay_start", &c->decay_start);
  ReadKey(j, "decay_floor", &c->decay_floor);
  ReadKey(j, "decay_factor", &c->decay_factor);
  ReadKey(j, "confusion", &c->confusion);
  ValidateConfig(*c);
}

Json ToJson(const DgiOptions &c) {
  return {{"epochs", c.epochs}, {"lr", c.lr}, {"weight_decay", c.weight_decay},
          {"shuffle", c.shuffle}, {"batch_size", c.batch_size}};
}

void FromJson(const Json &j, DgiOptions *c) {
  CheckKeys(j, {"epochs", "lr", "weight_decay", "shuffle", "batch_size"}, "dgi");
  ReadKey(j, "epochs", &c->epochs);
  ReadKey(j, "lr", &c->lr);
  ReadKey(j, "weight_decay", &c->weight_decay);
  ReadKey(j, "shuffle", &c->shuffle);
  ReadKey(j, "batch_size", &c->batch_size);
  if (c->epochs < 0 || !(c->lr > 0) || c->batch_size < 1) {
    throw ConfigError("dgi: epochs >= 0, lr > 0 and batch_size >= 1 required");
  }
}

Json ToJson(const LogisticOptions &c) {
  return {{"max_iters", c.max_iters}, {"tol", c.tol}, {"lr", c.lr}, {"l2", c.l2}};
}

void FromJson(const Json &j, LogisticOptions *c) {
  CheckKeys(j, {"max_iters", "tol", "lr", "l2"}, "logistic");
  ReadKey(j, "max_iters", &c->max_iters);
  ReadKey(j, "tol", &c->tol);
  ReadKey(j, "lr", &c->lr);
  ReadKey(j, "l2", &c->l2);
  if (c->max_iters < 1 || !(c->lr > 0) || c->l2 < 0) throw ConfigError("logistic: bad options");
}

Json ToJson(const CoherenceConfig &c) {
  return {{"perturb", ToJson(c.perturb)},     {"gcn", ToJson(c.gcn)},
          {"epochs", c.epochs},               {"dgi", ToJson(c.dgi)},
          {"logistic", ToJson(c.logistic)},   {"shared_encoder", c.shared_encoder},
          {"threads", c.threads}};
}

void FromJson(const Json &j, CoherenceConfig *c) {
  CheckKeys(j, {"perturb", "gcn", "epochs", "dgi", "logistic", "shared_encoder", "threads"},
            "coherence");
  if (j.contains("perturb")) FromJson(j.at("perturb"), &c->perturb);
  if (j.contains("gcn")) FromJson(j.at("gcn"), &c->gcn);
  if (j.contains("dgi")) FromJson(j.at("dgi"), &c->dgi);
  if (j.contains("logistic")) FromJson(j.at("logistic"), &c->logistic);
  ReadKey(j, "epochs", &c->epochs);
  ReadKey(j, "shared_encoder", &c->shared_encoder);
  ReadKey(j, "threads", &c->threads);
  ValidateCoherenceConfig(*c);
}

Json ToJson(const TrainSchedule &c) {
  return {{"base_lr", c.base_lr},
          {"weight_decay", c.weight_decay},
          {"plateau_factor", c.plateau_factor},
          {"plateau_patience", c.plateau_patience},
          {"min_lr", c.min_lr},
          {"max_epochs", c.max_epochs}};
}

void FromJson(const Json &j, TrainSchedule *c) {
  CheckKeys(j,
            {"base_lr", "weight_decay", "plateau_factor", "plateau_patience", "min_lr",
             "max_epochs"},
            "schedule");
  ReadKey(j, "base_lr", &c->base_lr);
  ReadKey(j, "weight_decay", &c->weight_decay);
  ReadKey(j, "plateau_factor", &c->plateau_factor);
  ReadKey(j, "plateau_patience", &c->plateau_patience);
  ReadKey(j, "min_lr", &c->min_lr);
  ReadKey(j, "max_epochs", &c->max_epochs);
  ValidateSchedule(*c);
}

Json ToJson(const CorefConfig &c) {
  return {{"max_span_width", c.max_span_width}, {"top_span_ratio", c.top_span_ratio},
          {"max_antecedents", c.max_antecedents}, {"mention_hidden", c.mention_hidden},
          {"pair_hidden", c.pair_hidden}, {"max_tokens", c.max_tokens},
          {"mention_loss_weight", c.mention_loss_weight}};
}

void FromJson(const Json &j, CorefConfig *c) {
  CheckKeys(j,
            {"max_span_width", "top_span_ratio", "max_antecedents", "mention_hidden",
             "pair_hidden", "max_tokens", "mention_loss_weight"},
            "coref");
  ReadKey(j, "max_span_width", &c->max_span_width);
  ReadKey(j, "top_span_ratio", &c->top_span_ratio);
  ReadKey(j, "max_antecedents", &c->max_antecedents);
  ReadKey(j, "mention_hidden", &c->mention_hidden);
  ReadKey(j, "pair_hidden", &c->pair_hidden);
  ReadKey(j, "max_tokens", &c->max_tokens);
  ReadKey(j, "mention_loss_weight", &c->mention_loss_weight);
  ValidateCorefConfig(*c);
}

Json ToJson(const SrlConfig &c) { return {{"hidden", c.hidden}}; }

void FromJson(const Json &j, SrlConfig *c) {
  CheckKeys(j, {"hidden"}, "srl");
  ReadKey(j, "hidden", &c->hidden);
  ValidateSrlConfig(*c);
}

Json ToJson(const TaggerConfig &c) {
  return {{"encoder", ToJson(c.encoder)}, {"coref", ToJson(c.coref)}, {"srl", ToJson(c.srl)},
          {"shared_encoder", c.shared_encoder}};
}

void FromJson(const Json &j, TaggerConfig *c) {
  CheckKeys(j, {"encoder", "coref", "srl", "shared_encoder"}, "taggers");
  if (j.contains("encoder")) FromJson(j.at("encoder"), &c->encoder);
  if (j.contains("coref")) FromJson(j.at("coref"), &c->coref);
  if (j.contains("srl")) FromJson(j.at("srl"), &c->srl);
  ReadKey(j, "shared_encoder", &c->shared_encoder);
}

Json ToJson(const FinetuneConfig &c) {
  return {{"lr", c.lr},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"task", TaggerTaskName(c.task)},
          {"baseline", RewardBaselineName(c.baseline)},
          {"baseline_momentum", c.baseline_momentum},
          {"weight_decay", c.weight_decay},
          {"hill_climbing", c.hill_climbing}};
}

void FromJson(const Json &j, FinetuneConfig *c) {
  CheckKeys(j,
            {"lr", "epochs", "batch_size", "task", "baseline", "baseline_momentum",
             "weight_decay", "hill_climbing"},
            "finetune");
  ReadKey(j, "lr", &c->lr);
  ReadKey(j, "epochs", &c->epochs);
  ReadKey(j, "batch_size", &c->batch_size);
  std::string name;
  if (j.contains("task")) {
    ReadKey(j, "task", &name);
    c->task = ParseTaggerTask(name);
  }
  if (j.contains("baseline")) {
    ReadKey(j, "baseline", &name);
    c->baseline = ParseRewardBaseline(name);
  }
  ReadKey(j, "baseline_momentum", &c->baseline_momentum);
  ReadKey(j, "weight_decay", &c->weight_decay);
  ReadKey(j, "hill_climbing", &c->hill_climbing);
  ValidateFinetuneConfig(*c);
}

Json ToJson(const SynthConfig &c) {
  return {{"count", c.count},
          {"min_sentences", c.min_sentences},
          {"max_sentences", c.max_sentences},
          {"pronoun_subject_prob", c.pronoun_subject_prob},
          {"pronoun_object_prob", c.pronoun_object_prob},
          {"names", c.names},
          {"nouns", c.nouns},
          {"verbs", c.verbs}};
}

void FromJson(const Json &j, SynthConfig *c) {
  CheckKeys(j,
            {"count", "min_sentences", "max_sentences", "pronoun_subject_prob",
             "pronoun_object_prob", "names", "nouns", "verbs"},
            "synth");
  ReadKey(j, "count", &c->count);
  ReadKey(j, "min_sentences", &c->min_sentences);
  ReadKey(j, "max_sentences", &c->max_sentences);
  ReadKey(j, "pronoun_subject_prob", &c->pronoun_subject_prob);
  ReadKey(j, "pronoun_object_prob", &c->pronoun_object_prob);
  ReadKey(j, "names", &c->names);
  ReadKey(j, "nouns", &c->nouns);
  ReadKey(j, "verbs", &c->verbs);
  if (c->count < 0 || c->min_sentences < 1 || c->max_sentences < c->min_sentences)
    throw ConfigError("synth: need count >= 0 and 1 <= min_sentences <= max_sentences");
  if (c->pronoun_subject_prob < 0 || c->pronoun_subject_prob > 1 || c->pronoun_object_prob < 0 ||
      c->pronoun_object_prob > 1)
    throw ConfigError("synth: pronoun probabilities must lie in [0, 1]");
}

Json ToJson(const CorpusSplit &c) {
  return {{"train", c.train}, {"dev", c.dev}, {"coherence", c.coherence}, {"unlabeled", c.unlabeled}};
}

void FromJson(const Json &j, CorpusSplit *c) {
  CheckKeys(j, {"train", "dev", "coherence", "unlabeled"}, "split");
  ReadKey(j, "train", &c->train);
  ReadKey(j, "dev", &c->dev);
  ReadKey(j, "coherence", &c->coherence);
  ReadKey(j, "unlabeled", &c->unlabeled);
}

Json ToJson(const PipelineConfig &c) {
  return {{"synth", ToJson(c.synth)},
          {"corpus_seed", c.corpus_seed},
          {"split", ToJson(c.split)},
          {"coherence_encoder", ToJson(c.coherence_encoder)},
          {"coherence", ToJson(c.coherence)},
          {"taggers", ToJson(c.taggers)},
          {"schedule", ToJson(c.schedule)},
          {"counterpart_schedule", ToJson(c.counterpart_schedule)},
          {"finetune", ToJson(c.finetune)}};
}

void FromJson(const Json &j, PipelineConfig *c) {
  CheckKeys(j,
            {"synth", "corpus_seed", "split", "coherence_encoder", "coherence", "taggers",
             "schedule", "counterpart_schedule", "finetune"},
            "pipeline");
  if (j.contains("synth")) FromJson(j.at("synth"), &c->synth);
  ReadKey(j, "corpus_seed", &c->corpus_seed);
  if (j.contains("split")) FromJson(j.at("split"), &c->split);
  if (j.contains("coherence_encoder")) FromJson(j.at("coherence_encoder"), &c->coherence_encoder);
  if (j.contains("coherence")) FromJson(j.at("coherence"), &c->coherence);
  if (j.contains("taggers")) FromJson(j.at("taggers"), &c->taggers);
  if (j.contains("schedule")) FromJson(j.at("schedule"), &c->schedule);
  if (j.contains("counterpart_schedule"))
    FromJson(j.at("counterpart_schedule"), &c->counterpart_schedule);
  if (j.contains("finetune")) FromJson(j.at("finetune"), &c->finetune);
}

}  // namespace ssgc
