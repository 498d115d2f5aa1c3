// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "config.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "prefalign/error.hpp"

namespace prefalign::cli {

const Json& default_config() {
  static const Json doc = Json::parse(R"({
    "seed": 1,
    "pivot": "en",
    "paths": {
      "pretrain_corpus": "data/pretrain.jsonl",
      "train_corpus": "data/train.jsonl",
      "test_corpus": "data/test.jsonl",
      "base_model": "models/base.ckpt",
      "model": "models/model.ckpt",
      "candidates": "data/candidates.jsonl",
      "scores": "data/scores.jsonl",
      "dataset": "data/prefs.jsonl",
      "grid_dir": "data/grid",
      "reports": "reports"
    },
    "corpus": {
      "task": "cipher",
      "pretrain_size": 4000,
      "train_size": 2000,
      "test_size": 200,
      "noise_rate": 0.0,
      "min_chars": 4,
      "max_chars": 10,
      "space_rate": 0.15,
      "pretrain_confusable_letters": 8,
      "pretrain_confusion_rate": 0.55
    },
    "model": {"dim": 24, "n_layers": 2, "n_heads": 2, "ffn_dim": 0, "max_len": 24},
    "pretrain": {
      "objective": "sft", "beta": 0.1, "base_lr": 0.003, "warmup_steps": 20,
      "batch_size": 16, "epochs": 3, "optimizer": "adam"
    },
    "train": {
      "objective": "cpo", "beta": 0.1, "base_lr": 0.0003, "warmup_steps": 0,
      "batch_size": 16, "epochs": 1, "optimizer": "adam"
    },
    "candidates": {
      "k": 20, "top_p": 0.6, "temperature": 0.9, "max_chars": 16,
      "include_reference": false,
      "external": {"enabled": false, "name": "synth", "noise_rate": 0.1}
    },
    "metrics": {
      "alignment": "edit_sim",
      "evaluation": ["edit_sim", "chrf", "bleu"],
      "external": {
        "endpoint": "", "timeout_seconds": 30.0, "max_retries": 3, "max_batch": 64,
        "max_in_flight": 2, "needs_reference": false
      }
    },
    "build": {
      "regime": "mono-offset",
      "rejected_offset": 20,
      "chosen_offset": 20,
      "excluded": [],
      "chosen_system": "ref",
      "calibrate_chosen": 90.0,
      "calibrate_rejected": 50.0
    },
    "eval": {"alpha": 0.05, "max_chars": 16}
  })");
  return doc;
}

namespace {

std::string type_name(const Json& v) {
  if (v.is_boolean()) return "boolean";
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  if (v.is_object()) return "object";
  return "null";
}

bool same_type(const Json& def, const Json& v) {
  if (def.is_number_float()) return v.is_number();
  if (def.is_number_integer()) return v.is_number_integer();
  if (def.is_array()) {
    if (!v.is_array()) return false;
    for (const auto& e : v) {
      if (!e.is_string()) return false;
    }
    return true;
  }
  return def.type() == v.type();
}

void merge(Json& into, const Json& from, const std::string& prefix) {
  if (!from.is_object()) throw ValidationError("config root must be an object");
  for (auto it = from.begin(); it != from.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!into.contains(it.key())) throw ValidationError("unknown config key '" + key + "'");
    Json& slot = into[it.key()];
    if (slot.is_object()) {
      if (!it.value().is_object()) throw ValidationError("config key '" + key + "' must be an object");
      merge(slot, it.value(), key);
    } else {
      if (!same_type(slot, it.value())) {
        throw ValidationError("config key '" + key + "' expects " + type_name(slot) + ", got " +
                              type_name(it.value()));
      }
      slot = it.value();
    }
  }
}

}  // namespace

void RunConfig::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError("config " + path.string() + ": " + e.what());
  }
  merge(doc_, j, "");
}

void RunConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ValidationError("override '" + assignment + "' is not of the form key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  // rebuild the nested object for the dotted key and merge it
  Json patch = value;
  std::string rest = key;
  std::vector<std::string> parts;
  for (std::size_t pos; (pos = rest.find('.')) != std::string::npos; rest = rest.substr(pos + 1)) {
    parts.push_back(rest.substr(0, pos));
  }
  parts.push_back(rest);
  // a string default given a bare number (e.g. paths.x=2) stays a string
  try {
    const Json& def = at(key);
    if (def.is_string() && !value.is_string()) patch = text;
  } catch (const ValidationError&) {
  }
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = Json{{*it, patch}};
  merge(doc_, patch, "");
}

const Json& RunConfig::at(const std::string& dotted) const {
  const Json* node = &doc_;
  std::string rest = dotted;
  while (true) {
    const auto pos = rest.find('.');
    const std::string part = rest.substr(0, pos);
    if (!node->is_object() || !node->contains(part)) {
      throw ValidationError("unknown config key '" + dotted + "'");
    }
    node = &(*node)[part];
    if (pos == std::string::npos) return *node;
    rest = rest.substr(pos + 1);
  }
}

void RunConfig::validate() const {
  auto positive = [&](const std::string& key) {
    if (!(at(key).get<double>() > 0)) throw ValidationError(key + " must be positive");
  };
  for (const char* k : {"corpus.pretrain_size", "corpus.train_size", "corpus.test_size",
                        "candidates.k", "candidates.max_chars", "eval.max_chars",
                        "candidates.top_p", "candidates.temperature"}) {
    positive(k);
  }
  if (at("candidates.top_p").get<double>() > 1.0) {
    throw ValidationError("candidates.top_p must be in (0, 1]");
  }
  const double alpha = at("eval.alpha").get<double>();
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("eval.alpha must be in (0, 1)");
  task();
  auto check_metric = [&](const std::string& name) {
    const auto builtin = metrics::builtin_metric_names();
    if (std::find(builtin.begin(), builtin.end(), name) != builtin.end()) return;
    if (name.rfind("ext:", 0) == 0 && name.size() > 4) return;
    throw ValidationError("unknown metric '" + name + "'");
  };
  check_metric(at("metrics.alignment").get<std::string>());
  for (const auto& m : at("metrics.evaluation")) check_metric(m.get<std::string>());
  const std::string regime = at("build.regime").get<std::string>();
  static const std::vector<std::string> regimes = {"multi", "multi-ablate", "fixed-chosen",
                                                   "mono-offset", "grid"};
  if (std::find(regimes.begin(), regimes.end(), regime) == regimes.end()) {
    throw ValidationError("unknown build.regime '" + regime + "'");
  }
  if (regime == "multi-ablate" && at("build.excluded").empty()) {
    throw ValidationError("build.excluded must name at least one system for multi-ablate");
  }
  if (regime == "fixed-chosen") corpus::SystemId::parse(at("build.chosen_system").get<std::string>());
  if (at("build.rejected_offset").get<int>() < 1 || at("build.chosen_offset").get<int>() < 1) {
    throw ValidationError("build offsets must be >= 1");
  }
  for (const char* section : {"pretrain", "train"}) train_config(section).validate();
}

std::uint64_t RunConfig::seed() const {
  const Json& s = at("seed");
  if (s.get<std::int64_t>() < 0) throw ValidationError("seed must be non-negative");
  return s.get<std::uint64_t>();
}

std::string RunConfig::pivot() const { return at("pivot").get<std::string>(); }

std::filesystem::path RunConfig::path(const std::string& key) const {
  return at("paths." + key).get<std::string>();
}

corpus::SyntheticTask RunConfig::task() const {
  try {
    return corpus::parse_task(at("corpus.task").get<std::string>());
  } catch (const ParameterError& e) {
    throw ValidationError(std::string("corpus.task: ") + e.what());
  }
}

corpus::SyntheticOptions RunConfig::corpus_options(const std::string& id_prefix,
                                                   bool pretrain) const {
  corpus::SyntheticOptions o;
  o.min_chars = at("corpus.min_chars").get<int>();
  o.max_chars = at("corpus.max_chars").get<int>();
  o.space_rate = at("corpus.space_rate").get<double>();
  o.id_prefix = id_prefix;
  if (pretrain) {
    o.confusable_letters = at("corpus.pretrain_confusable_letters").get<int>();
    o.confusion_rate = at("corpus.pretrain_confusion_rate").get<double>();
  }
  return o;
}

toymt::ModelConfig RunConfig::model_config(const std::u32string& chars) const {
  toymt::ModelConfig m;
  m.chars = chars;
  m.dim = at("model.dim").get<int>();
  m.n_layers = at("model.n_layers").get<int>();
  m.n_heads = at("model.n_heads").get<int>();
  m.ffn_dim = at("model.ffn_dim").get<int>();
  m.max_len = at("model.max_len").get<int>();
  m.seed = seed();
  m.validate();
  return m;
}

train::TrainConfig RunConfig::train_config(const std::string& section) const {
  train::TrainConfig t;
  t.objective = train::parse_objective(at(section + ".objective").get<std::string>());
  t.beta = at(section + ".beta").get<double>();
  t.base_lr = at(section + ".base_lr").get<double>();
  const int warmup = at(section + ".warmup_steps").get<int>();
  if (warmup < 0) throw ValidationError(section + ".warmup_steps must be >= 0 (0 = automatic)");
  if (warmup > 0) t.warmup_steps = warmup;
  t.batch_size = at(section + ".batch_size").get<int>();
  t.epochs = at(section + ".epochs").get<int>();
  t.optimizer = train::parse_optimizer(at(section + ".optimizer").get<std::string>());
  t.seed = seed();
  return t;
}

std::optional<metrics::ExternalOptions> RunConfig::external_options() const {
  metrics::ExternalOptions o;
  o.endpoint = at("metrics.external.endpoint").get<std::string>();
  if (const char* env = std::getenv("PREFALIGN_SCORER_URL"); env && *env) o.endpoint = env;
  if (o.endpoint.empty()) return std::nullopt;
  o.timeout_seconds = at("metrics.external.timeout_seconds").get<double>();
  o.max_retries = at("metrics.external.max_retries").get<int>();
  o.max_batch = at("metrics.external.max_batch").get<std::size_t>();
  o.max_in_flight = at("metrics.external.max_in_flight").get<std::size_t>();
  o.needs_reference = at("metrics.external.needs_reference").get<bool>();
  return o;
}

std::string RunConfig::hash_sections(const std::vector<std::string>& sections) const {
  Json j = Json::object();
  for (const auto& s : sections) j[s] = at(s);
  return sha256_hex(j.dump());
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

}  // namespace prefalign::cli
