// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

// Run configuration: one JSON document with per-stage sections. Every key has
// a built-in default; files and --set overrides may only replace existing
// keys with values of the same type.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prefalign/corpus/synthetic.hpp"
#include "prefalign/metrics/metric.hpp"
#include "prefalign/toymt/config.hpp"
#include "prefalign/train/train.hpp"

namespace prefalign::cli {

using Json = nlohmann::json;

// The complete default configuration.
const Json& default_config();

class RunConfig {
 public:
  RunConfig() : doc_(default_config()) {}

  // Merges a config file over the defaults. Throws ValidationError on unknown
  // keys or type mismatches, ParseError on malformed JSON.
  void merge_file(const std::filesystem::path& path);
  // Applies "dotted.key=value". The value is parsed as JSON when possible,
  // otherwise taken as a string.
  void apply_override(const std::string& assignment);
  // Cross-field checks (metric names, regime parameters, ranges).
  void validate() const;

  const Json& doc() const { return doc_; }
  const Json& at(const std::string& dotted) const;

  std::uint64_t seed() const;
  std::string pivot() const;
  std::filesystem::path path(const std::string& key) const;

  corpus::SyntheticTask task() const;
  corpus::SyntheticOptions corpus_options(const std::string& id_prefix, bool pretrain) const;
  toymt::ModelConfig model_config(const std::u32string& chars) const;
  train::TrainConfig train_config(const std::string& section) const;
  std::optional<metrics::ExternalOptions> external_options() const;

  // SHA-256 of the canonical JSON of the named top-level sections.
  std::string hash_sections(const std::vector<std::string>& sections) const;

 private:
  Json doc_;
};

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace prefalign::cli
