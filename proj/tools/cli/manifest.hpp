// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

// Every artifact-producing stage writes a manifest next to its output:
// the config sections the artifact depends on, their hash, the seed, the
// inputs it consumed and the SHA-256 of each output file. A stage reading an
// artifact recomputes the hash of those sections from its own configuration
// and refuses to continue on a mismatch.

#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "config.hpp"

namespace prefalign::cli {

struct Manifest {
  std::string stage;
  std::set<std::string> sections;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;   // path, sha256
  std::vector<std::pair<std::string, std::string>> outputs;  // path, sha256
  Json info = Json::object();

  Json to_json() const;
  static Manifest from_json(const Json& j);
};

// <artifact>.manifest.json
std::filesystem::path manifest_path(const std::filesystem::path& artifact);

// Loads the manifest covering `artifact` and checks the artifact's hash and
// the config hash of the manifest's sections. Throws ValidationError.
Manifest verify_upstream(const RunConfig& config, const std::filesystem::path& artifact);

// Collects inputs and outputs of one stage run, then writes the manifest.
class ManifestWriter {
 public:
  ManifestWriter(const RunConfig& config, std::string stage, std::set<std::string> own_sections);

  // Verifies and records an input artifact; its sections are inherited.
  const Manifest& consume(const std::filesystem::path& artifact);
  void produce(const std::filesystem::path& artifact);
  Json& info() { return manifest_.info; }

  // Writes the manifest to `where` (default: manifest_path of the first
  // output).
  void write(const std::filesystem::path& where = {});

 private:
  const RunConfig& config_;
  Manifest manifest_;
  std::vector<Manifest> upstream_;
};

// Text written with '\n' line endings; parent directories created.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace prefalign::cli
