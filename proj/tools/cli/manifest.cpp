// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "manifest.hpp"

#include <fstream>

#include "prefalign/error.hpp"

namespace prefalign::cli {

namespace {

Json pairs_to_json(const std::vector<std::pair<std::string, std::string>>& v) {
  Json out = Json::array();
  for (const auto& [path, hash] : v) out.push_back({{"path", path}, {"sha256", hash}});
  return out;
}

std::vector<std::pair<std::string, std::string>> pairs_from_json(const Json& j) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : j) out.emplace_back(e.at("path").get<std::string>(), e.at("sha256").get<std::string>());
  return out;
}

}  // namespace

Json Manifest::to_json() const {
  nlohmann::ordered_json j;
  j["stage"] = stage;
  j["sections"] = sections;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["inputs"] = pairs_to_json(inputs);
  j["outputs"] = pairs_to_json(outputs);
  j["info"] = info;
  return Json::parse(j.dump());
}

Manifest Manifest::from_json(const Json& j) {
  Manifest m;
  m.stage = j.at("stage").get<std::string>();
  m.sections = j.at("sections").get<std::set<std::string>>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.inputs = pairs_from_json(j.at("inputs"));
  m.outputs = pairs_from_json(j.at("outputs"));
  m.info = j.at("info");
  return m;
}

std::filesystem::path manifest_path(const std::filesystem::path& artifact) {
  return artifact.string() + ".manifest.json";
}

Manifest verify_upstream(const RunConfig& config, const std::filesystem::path& artifact) {
  if (!std::filesystem::exists(artifact)) {
    throw ValidationError("input " + artifact.string() + " does not exist");
  }
  std::filesystem::path mpath = manifest_path(artifact);
  if (!std::filesystem::exists(mpath)) mpath = artifact.parent_path() / "manifest.json";
  if (!std::filesystem::exists(mpath)) {
    throw ValidationError("no manifest found for " + artifact.string());
  }
  Manifest m;
  try {
    std::ifstream in(mpath);
    m = Manifest::from_json(Json::parse(in));
  } catch (const Json::exception& e) {
    throw ValidationError("unreadable manifest " + mpath.string() + ": " + e.what());
  }
  const std::string own = artifact.generic_string();
  bool listed = false;
  for (const auto& [path, hash] : m.outputs) {
    if (path != own) continue;
    listed = true;
    if (sha256_file(artifact) != hash) {
      throw ValidationError(artifact.string() + " was modified after its manifest was written");
    }
  }
  if (!listed) throw ValidationError(mpath.string() + " does not list " + own);
  const std::vector<std::string> sections(m.sections.begin(), m.sections.end());
  if (config.hash_sections(sections) != m.config_hash) {
    std::string names;
    for (const auto& s : sections) names += (names.empty() ? "" : ", ") + s;
    throw ValidationError(artifact.string() + " was produced under a different configuration of [" +
                          names + "]; rerun stage '" + m.stage + "'");
  }
  return m;
}

ManifestWriter::ManifestWriter(const RunConfig& config, std::string stage,
                               std::set<std::string> own_sections)
    : config_(config) {
  manifest_.stage = std::move(stage);
  manifest_.sections = std::move(own_sections);
  manifest_.sections.insert("seed");
  manifest_.seed = config.seed();
}

const Manifest& ManifestWriter::consume(const std::filesystem::path& artifact) {
  upstream_.push_back(verify_upstream(config_, artifact));
  manifest_.sections.insert(upstream_.back().sections.begin(), upstream_.back().sections.end());
  manifest_.inputs.emplace_back(artifact.generic_string(), sha256_file(artifact));
  return upstream_.back();
}

void ManifestWriter::produce(const std::filesystem::path& artifact) {
  manifest_.outputs.emplace_back(artifact.generic_string(), sha256_file(artifact));
}

void ManifestWriter::write(const std::filesystem::path& where) {
  if (manifest_.outputs.empty()) throw ContractError("manifest without outputs");
  const std::vector<std::string> sections(manifest_.sections.begin(), manifest_.sections.end());
  manifest_.config_hash = config_.hash_sections(sections);
  const std::filesystem::path target =
      where.empty() ? manifest_path(manifest_.outputs.front().first) : where;
  write_text(target, manifest_.to_json().dump(2) + "\n");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("failed writing " + path.string());
}

}  // namespace prefalign::cli
