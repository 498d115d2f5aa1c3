// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "prefalign/corpus/types.hpp"

#include <cmath>
#include <set>

#include "prefalign/error.hpp"

namespace prefalign::corpus {

const char* to_string(Direction d) {
  return d == Direction::kIntoPivot ? "into-pivot" : "out-of-pivot";
}

Direction LangPair::direction(const std::string& pivot) const {
  const bool from = src == pivot;
  const bool into = tgt == pivot;
  if (from == into) {
    throw ValidationError("language pair " + tag() + " must have exactly one side equal to pivot '" +
                          pivot + "'");
  }
  return into ? Direction::kIntoPivot : Direction::kOutOfPivot;
}

SystemId SystemId::external(std::string name) {
  if (name.empty()) throw ParseError("external system name must be non-empty");
  return SystemId(Kind::kExternal, std::move(name), 0);
}

SystemId SystemId::sampled(int index) {
  if (index < 1) throw ParseError("sample index must be >= 1, got " + std::to_string(index));
  return SystemId(Kind::kSampled, {}, index);
}

SystemId SystemId::parse(const std::string& text) {
  if (text == "base") return base();
  if (text == "ref") return reference();
  if (text.rfind("ext:", 0) == 0) return external(text.substr(4));
  if (text.rfind("sample:", 0) == 0) {
    const std::string digits = text.substr(7);
    if (digits.empty() || digits.size() > 9 ||
        digits.find_first_not_of("0123456789") != std::string::npos) {
      throw ParseError("bad sample index in system '" + text + "'");
    }
    return sampled(std::stoi(digits));
  }
  throw ParseError("unknown system '" + text + "'");
}

std::string SystemId::str() const {
  switch (kind_) {
    case Kind::kBaseGreedy:
      return "base";
    case Kind::kReference:
      return "ref";
    case Kind::kExternal:
      return "ext:" + name_;
    case Kind::kSampled:
      return "sample:" + std::to_string(index_);
  }
  return {};
}

void CandidateSet::validate() const {
  if (candidates.size() < 2) {
    throw ValidationError("candidate set needs at least 2 candidates", segment_id);
  }
  std::set<SystemId> seen;
  int n_sampled = 0;
  for (const auto& c : candidates) {
    if (c.system.kind() == SystemId::Kind::kSampled) {
      ++n_sampled;
      continue;
    }
    if (c.text.empty()) {
      throw ValidationError("empty text for non-sampled system " + c.system.str(), segment_id);
    }
    if (!seen.insert(c.system).second) {
      throw ValidationError("duplicate system " + c.system.str(), segment_id);
    }
  }
  for (const auto& c : candidates) {
    if (c.system.kind() == SystemId::Kind::kSampled && c.system.index() > n_sampled) {
      throw ValidationError("sample index " + std::to_string(c.system.index()) +
                                " exceeds sample count " + std::to_string(n_sampled),
                            segment_id);
    }
  }
}

const Candidate* CandidateSet::find(const SystemId& system) const {
  for (const auto& c : candidates) {
    if (c.system == system) return &c;
  }
  return nullptr;
}

void PreferencePair::validate() const {
  if (!std::isfinite(chosen_score) || !std::isfinite(rejected_score)) {
    throw ValidationError("non-finite score", segment_id);
  }
  if (!(chosen_score > rejected_score)) {
    throw ValidationError("chosen_score must be strictly greater than rejected_score", segment_id);
  }
  if (metric.empty()) throw ValidationError("metric must be named", segment_id);
}

void PreferenceDataset::validate(bool for_persist) const {
  if (for_persist && pairs.empty()) throw ValidationError("preference dataset is empty");
  for (const auto& p : pairs) p.validate();
}

std::map<std::string, const Segment*> index_by_id(const Corpus& corpus) {
  std::map<std::string, const Segment*> index;
  for (const auto& seg : corpus) {
    if (!index.emplace(seg.id, &seg).second) {
      throw ValidationError("duplicate segment id", seg.id);
    }
  }
  return index;
}

}  // namespace prefalign::corpus
