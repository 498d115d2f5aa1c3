// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace prefalign::corpus {

enum class Direction { kIntoPivot, kOutOfPivot };

const char* to_string(Direction d);

struct LangPair {
  std::string src;
  std::string tgt;

  std::string tag() const { return src + "-" + tgt; }
  // Throws ValidationError unless exactly one side equals `pivot`.
  Direction direction(const std::string& pivot) const;

  auto operator<=>(const LangPair&) const = default;
};

struct Segment {
  std::string id;
  LangPair lang_pair;
  std::string source;
  std::optional<std::string> reference;

  bool operator==(const Segment&) const = default;
};

// Which system produced a candidate. Serialized as "base", "ref",
// "ext:<name>" or "sample:<k>".
class SystemId {
 public:
  enum class Kind : std::uint8_t { kBaseGreedy, kReference, kExternal, kSampled };

  SystemId() = default;  // the base system

  static SystemId base() { return SystemId(Kind::kBaseGreedy, {}, 0); }
  static SystemId reference() { return SystemId(Kind::kReference, {}, 0); }
  static SystemId external(std::string name);
  static SystemId sampled(int index);
  // Throws ParseError on anything that is not one of the four forms.
  static SystemId parse(const std::string& text);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  int index() const { return index_; }
  std::string str() const;

  auto operator<=>(const SystemId&) const = default;

 private:
  SystemId(Kind kind, std::string name, int index)
      : kind_(kind), name_(std::move(name)), index_(index) {}
  Kind kind_ = Kind::kBaseGreedy;
  std::string name_;
  int index_ = 0;
};

struct Candidate {
  SystemId system;
  std::string text;

  bool operator==(const Candidate&) const = default;
};

struct CandidateSet {
  std::string segment_id;
  std::vector<Candidate> candidates;

  // Throws ValidationError naming segment_id when the set is unusable:
  // fewer than two candidates, a repeated non-sampled system, an empty
  // non-sampled text, or a sample index outside 1..K.
  void validate() const;
  const Candidate* find(const SystemId& system) const;

  bool operator==(const CandidateSet&) const = default;
};

struct PreferencePair {
  std::string segment_id;
  Candidate chosen;
  Candidate rejected;
  double chosen_score = 0.0;
  double rejected_score = 0.0;
  std::string metric;
  std::string builder;

  // Throws ValidationError unless chosen_score > rejected_score (both finite).
  void validate() const;

  bool operator==(const PreferencePair&) const = default;
};

struct PreferenceDataset {
  std::vector<PreferencePair> pairs;
  std::map<std::string, std::string> metadata;

  // Every pair valid; non-empty if `for_persist`.
  void validate(bool for_persist = true) const;
};

// Scores of one metric for every candidate of a CandidateSet, index-aligned
// with CandidateSet::candidates.
struct CandidateScores {
  std::string segment_id;
  std::string metric;
  std::vector<double> scores;

  bool operator==(const CandidateScores&) const = default;
};

using Corpus = std::vector<Segment>;

// Index from segment id into a corpus. Throws ValidationError on duplicates.
std::map<std::string, const Segment*> index_by_id(const Corpus& corpus);

}  // namespace prefalign::corpus
