// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "prefalign/corpus/types.hpp"
#include "prefalign/metrics/metric.hpp"

namespace prefalign::prefbuild {

using corpus::Candidate;
using corpus::CandidateSet;
using corpus::PreferencePair;
using corpus::SystemId;

using ScoreMap = std::map<SystemId, double>;

// Pairs a candidate set with one metric's scores (index-aligned). Throws
// InputError if the segment ids or lengths disagree.
ScoreMap score_map(const CandidateSet& set, const corpus::CandidateScores& scores);

// Total order used to break score ties: ref, then external systems by name,
// then base, then samples by index. Lower rank wins.
bool higher_priority(const SystemId& a, const SystemId& b);

// Chosen = highest score, rejected = lowest score, ties resolved by
// higher_priority. Returns nullopt when every candidate has the same score.
// Throws InputError if a candidate has no score or the set has < 2 entries.
std::optional<PreferencePair> build_multi_system(const CandidateSet& set, const ScoreMap& scores,
                                                 const std::string& metric,
                                                 const std::string& builder = "multi");

struct RestrictedSet {
  CandidateSet set;
  bool usable = true;  // false when fewer than two candidates remain
};

RestrictedSet restrict_systems(const CandidateSet& set, const std::set<SystemId>& excluded);

// Chosen is fixed to `chosen_system`; rejected is the lowest-scored remaining
// system. Emits only if that score is strictly below the chosen score.
// Throws InputError if `chosen_system` is not in the set.
std::optional<PreferencePair> build_fixed_chosen(const CandidateSet& set, const ScoreMap& scores,
                                                 const SystemId& chosen_system,
                                                 const std::string& metric,
                                                 const std::string& builder = "fixed-chosen");

struct BuildResult {
  corpus::PreferenceDataset dataset;
  std::size_t n_input = 0;
  std::size_t n_discarded = 0;  // n_input = pairs + n_discarded
};

enum class MultiRegime { kMulti, kMultiAblate, kFixedChosen };

struct MultiOptions {
  MultiRegime regime = MultiRegime::kMulti;
  std::set<SystemId> excluded;                 // multi-ablate
  std::optional<SystemId> chosen_system;       // fixed-chosen
};

// Applies one multi-system regime to every set (order preserved). Sets left
// with < 2 candidates after exclusion count as discarded.
BuildResult build_multi_dataset(std::span<const CandidateSet> sets,
                                std::span<const corpus::CandidateScores> scores,
                                const std::string& metric, const MultiOptions& options);

}  // namespace prefalign::prefbuild
