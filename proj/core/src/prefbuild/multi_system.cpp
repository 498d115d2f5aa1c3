// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <tuple>

#include "prefalign/error.hpp"
#include "prefalign/prefbuild/builders.hpp"

namespace prefalign::prefbuild {

namespace {

int kind_rank(SystemId::Kind k) {
  switch (k) {
    case SystemId::Kind::kReference:
      return 0;
    case SystemId::Kind::kExternal:
      return 1;
    case SystemId::Kind::kBaseGreedy:
      return 2;
    case SystemId::Kind::kSampled:
      return 3;
  }
  return 4;
}

double lookup(const ScoreMap& scores, const Candidate& c, const std::string& segment_id) {
  const auto it = scores.find(c.system);
  if (it == scores.end()) {
    throw InputError("segment '" + segment_id + "': no score for system " + c.system.str());
  }
  return it->second;
}

struct Extremes {
  const Candidate* best = nullptr;
  const Candidate* worst = nullptr;
  double best_score = 0.0;
  double worst_score = 0.0;
};

// Scan in candidate order; a tie replaces the incumbent only if the newcomer
// has higher priority, so the result is independent of input order.
template <typename Pred>
Extremes extremes(const CandidateSet& set, const ScoreMap& scores, Pred include) {
  Extremes e;
  for (const auto& c : set.candidates) {
    if (!include(c)) continue;
    const double s = lookup(scores, c, set.segment_id);
    if (!e.best || s > e.best_score || (s == e.best_score && higher_priority(c.system, e.best->system))) {
      e.best = &c;
      e.best_score = s;
    }
    if (!e.worst || s < e.worst_score ||
        (s == e.worst_score && higher_priority(c.system, e.worst->system))) {
      e.worst = &c;
      e.worst_score = s;
    }
  }
  return e;
}

}  // namespace

bool higher_priority(const SystemId& a, const SystemId& b) {
  return std::make_tuple(kind_rank(a.kind()), a.name(), a.index()) <
         std::make_tuple(kind_rank(b.kind()), b.name(), b.index());
}

ScoreMap score_map(const CandidateSet& set, const corpus::CandidateScores& scores) {
  if (set.segment_id != scores.segment_id) {
    throw InputError("scores for '" + scores.segment_id + "' paired with candidates for '" +
                     set.segment_id + "'");
  }
  if (set.candidates.size() != scores.scores.size()) {
    throw InputError("segment '" + set.segment_id + "': " + std::to_string(scores.scores.size()) +
                     " scores for " + std::to_string(set.candidates.size()) + " candidates");
  }
  ScoreMap map;
  for (std::size_t i = 0; i < set.candidates.size(); ++i) {
    map[set.candidates[i].system] = scores.scores[i];
  }
  return map;
}

std::optional<PreferencePair> build_multi_system(const CandidateSet& set, const ScoreMap& scores,
                                                 const std::string& metric,
                                                 const std::string& builder) {
  if (set.candidates.size() < 2) {
    throw InputError("segment '" + set.segment_id + "': need at least 2 candidates");
  }
  const auto e = extremes(set, scores, [](const Candidate&) { return true; });
  if (!(e.best_score > e.worst_score)) return std::nullopt;
  return PreferencePair{set.segment_id, *e.best, *e.worst, e.best_score, e.worst_score, metric,
                        builder};
}

RestrictedSet restrict_systems(const CandidateSet& set, const std::set<SystemId>& excluded) {
  RestrictedSet out;
  out.set.segment_id = set.segment_id;
  for (const auto& c : set.candidates) {
    if (!excluded.contains(c.system)) out.set.candidates.push_back(c);
  }
  out.usable = out.set.candidates.size() >= 2;
  return out;
}

std::optional<PreferencePair> build_fixed_chosen(const CandidateSet& set, const ScoreMap& scores,
                                                 const SystemId& chosen_system,
                                                 const std::string& metric,
                                                 const std::string& builder) {
  const Candidate* chosen = set.find(chosen_system);
  if (!chosen) {
    throw InputError("segment '" + set.segment_id + "': chosen system " + chosen_system.str() +
                     " not among candidates");
  }
  const double chosen_score = lookup(scores, *chosen, set.segment_id);
  const auto e =
      extremes(set, scores, [&](const Candidate& c) { return !(c.system == chosen_system); });
  if (!e.worst || !(e.worst_score < chosen_score)) return std::nullopt;
  return PreferencePair{set.segment_id, *chosen, *e.worst, chosen_score, e.worst_score, metric,
                        builder};
}

BuildResult build_multi_dataset(std::span<const CandidateSet> sets,
                                std::span<const corpus::CandidateScores> scores,
                                const std::string& metric, const MultiOptions& options) {
  if (sets.size() != scores.size()) {
    throw InputError("candidate sets and score records differ in count");
  }
  BuildResult result;
  result.n_input = sets.size();
  std::string tag;
  switch (options.regime) {
    case MultiRegime::kMulti:
      tag = "multi";
      break;
    case MultiRegime::kMultiAblate: {
      tag = "multi-ablate[";
      bool first = true;
      for (const auto& s : options.excluded) {
        tag += (first ? "-" : ",-") + s.str();
        first = false;
      }
      tag += "]";
      break;
    }
    case MultiRegime::kFixedChosen:
      if (!options.chosen_system) throw ParameterError("fixed-chosen regime needs chosen_system");
      tag = "fixed-chosen:" + options.chosen_system->str();
      break;
  }
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const ScoreMap map = score_map(sets[i], scores[i]);
    std::optional<PreferencePair> pair;
    if (options.regime == MultiRegime::kFixedChosen) {
      pair = build_fixed_chosen(sets[i], map, *options.chosen_system, metric, tag);
    } else {
      const auto restricted = restrict_systems(sets[i], options.excluded);
      if (restricted.usable) pair = build_multi_system(restricted.set, map, metric, tag);
    }
    if (pair) {
      result.dataset.pairs.push_back(std::move(*pair));
    } else {
      ++result.n_discarded;
    }
  }
  result.dataset.metadata = {{"metric", metric}, {"builder", tag}};
  return result;
}

}  // namespace prefalign::prefbuild
