// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "prefalign/error.hpp"
#include "prefalign/prefbuild/mono.hpp"

namespace prefalign::prefbuild {

RankedCandidates rank_candidates(std::string segment_id, std::span<const ScoredCandidate> sampled,
                                 ScoredCandidate base) {
  if (sampled.empty()) {
    throw InputError("segment '" + segment_id + "': no sampled candidates to rank");
  }
  RankedCandidates rc;
  rc.segment_id = std::move(segment_id);
  rc.sorted.assign(sampled.begin(), sampled.end());
  std::stable_sort(rc.sorted.begin(), rc.sorted.end(),
                   [](const ScoredCandidate& a, const ScoredCandidate& b) { return a.score < b.score; });
  const auto below = std::count_if(rc.sorted.begin(), rc.sorted.end(),
                                   [&](const ScoredCandidate& c) { return c.score < base.score; });
  rc.base_rank = 1 + static_cast<int>(below);
  rc.base = std::move(base);
  return rc;
}

RankedCandidates rank_candidate_set(const CandidateSet& set, const corpus::CandidateScores& scores) {
  if (set.candidates.size() != scores.scores.size() || set.segment_id != scores.segment_id) {
    throw InputError("segment '" + set.segment_id + "': scores do not match candidates");
  }
  std::optional<ScoredCandidate> base;
  std::vector<ScoredCandidate> sampled;
  for (std::size_t i = 0; i < set.candidates.size(); ++i) {
    const auto& c = set.candidates[i];
    if (c.system.kind() == SystemId::Kind::kBaseGreedy) {
      base = ScoredCandidate{c, scores.scores[i]};
    } else if (c.system.kind() == SystemId::Kind::kSampled) {
      sampled.push_back({c, scores.scores[i]});
    }
  }
  if (!base) throw InputError("segment '" + set.segment_id + "': no base candidate");
  // keep sample-index order so stable sorting breaks ties by index
  std::stable_sort(sampled.begin(), sampled.end(), [](const auto& a, const auto& b) {
    return a.candidate.system.index() < b.candidate.system.index();
  });
  return rank_candidates(set.segment_id, sampled, std::move(*base));
}

void OffsetConfig::validate() const {
  if (rejected < 1 || chosen < 1) {
    throw ParameterError("offsets must be >= 1 (got o_r=" + std::to_string(rejected) +
                         ", o_c=" + std::to_string(chosen) + ")");
  }
}

int chosen_index(const RankedCandidates& rc, int chosen_offset) {
  return std::min(rc.k(), rc.base_rank + chosen_offset - 1);
}

int rejected_index(const RankedCandidates& rc, int rejected_offset) {
  return std::max(1, rc.base_rank - rejected_offset);
}

std::optional<PreferencePair> build_mono_offset(const RankedCandidates& rc,
                                                const OffsetConfig& config,
                                                const std::string& metric,
                                                const std::string& builder) {
  config.validate();
  if (rc.sorted.empty()) return std::nullopt;
  const auto& chosen = rc.at(chosen_index(rc, config.chosen));
  const auto& rejected = rc.at(rejected_index(rc, config.rejected));
  if (!(rejected.score < rc.base.score && rc.base.score < chosen.score)) return std::nullopt;
  return PreferencePair{rc.segment_id, chosen.candidate, rejected.candidate, chosen.score,
                        rejected.score,  metric,           builder};
}

BuildResult build_mono_dataset(std::span<const RankedCandidates> pool, const OffsetConfig& config,
                               const std::string& metric, const std::string& builder) {
  BuildResult result;
  result.n_input = pool.size();
  for (const auto& rc : pool) {
    if (auto pair = build_mono_offset(rc, config, metric, builder)) {
      result.dataset.pairs.push_back(std::move(*pair));
    } else {
      ++result.n_discarded;
    }
  }
  result.dataset.metadata = {{"metric", metric},
                             {"builder", builder},
                             {"o_r", std::to_string(config.rejected)},
                             {"o_c", std::to_string(config.chosen)}};
  return result;
}

}  // namespace prefalign::prefbuild
