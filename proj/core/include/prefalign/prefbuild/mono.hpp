// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prefalign/corpus/types.hpp"
#include "prefalign/metrics/metric.hpp"
#include "prefalign/prefbuild/builders.hpp"

namespace prefalign::prefbuild {

struct ScoredCandidate {
  Candidate candidate;
  double score = 0.0;
};

// Sampled candidates sorted ascending by score (stable: earlier samples first
// among equal scores) together with the base translation and its rank.
//
// base_rank b is 1 + the number of sampled candidates scoring strictly below
// the base, so b is in [1, K+1] and sorted[b-1] (1-based: y^b) is the first
// candidate at or above the base.
struct RankedCandidates {
  std::string segment_id;
  std::vector<ScoredCandidate> sorted;
  ScoredCandidate base;
  int base_rank = 1;

  int k() const { return static_cast<int>(sorted.size()); }
  // 1-based access, matching the offset formulas.
  const ScoredCandidate& at(int rank) const { return sorted[static_cast<std::size_t>(rank - 1)]; }
};

RankedCandidates rank_candidates(std::string segment_id, std::span<const ScoredCandidate> sampled,
                                 ScoredCandidate base);

// Splits a scored candidate set into the base candidate and its samples.
// Throws InputError if the set lacks a base candidate or samples.
RankedCandidates rank_candidate_set(const CandidateSet& set, const corpus::CandidateScores& scores);

struct OffsetConfig {
  int rejected = 1;  // o^r >= 1
  int chosen = 1;    // o^c >= 1

  void validate() const;
  auto operator<=>(const OffsetConfig&) const = default;
};

// 1-based indices selected by the offsets, after clamping to [1, K]:
// chosen = min(K, b + o_c - 1), rejected = max(1, b - o_r).
int chosen_index(const RankedCandidates& rc, int chosen_offset);
int rejected_index(const RankedCandidates& rc, int rejected_offset);

// Emits the pair only if rejected < base < chosen holds strictly.
std::optional<PreferencePair> build_mono_offset(const RankedCandidates& rc,
                                                const OffsetConfig& config,
                                                const std::string& metric,
                                                const std::string& builder = "mono-offset");

BuildResult build_mono_dataset(std::span<const RankedCandidates> pool, const OffsetConfig& config,
                               const std::string& metric,
                               const std::string& builder = "mono-offset");

struct Calibration {
  OffsetConfig config;
  double achieved_chosen = 0.0;
  double achieved_rejected = 0.0;
  double deviation = 0.0;  // |chosen - target| + |rejected - target|
  std::size_t n_emitted = 0;
  std::size_t n_discarded = 0;
};

// Exhaustive search over o_r, o_c in [1, K_max] minimizing the deviation of
// the emitted pairs' average scores from the targets. Ties go to the
// lexicographically smaller (o_r, o_c). Throws ParameterError for targets
// outside the metric range and NoSolutionError when every configuration
// discards every sample.
Calibration calibrate_offsets(std::span<const RankedCandidates> pool, double target_chosen,
                              double target_rejected, const metrics::MetricId& metric);

// Average emitted scores for a fixed configuration; nullopt if none emitted.
std::optional<Calibration> evaluate_offsets(std::span<const RankedCandidates> pool,
                                            const OffsetConfig& config);

}  // namespace prefalign::prefbuild
