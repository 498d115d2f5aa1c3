// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prefalign/prefbuild/mono.hpp"

namespace prefalign::prefbuild {

enum class QualityLevel { kLow, kMid, kHigh };
enum class Role { kChosen, kRejected };

const char* to_string(QualityLevel level);
QualityLevel parse_level(const std::string& name);

inline constexpr std::array<QualityLevel, 3> kAllLevels = {QualityLevel::kLow, QualityLevel::kMid,
                                                           QualityLevel::kHigh};

struct QualityBucket {
  QualityLevel level = QualityLevel::kMid;
  Role role = Role::kChosen;
  int offset = 1;
};

// Target average scores for Low, Mid, High (in that order) per role.
struct BucketTargets {
  std::array<double, 3> chosen{};
  std::array<double, 3> rejected{};
};

struct ResolvedBuckets {
  std::vector<QualityBucket> chosen;
  std::vector<QualityBucket> rejected;

  // Throws ParameterError unless, per role, Low/Mid/High offsets sit at
  // strictly decreasing distance from that role's extreme: chosen offsets
  // strictly increase Low -> High, rejected offsets strictly decrease.
  void validate() const;
};

// Average score of the chosen side alone as a function of o_c (over segments
// where the selected candidate beats the base), and likewise for the rejected
// side as a function of o_r. Index 0 holds offset 1; entries with no valid
// segment are NaN.
std::vector<double> role_curve(std::span<const RankedCandidates> pool, Role role);

// Calibrates each bucket's offset to the offset whose role curve is closest
// to its target. Without explicit targets, the targets are the centers of
// three equal bands spanning the curve's range (1/6, 1/2, 5/6). Offsets are
// then nudged apart until strictly ordered. Needs K >= 3.
ResolvedBuckets resolve_buckets(std::span<const RankedCandidates> pool,
                                const std::optional<BucketTargets>& targets = std::nullopt);

struct GridCell {
  QualityBucket chosen;
  QualityBucket rejected;
  BuildResult result;
  double avg_chosen = 0.0;    // NaN when no pair was emitted
  double avg_rejected = 0.0;  // NaN when no pair was emitted
};

struct GridResult {
  std::vector<GridCell> cells;  // chosen-major: (Low,Low), (Low,Mid), ...
  ResolvedBuckets buckets;
};

// One mono-offset dataset per (chosen bucket, rejected bucket).
GridResult build_quality_grid(std::span<const RankedCandidates> pool, const ResolvedBuckets& buckets,
                              const std::string& metric);

// CSV: chosen_level,rejected_level,avg_chosen,avg_rejected,n_pairs,n_discarded
std::string grid_stats_csv(const GridResult& grid);

std::string grid_builder_tag(QualityLevel chosen, QualityLevel rejected);

}  // namespace prefalign::prefbuild
