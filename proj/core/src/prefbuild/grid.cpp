// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "prefalign/prefbuild/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "prefalign/error.hpp"
#include "prefalign/util/format.hpp"

namespace prefalign::prefbuild {

const char* to_string(QualityLevel level) {
  switch (level) {
    case QualityLevel::kLow:
      return "Low";
    case QualityLevel::kMid:
      return "Mid";
    case QualityLevel::kHigh:
      return "High";
  }
  return "?";
}

QualityLevel parse_level(const std::string& name) {
  if (name == "Low" || name == "low") return QualityLevel::kLow;
  if (name == "Mid" || name == "mid") return QualityLevel::kMid;
  if (name == "High" || name == "high") return QualityLevel::kHigh;
  throw ParameterError("unknown quality level '" + name + "'");
}

std::string grid_builder_tag(QualityLevel chosen, QualityLevel rejected) {
  return std::string("grid:chosen=") + to_string(chosen) + ",rejected=" + to_string(rejected);
}

void ResolvedBuckets::validate() const {
  auto check = [](const std::vector<QualityBucket>& buckets, Role role) {
    for (const auto& b : buckets) {
      if (b.role != role || b.offset < 1) throw ParameterError("malformed quality bucket");
    }
    for (std::size_t i = 0; i < buckets.size(); ++i) {
      for (std::size_t j = 0; j < buckets.size(); ++j) {
        if (static_cast<int>(buckets[i].level) >= static_cast<int>(buckets[j].level)) continue;
        // i is the lower level
        const bool ordered = role == Role::kChosen ? buckets[i].offset < buckets[j].offset
                                                   : buckets[i].offset > buckets[j].offset;
        if (!ordered) {
          throw ParameterError(std::string("bucket offsets for ") +
                               (role == Role::kChosen ? "chosen" : "rejected") +
                               " are not strictly ordered by level");
        }
      }
    }
  };
  check(chosen, Role::kChosen);
  check(rejected, Role::kRejected);
}

std::vector<double> role_curve(std::span<const RankedCandidates> pool, Role role) {
  int k_max = 0;
  for (const auto& rc : pool) k_max = std::max(k_max, rc.k());
  std::vector<double> curve(static_cast<std::size_t>(k_max),
                            std::numeric_limits<double>::quiet_NaN());
  for (int o = 1; o <= k_max; ++o) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& rc : pool) {
      if (rc.sorted.empty()) continue;
      if (role == Role::kChosen) {
        const double s = rc.at(chosen_index(rc, o)).score;
        if (s > rc.base.score) {
          sum += s;
          ++n;
        }
      } else {
        const double s = rc.at(rejected_index(rc, o)).score;
        if (s < rc.base.score) {
          sum += s;
          ++n;
        }
      }
    }
    if (n) curve[static_cast<std::size_t>(o - 1)] = sum / static_cast<double>(n);
  }
  return curve;
}

namespace {

std::array<double, 3> default_targets(const std::vector<double>& curve) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : curve) {
    if (std::isnan(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!std::isfinite(lo)) throw NoSolutionError("no candidate strictly beats or trails the base");
  return {lo + (hi - lo) / 6.0, lo + (hi - lo) / 2.0, lo + 5.0 * (hi - lo) / 6.0};
}

int closest_offset(const std::vector<double>& curve, double target) {
  int best = 1;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (std::isnan(curve[i])) continue;
    const double gap = std::abs(curve[i] - target);
    if (gap < best_gap) {
      best_gap = gap;
      best = static_cast<int>(i) + 1;
    }
  }
  return best;
}

// Makes offs strictly increasing within [1, k].
void spread_increasing(std::array<int, 3>& offs, int k) {
  for (std::size_t i = 1; i < offs.size(); ++i) offs[i] = std::max(offs[i], offs[i - 1] + 1);
  for (std::size_t i = offs.size(); i-- > 0;) {
    const int cap = k - static_cast<int>(offs.size() - 1 - i);
    offs[i] = std::min(offs[i], cap);
    if (i + 1 < offs.size()) offs[i] = std::min(offs[i], offs[i + 1] - 1);
  }
}

}  // namespace

ResolvedBuckets resolve_buckets(std::span<const RankedCandidates> pool,
                                const std::optional<BucketTargets>& targets) {
  if (pool.empty()) throw InputError("resolve_buckets: empty pool");
  const auto chosen_curve = role_curve(pool, Role::kChosen);
  const auto rejected_curve = role_curve(pool, Role::kRejected);
  const int k = static_cast<int>(chosen_curve.size());
  if (k < 3) throw ParameterError("three quality levels need at least K = 3 candidates");

  const auto chosen_targets = targets ? targets->chosen : default_targets(chosen_curve);
  const auto rejected_targets = targets ? targets->rejected : default_targets(rejected_curve);

  std::array<int, 3> chosen_offs{};
  std::array<int, 3> rejected_offs{};
  for (std::size_t i = 0; i < 3; ++i) {
    chosen_offs[i] = closest_offset(chosen_curve, chosen_targets[i]);
    rejected_offs[i] = closest_offset(rejected_curve, rejected_targets[i]);
  }
  spread_increasing(chosen_offs, k);
  // rejected: Low has the largest offset, so spread in High -> Low order
  std::array<int, 3> reversed{rejected_offs[2], rejected_offs[1], rejected_offs[0]};
  spread_increasing(reversed, k);
  rejected_offs = {reversed[2], reversed[1], reversed[0]};

  ResolvedBuckets out;
  for (std::size_t i = 0; i < 3; ++i) {
    out.chosen.push_back({kAllLevels[i], Role::kChosen, chosen_offs[i]});
    out.rejected.push_back({kAllLevels[i], Role::kRejected, rejected_offs[i]});
  }
  out.validate();
  return out;
}

GridResult build_quality_grid(std::span<const RankedCandidates> pool, const ResolvedBuckets& buckets,
                              const std::string& metric) {
  if (pool.empty()) throw InputError("build_quality_grid: empty pool");
  buckets.validate();
  GridResult grid;
  grid.buckets = buckets;
  for (const auto& cb : buckets.chosen) {
    for (const auto& rb : buckets.rejected) {
      GridCell cell{cb, rb, {}, std::numeric_limits<double>::quiet_NaN(),
                    std::numeric_limits<double>::quiet_NaN()};
      cell.result = build_mono_dataset(pool, OffsetConfig{rb.offset, cb.offset}, metric,
                                       grid_builder_tag(cb.level, rb.level));
      const auto& pairs = cell.result.dataset.pairs;
      if (!pairs.empty()) {
        double sc = 0.0;
        double sr = 0.0;
        for (const auto& p : pairs) {
          sc += p.chosen_score;
          sr += p.rejected_score;
        }
        cell.avg_chosen = sc / static_cast<double>(pairs.size());
        cell.avg_rejected = sr / static_cast<double>(pairs.size());
      }
      grid.cells.push_back(std::move(cell));
    }
  }
  return grid;
}

std::string grid_stats_csv(const GridResult& grid) {
  std::ostringstream out;
  out << "chosen_level,rejected_level,avg_chosen,avg_rejected,n_pairs,n_discarded\n";
  for (const auto& c : grid.cells) {
    out << to_string(c.chosen.level) << ',' << to_string(c.rejected.level) << ','
        << (std::isnan(c.avg_chosen) ? "nan" : util::fmt_fixed(c.avg_chosen, 4)) << ','
        << (std::isnan(c.avg_rejected) ? "nan" : util::fmt_fixed(c.avg_rejected, 4)) << ','
        << c.result.dataset.pairs.size() << ',' << c.result.n_discarded << '\n';
  }
  return out.str();
}

}  // namespace prefalign::prefbuild
