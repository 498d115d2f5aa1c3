// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "prefalign/error.hpp"
#include "prefalign/prefbuild/mono.hpp"

namespace prefalign::prefbuild {

std::optional<Calibration> evaluate_offsets(std::span<const RankedCandidates> pool,
                                            const OffsetConfig& config) {
  config.validate();
  Calibration c;
  c.config = config;
  double sum_chosen = 0.0;
  double sum_rejected = 0.0;
  for (const auto& rc : pool) {
    if (rc.sorted.empty()) {
      ++c.n_discarded;
      continue;
    }
    const double chosen = rc.at(chosen_index(rc, config.chosen)).score;
    const double rejected = rc.at(rejected_index(rc, config.rejected)).score;
    if (rejected < rc.base.score && rc.base.score < chosen) {
      sum_chosen += chosen;
      sum_rejected += rejected;
      ++c.n_emitted;
    } else {
      ++c.n_discarded;
    }
  }
  if (c.n_emitted == 0) return std::nullopt;
  c.achieved_chosen = sum_chosen / static_cast<double>(c.n_emitted);
  c.achieved_rejected = sum_rejected / static_cast<double>(c.n_emitted);
  return c;
}

Calibration calibrate_offsets(std::span<const RankedCandidates> pool, double target_chosen,
                              double target_rejected, const metrics::MetricId& metric) {
  if (pool.empty()) throw InputError("calibrate_offsets: empty pool");
  for (double t : {target_chosen, target_rejected}) {
    if (!(t >= metric.lo && t <= metric.hi)) {
      throw ParameterError("calibration target " + std::to_string(t) + " outside metric range of " +
                           metric.name);
    }
  }
  int k_max = 0;
  for (const auto& rc : pool) k_max = std::max(k_max, rc.k());

  std::optional<Calibration> best;
  for (int o_r = 1; o_r <= k_max; ++o_r) {
    for (int o_c = 1; o_c <= k_max; ++o_c) {
      auto c = evaluate_offsets(pool, {o_r, o_c});
      if (!c) continue;
      c->deviation = std::abs(c->achieved_chosen - target_chosen) +
                     std::abs(c->achieved_rejected - target_rejected);
      if (!best || c->deviation < best->deviation) best = c;
    }
  }
  if (!best) throw NoSolutionError("no offset configuration emits any preference pair");
  return *best;
}

}  // namespace prefalign::prefbuild
