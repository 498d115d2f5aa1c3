// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

// Random candidate pools and brute-force selection oracles.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "prefalign/corpus/types.hpp"
#include "prefalign/prefbuild/mono.hpp"

namespace prefalign::testing {

using corpus::Candidate;
using corpus::CandidateScores;
using corpus::CandidateSet;
using corpus::SystemId;

// Coarse integer scores so ties are common.
inline double coarse_score(std::mt19937_64& gen) {
  return static_cast<double>(std::uniform_int_distribution<int>(0, 6)(gen)) * 10.0;
}

// A multi-system set: base plus a random subset of {ref, ext:a, ext:b} and
// up to three samples, in shuffled order.
inline std::pair<CandidateSet, CandidateScores> random_multi_set(std::mt19937_64& gen,
                                                                 const std::string& id) {
  std::vector<SystemId> systems = {SystemId::base()};
  std::bernoulli_distribution coin(0.6);
  if (coin(gen)) systems.push_back(SystemId::reference());
  if (coin(gen)) systems.push_back(SystemId::external("a"));
  if (coin(gen)) systems.push_back(SystemId::external("b"));
  const int samples = std::uniform_int_distribution<int>(0, 3)(gen);
  for (int i = 1; i <= samples; ++i) systems.push_back(SystemId::sampled(i));
  if (systems.size() < 2) systems.push_back(SystemId::reference());
  std::shuffle(systems.begin(), systems.end(), gen);
  CandidateSet set{id, {}};
  CandidateScores scores{id, "m", {}};
  for (const auto& s : systems) {
    set.candidates.push_back({s, "text-" + s.str()});
    scores.scores.push_back(coarse_score(gen));
  }
  return {set, scores};
}

// Priority used to break score ties: ref, then ext (by name), base, then
// samples by index. Lower is preferred.
inline std::tuple<int, std::string, int> priority_key(const SystemId& s) {
  switch (s.kind()) {
    case SystemId::Kind::kReference:
      return {0, "", 0};
    case SystemId::Kind::kExternal:
      return {1, s.name(), 0};
    case SystemId::Kind::kBaseGreedy:
      return {2, "", 0};
    case SystemId::Kind::kSampled:
      return {3, "", s.index()};
  }
  return {4, "", 0};
}

struct Selection {
  std::size_t best = 0;
  std::size_t worst = 0;
  bool emitted = false;
};

// Brute force over all candidates: the best is the one no other candidate
// beats (higher score, or equal score with better priority).
inline Selection brute_force_extremes(const CandidateSet& set, const CandidateScores& scores,
                                      const std::vector<bool>& include) {
  Selection sel;
  const std::size_t n = set.candidates.size();
  bool have = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!include[i]) continue;
    bool beaten = false, undercut = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (!include[j] || j == i) continue;
      const auto pi = priority_key(set.candidates[i].system);
      const auto pj = priority_key(set.candidates[j].system);
      if (scores.scores[j] > scores.scores[i] || (scores.scores[j] == scores.scores[i] && pj < pi)) beaten = true;
      if (scores.scores[j] < scores.scores[i] || (scores.scores[j] == scores.scores[i] && pj < pi)) undercut = true;
    }
    if (!beaten) sel.best = i;
    if (!undercut) sel.worst = i;
    have = true;
  }
  sel.emitted = have && scores.scores[sel.best] > scores.scores[sel.worst];
  return sel;
}

// K sampled candidates and a base with coarse scores.
inline prefbuild::RankedCandidates random_ranked(std::mt19937_64& gen, const std::string& id, int k) {
  std::vector<prefbuild::ScoredCandidate> sampled;
  for (int i = 1; i <= k; ++i) {
    sampled.push_back({{SystemId::sampled(i), "s" + std::to_string(i)}, coarse_score(gen)});
  }
  return prefbuild::rank_candidates(id, sampled, {{SystemId::base(), "base"}, coarse_score(gen)});
}

// Exhaustive evaluation written without the library's evaluate_offsets.
struct OracleCalibration {
  int o_r = 0, o_c = 0;
  double deviation = std::numeric_limits<double>::infinity();
  double chosen = 0, rejected = 0;
};

inline OracleCalibration calibration_grid_oracle(const std::vector<prefbuild::RankedCandidates>& pool, double tc, double tr) {
  int k = 0;
  for (const auto& rc : pool) k = std::max(k, rc.k());
  OracleCalibration best;
  for (int o_r = 1; o_r <= k; ++o_r) {
    for (int o_c = 1; o_c <= k; ++o_c) {
      double sc = 0, sr = 0;
      int n = 0;
      for (const auto& rc : pool) {
        const int ci = std::min(rc.k(), rc.base_rank + o_c - 1);
        const int ri = std::max(1, rc.base_rank - o_r);
        const double c = rc.sorted[static_cast<std::size_t>(ci - 1)].score;
        const double r = rc.sorted[static_cast<std::size_t>(ri - 1)].score;
        if (r < rc.base.score && rc.base.score < c) {
          sc += c;
          sr += r;
          ++n;
        }
      }
      if (n == 0) continue;
      const double dev = std::abs(sc / n - tc) + std::abs(sr / n - tr);
      if (dev < best.deviation) best = {o_r, o_c, dev, sc / n, sr / n};
    }
  }
  return best;
}

}  // namespace prefalign::testing
