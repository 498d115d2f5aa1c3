// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "pools.hpp"
#include "prefalign/error.hpp"
#include "prefalign/metrics/metric.hpp"
#include "prefalign/prefbuild/builders.hpp"
#include "prefalign/prefbuild/grid.hpp"
#include "prefalign/prefbuild/mono.hpp"

namespace prefalign::prefbuild {
namespace {

using corpus::CandidateScores;

const SystemId kRef = SystemId::reference();
const SystemId kBase = SystemId::base();
const SystemId kExt = SystemId::external("mt");

CandidateSet triple() { return {"s", {{kBase, "b"}, {kExt, "g"}, {kRef, "r"}}}; }

ScoreMap scores(double base, double ext, double ref) { return {{kBase, base}, {kExt, ext}, {kRef, ref}}; }

std::vector<ScoredCandidate> sampled(const std::vector<double>& s) {
  std::vector<ScoredCandidate> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.push_back({{SystemId::sampled(static_cast<int>(i) + 1), "s" + std::to_string(i + 1)}, s[i]});
  }
  return out;
}

ScoredCandidate base_at(double s) { return {{kBase, "base"}, s}; }

TEST(MultiSystem, BaseExternalReferenceTriples) {
  auto p = build_multi_system(triple(), scores(71.5, 83.25, 64.0), "m");
  ASSERT_TRUE(p);
  EXPECT_EQ(p->chosen.system, kExt);
  EXPECT_EQ(p->rejected.system, kRef);
  EXPECT_EQ(p->chosen_score, 83.25);

  p = build_multi_system(triple(), scores(50, 40, 60), "m");
  ASSERT_TRUE(p);
  EXPECT_EQ(p->chosen.system, kRef);
  EXPECT_EQ(p->rejected.system, kExt);

  EXPECT_FALSE(build_multi_system(triple(), scores(7, 7, 7), "m"));
  EXPECT_THROW(build_multi_system(triple(), {{kBase, 1}, {kRef, 2}}, "m"), InputError);
}

TEST(MultiSystem, TiesFollowSystemPriority) {
  // ref > ext > base on equal scores, for both extremes
  auto p = build_multi_system(triple(), scores(90, 90, 10), "m");
  ASSERT_TRUE(p);
  EXPECT_EQ(p->chosen.system, kExt);
  p = build_multi_system(triple(), scores(10, 90, 10), "m");
  ASSERT_TRUE(p);
  EXPECT_EQ(p->rejected.system, kRef);
  EXPECT_TRUE(higher_priority(kRef, kExt));
  EXPECT_TRUE(higher_priority(kExt, kBase));
  EXPECT_TRUE(higher_priority(kBase, SystemId::sampled(1)));
}

TEST(MultiSystem, MatchesBruteForceAndIsOrderIndependent) {
  std::mt19937_64 gen(2024);
  for (int i = 0; i < 3000; ++i) {
    auto [set, sc] = testing::random_multi_set(gen, "s" + std::to_string(i));
    const auto sel = testing::brute_force_extremes(set, sc, std::vector<bool>(set.candidates.size(), true));
    const auto p = build_multi_system(set, score_map(set, sc), "m");
    ASSERT_EQ(p.has_value(), sel.emitted);
    if (!p) continue;
    EXPECT_EQ(p->chosen, set.candidates[sel.best]);
    EXPECT_EQ(p->rejected, set.candidates[sel.worst]);
    EXPECT_GT(p->chosen_score, p->rejected_score);
    std::reverse(set.candidates.begin(), set.candidates.end());
    std::reverse(sc.scores.begin(), sc.scores.end());
    EXPECT_EQ(build_multi_system(set, score_map(set, sc), "m"), p);
  }
}

TEST(Restrict, Examples) {
  auto r = restrict_systems(triple(), {kRef});
  EXPECT_TRUE(r.usable);
  ASSERT_EQ(r.set.candidates.size(), 2u);
  EXPECT_EQ(r.set.candidates[0].system, kBase);
  EXPECT_EQ(r.set.candidates[1].system, kExt);
  EXPECT_EQ(restrict_systems(triple(), {}).set, triple());
  EXPECT_FALSE(restrict_systems(triple(), {kRef, kExt}).usable);
}

TEST(FixedChosen, Examples) {
  const ScoreMap t6 = scores(71.5, 83.25, 64.0);
  EXPECT_FALSE(build_fixed_chosen(triple(), t6, kRef, "m"));
  const auto p = build_fixed_chosen(triple(), t6, kExt, "m");
  ASSERT_TRUE(p);
  EXPECT_EQ(p->rejected.system, kRef);
  EXPECT_FALSE(build_fixed_chosen(triple(), scores(5, 5, 5), kExt, "m"));
  EXPECT_THROW(build_fixed_chosen(triple(), t6, SystemId::external("nope"), "m"), InputError);
}

TEST(MultiDataset, CountsAndRegimes) {
  std::mt19937_64 gen(5);
  std::vector<CandidateSet> sets;
  std::vector<CandidateScores> sc;
  for (int i = 0; i < 500; ++i) {
    auto [s, c] = testing::random_multi_set(gen, "s" + std::to_string(i));
    if (!s.find(kRef)) {
      s.candidates.push_back({kRef, "r"});
      c.scores.push_back(testing::coarse_score(gen));
    }
    sets.push_back(s);
    sc.push_back(c);
  }
  for (const auto& opts : {MultiOptions{}, MultiOptions{MultiRegime::kMultiAblate, {kRef}, {}},
                           MultiOptions{MultiRegime::kFixedChosen, {}, kRef}}) {
    const auto r = build_multi_dataset(sets, sc, "m", opts);
    EXPECT_EQ(r.n_input, sets.size());
    EXPECT_EQ(r.dataset.pairs.size() + r.n_discarded, r.n_input);
    for (const auto& p : r.dataset.pairs) {
      EXPECT_GT(p.chosen_score, p.rejected_score);
      if (opts.regime == MultiRegime::kMultiAblate) {
        EXPECT_NE(p.chosen.system, kRef);
        EXPECT_NE(p.rejected.system, kRef);
      }
      if (opts.regime == MultiRegime::kFixedChosen) EXPECT_EQ(p.chosen.system, kRef);
    }
  }
  EXPECT_THROW(build_multi_dataset(sets, sc, "m", MultiOptions{MultiRegime::kFixedChosen, {}, {}}),
               ParameterError);
}

TEST(Rank, BaseRankAndStableOrder) {
  auto rc = rank_candidates("s", sampled({1, 3, 3, 5}), base_at(3));
  EXPECT_EQ(rc.base_rank, 2);
  EXPECT_EQ(rank_candidates("s", sampled({4, 5}), base_at(1)).base_rank, 1);
  EXPECT_EQ(rank_candidates("s", sampled({4, 5}), base_at(9)).base_rank, 3);

  rc = rank_candidates("s", sampled({5, 2, 5, 2, 1}), base_at(0));
  std::vector<int> order;
  for (const auto& c : rc.sorted) order.push_back(c.candidate.system.index());
  EXPECT_EQ(order, (std::vector<int>{5, 2, 4, 1, 3}));
}

TEST(Rank, PermutationAndInvariantOnRandomPools) {
  std::mt19937_64 gen(8);
  for (int i = 0; i < 2000; ++i) {
    const int k = std::uniform_int_distribution<int>(1, 12)(gen);
    const auto rc = testing::random_ranked(gen, "s", k);
    ASSERT_EQ(rc.k(), k);
    std::set<int> idx;
    int below = 0;
    for (int r = 1; r <= k; ++r) {
      idx.insert(rc.at(r).candidate.system.index());
      if (r > 1) EXPECT_LE(rc.at(r - 1).score, rc.at(r).score);
      below += rc.at(r).score < rc.base.score;
    }
    EXPECT_EQ(static_cast<int>(idx.size()), k);
    EXPECT_EQ(rc.base_rank, 1 + below);
  }
}

TEST(MonoOffset, FormulaExamples) {
  // K=5, b=3
  const auto rc = rank_candidates("s", sampled({10, 20, 40, 50, 60}), base_at(30));
  ASSERT_EQ(rc.base_rank, 3);
  EXPECT_EQ(chosen_index(rc, 1), 3);
  EXPECT_EQ(rejected_index(rc, 2), 1);
  const auto p = build_mono_offset(rc, {2, 1}, "m");
  ASSERT_TRUE(p);
  EXPECT_EQ(p->chosen_score, 40);
  EXPECT_EQ(p->rejected_score, 10);

  const auto top = rank_candidates("s", sampled({1, 2, 3, 4, 5}), base_at(9));
  EXPECT_EQ(top.base_rank, 6);
  EXPECT_FALSE(build_mono_offset(top, {1, 1}, "m"));

  std::vector<double> fifty;
  for (int i = 1; i <= 50; ++i) fifty.push_back(i < 25 ? i : i + 1);
  const auto big = rank_candidates("s", sampled(fifty), base_at(25));
  ASSERT_EQ(big.base_rank, 25);
  EXPECT_EQ(chosen_index(big, 100), 50);
  EXPECT_EQ(rejected_index(big, 100), 1);
  EXPECT_THROW(build_mono_offset(big, {0, 1}, "m"), ParameterError);
}

TEST(MonoOffset, OrderingHoldsForEveryEmittedPair) {
  std::mt19937_64 gen(31);
  std::vector<RankedCandidates> pool;
  for (int i = 0; i < 3000; ++i) pool.push_back(testing::random_ranked(gen, "s" + std::to_string(i), 8));
  for (int o_r = 1; o_r <= 9; o_r += 2) {
    for (int o_c = 1; o_c <= 9; o_c += 2) {
      const auto r = build_mono_dataset(pool, {o_r, o_c}, "m");
      EXPECT_EQ(r.dataset.pairs.size() + r.n_discarded, pool.size());
      std::size_t j = 0;
      for (const auto& rc : pool) {
        const auto p = build_mono_offset(rc, {o_r, o_c}, "m");
        if (!p) continue;
        ASSERT_LT(j, r.dataset.pairs.size());
        EXPECT_EQ(r.dataset.pairs[j++], *p);
        EXPECT_LT(p->rejected_score, rc.base.score);
        EXPECT_LT(rc.base.score, p->chosen_score);
      }
    }
  }
}

TEST(Calibrate, AgreesWithGridSearchOnLinearPools) {
  const metrics::MetricId id{"m", true, true, 0, 100};
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 10;
    std::vector<RankedCandidates> pool;
    for (int s = 0; s < 40; ++s) {
      std::vector<double> lin;
      for (int i = 1; i <= k; ++i) lin.push_back(10.0 * i);
      const double base = 10.0 * std::uniform_int_distribution<int>(2, k - 1)(gen) + 5.0;
      pool.push_back(rank_candidates("s" + std::to_string(s), sampled(lin), base_at(base)));
    }
    const double tc = std::uniform_real_distribution<double>(60, 100)(gen);
    const double tr = std::uniform_real_distribution<double>(10, 50)(gen);
    const auto cal = calibrate_offsets(pool, tc, tr, id);
    const auto oracle = testing::calibration_grid_oracle(pool, tc, tr);
    EXPECT_EQ(cal.config.rejected, oracle.o_r);
    EXPECT_EQ(cal.config.chosen, oracle.o_c);
    EXPECT_NEAR(cal.deviation, oracle.deviation, 1e-9);
    EXPECT_EQ(cal.n_emitted + cal.n_discarded, pool.size());
  }
}

TEST(Calibrate, FixedPointAndFailures) {
  const metrics::MetricId id{"m", true, true, 0, 100};
  // every segment identical: K=4 scores 10..40, base 25 -> b = 3
  std::vector<RankedCandidates> pool(5, rank_candidates("s", sampled({10, 20, 30, 40}), base_at(25)));
  const auto cal = calibrate_offsets(pool, 40, 20, id);
  EXPECT_EQ(cal.deviation, 0.0);
  EXPECT_EQ(cal.config.chosen, 2);
  EXPECT_EQ(cal.config.rejected, 1);

  std::vector<RankedCandidates> flat(3, rank_candidates("s", sampled({5, 5, 5}), base_at(5)));
  EXPECT_THROW(calibrate_offsets(flat, 50, 40, id), NoSolutionError);
  EXPECT_THROW(calibrate_offsets(pool, 150, 40, id), ParameterError);
  EXPECT_THROW(calibrate_offsets({}, 50, 40, id), InputError);
}

std::vector<RankedCandidates> spread_pool(int n, int k, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0, 15);
  std::vector<RankedCandidates> pool;
  for (int s = 0; s < n; ++s) {
    std::vector<double> v;
    for (int i = 0; i < k; ++i) v.push_back(std::round(50 + noise(gen)));
    pool.push_back(rank_candidates("s" + std::to_string(s), sampled(v), base_at(std::round(50 + noise(gen) / 3))));
  }
  return pool;
}

TEST(Grid, ShapeTagsAndMonotoneChosenQuality) {
  const auto pool = spread_pool(400, 16, 77);
  const auto buckets = resolve_buckets(pool);
  EXPECT_NO_THROW(buckets.validate());
  const auto grid = build_quality_grid(pool, buckets, "m");
  ASSERT_EQ(grid.cells.size(), 9u);
  std::set<std::string> tags;
  for (const auto& c : grid.cells) {
    ASSERT_FALSE(c.result.dataset.pairs.empty());
    tags.insert(c.result.dataset.pairs.front().builder);
    EXPECT_EQ(c.result.dataset.pairs.size() + c.result.n_discarded, pool.size());
  }
  EXPECT_EQ(tags.size(), 9u);
  // recompute averages from the emitted pairs
  auto avg_chosen = [&](std::size_t ci, std::size_t ri) {
    const auto& pairs = grid.cells[ci * 3 + ri].result.dataset.pairs;
    double s = 0;
    for (const auto& p : pairs) s += p.chosen_score;
    return s / static_cast<double>(pairs.size());
  };
  for (std::size_t r = 0; r < 3; ++r) {
    EXPECT_LE(avg_chosen(0, r), avg_chosen(1, r));
    EXPECT_LE(avg_chosen(1, r), avg_chosen(2, r));
    EXPECT_NEAR(avg_chosen(0, r), grid.cells[r].avg_chosen, 1e-9);
  }
  const std::string csv = grid_stats_csv(grid);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "chosen_level,rejected_level,avg_chosen,avg_rejected,n_pairs,n_discarded");
}

TEST(Grid, SingleCellEqualsMonoOffset) {
  const auto pool = spread_pool(100, 8, 3);
  ResolvedBuckets one;
  one.chosen = {{QualityLevel::kHigh, Role::kChosen, 4}};
  one.rejected = {{QualityLevel::kLow, Role::kRejected, 3}};
  const auto grid = build_quality_grid(pool, one, "m");
  ASSERT_EQ(grid.cells.size(), 1u);
  const auto mono = build_mono_dataset(pool, {3, 4}, "m", grid_builder_tag(QualityLevel::kHigh, QualityLevel::kLow));
  EXPECT_EQ(grid.cells[0].result.dataset.pairs, mono.dataset.pairs);
  EXPECT_EQ(grid.cells[0].result.n_discarded, mono.n_discarded);
}

TEST(Grid, BucketOrderingIsEnforced) {
  ResolvedBuckets bad;
  bad.chosen = {{QualityLevel::kLow, Role::kChosen, 5}, {QualityLevel::kHigh, Role::kChosen, 2}};
  EXPECT_THROW(bad.validate(), ParameterError);
  ResolvedBuckets bad_r;
  bad_r.rejected = {{QualityLevel::kLow, Role::kRejected, 1}, {QualityLevel::kHigh, Role::kRejected, 3}};
  EXPECT_THROW(bad_r.validate(), ParameterError);
  EXPECT_EQ(parse_level("High"), QualityLevel::kHigh);
  EXPECT_THROW(parse_level("Top"), ParameterError);
}

}  // namespace
}  // namespace prefalign::prefbuild
