// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "prefalign/corpus/synthetic.hpp"
#include "prefalign/error.hpp"
#include "prefalign/eval/eval.hpp"
#include "prefalign/eval/pipeline.hpp"
#include "prefalign/metrics/metric.hpp"

namespace prefalign::eval {
namespace {

using corpus::Direction;

TEST(StudentT, UpperTailMatchesBoost) {
  for (int df = 2; df <= 50; ++df) {
    for (double t = 0.5; t <= 5.0 + 1e-9; t += 0.25) {
      ASSERT_NEAR(student_t_upper_tail(t, df), testing::t_upper_tail_oracle(t, df), 1e-6)
          << "t=" << t << " df=" << df;
    }
  }
  EXPECT_NEAR(student_t_upper_tail(0.0, 7), 0.5, 1e-12);
  EXPECT_NEAR(student_t_upper_tail(-1.3, 9), 1.0 - testing::t_upper_tail_oracle(1.3, 9), 1e-9);
}

TEST(StudentT, IncompleteBetaMatchesBoost) {
  for (double a : {0.5, 1.0, 2.5, 10.0}) {
    for (double b : {0.5, 3.0, 20.0}) {
      for (double x : {0.0, 0.01, 0.3, 0.5, 0.9, 1.0}) {
        EXPECT_NEAR(regularized_incomplete_beta(a, b, x), boost::math::ibeta(a, b, x), 1e-10);
      }
    }
  }
}

TEST(PairedT, KnownExample) {
  const std::vector<double> a = {2, 4, 6, 8, 10};
  const std::vector<double> b = {1, 2, 3, 4, 5};
  // d = 1..5: mean 3, sd sqrt(2.5), t = 3 / (sqrt(2.5) / sqrt(5)) = sqrt(18)
  const auto r = paired_t_test(a, b);
  EXPECT_NEAR(r.t, std::sqrt(18.0), 1e-12);
  EXPECT_EQ(r.df, 4);
  EXPECT_NEAR(r.p_one_tailed, testing::t_upper_tail_oracle(std::sqrt(18.0), 4), 1e-9);
  EXPECT_NEAR(r.p_one_tailed, 0.0066, 5e-5);
  EXPECT_TRUE(r.significant);
  EXPECT_DOUBLE_EQ(r.mean_diff, 3.0);
}

TEST(PairedT, AntisymmetryAndOrderInvariance) {
  std::mt19937_64 gen(13);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 20;
    std::vector<double> a, b;
    for (int i = 0; i < n; ++i) {
      a.push_back(nd(gen) + 0.3);
      b.push_back(nd(gen));
    }
    const auto ab = paired_t_test(a, b);
    const auto ba = paired_t_test(b, a);
    EXPECT_NEAR(ab.t, -ba.t, 1e-12);
    EXPECT_NEAR(ab.p_one_tailed + ba.p_one_tailed, 1.0, 1e-9);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), gen);
    std::vector<double> a2, b2;
    for (auto i : order) {
      a2.push_back(a[i]);
      b2.push_back(b[i]);
    }
    EXPECT_NEAR(paired_t_test(a2, b2).t, ab.t, 1e-9);
  }
}

TEST(PairedT, DegenerateAndInvalidInputs) {
  const std::vector<double> a = {3, 4, 5};
  const std::vector<double> up = {2, 3, 4};
  const auto r = paired_t_test(a, up);
  EXPECT_TRUE(r.degenerate_variance);
  EXPECT_EQ(r.t, std::numeric_limits<double>::infinity());
  EXPECT_EQ(r.p_one_tailed, 0.0);
  EXPECT_TRUE(r.significant);
  const auto down = paired_t_test(up, a);
  EXPECT_TRUE(down.degenerate_variance);
  EXPECT_EQ(down.p_one_tailed, 1.0);
  const auto same = paired_t_test(a, a);
  EXPECT_FALSE(same.degenerate_variance);
  EXPECT_EQ(same.t, 0.0);
  EXPECT_EQ(same.p_one_tailed, 0.5);
  EXPECT_FALSE(same.significant);

  const std::vector<double> one = {1.0};
  EXPECT_THROW(paired_t_test(one, one), InsufficientDataError);
  EXPECT_THROW(paired_t_test(a, one), InputError);
  EXPECT_THROW(paired_t_test(a, up, 1.5), ParameterError);
}

corpus::Corpus small_corpus() {
  return corpus::generate_synthetic_corpus(corpus::SyntheticTask::kCipher, 12, 0.0, 5);
}

Hypotheses corrupted(const corpus::Corpus& c, double rate, std::uint64_t seed) {
  util::Rng rng(seed);
  Hypotheses h;
  for (const auto& s : c) {
    std::string t = *s.reference;
    corpus::corrupt_in_place(t, rate, rng);
    h[s.id] = t;
  }
  return h;
}

TEST(Evaluate, ReferencesScorePerfect) {
  const auto c = small_corpus();
  Hypotheses refs;
  for (const auto& s : c) refs[s.id] = *s.reference;
  const auto chrf = metrics::make_scorer("chrf");
  const auto es = metrics::make_scorer("edit_sim");
  const metrics::MetricScorer* scorers[] = {chrf.get(), es.get()};
  const auto r = evaluate_system("refs", refs, c, scorers);
  ASSERT_EQ(r.segment_ids.size(), c.size());
  EXPECT_TRUE(std::is_sorted(r.segment_ids.begin(), r.segment_ids.end()));
  for (const auto& m : r.metrics) {
    for (double v : m.segment_scores) EXPECT_DOUBLE_EQ(v, 100.0);
    EXPECT_EQ(m.per_lang_pair.size(), 2u);
    for (const auto& [tag, v] : m.per_lang_pair) EXPECT_DOUBLE_EQ(v, 100.0);
    EXPECT_DOUBLE_EQ(m.per_direction.at(Direction::kIntoPivot), 100.0);
    EXPECT_DOUBLE_EQ(m.per_direction.at(Direction::kOutOfPivot), 100.0);
  }
  EXPECT_THROW(r.metric("bleu"), InputError);
  EXPECT_NE(r.to_csv().find("*-en,chrf"), std::string::npos);
  EXPECT_EQ(direction_label(Direction::kOutOfPivot, "en"), "en-*");
}

TEST(Evaluate, AggregatesFollowScorerMode) {
  const auto c = small_corpus();
  const auto hyps = corrupted(c, 0.3, 2);
  const auto chrf = metrics::make_scorer("chrf");
  const auto es = metrics::make_scorer("edit_sim");
  const metrics::MetricScorer* scorers[] = {chrf.get(), es.get()};
  const auto r = evaluate_system("sys", hyps, c, scorers, "en", 3);
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> by_pair;
  std::map<std::string, std::vector<double>> es_by_pair;
  for (const auto& s : c) {
    by_pair[s.lang_pair.tag()].emplace_back(hyps.at(s.id), *s.reference);
    es_by_pair[s.lang_pair.tag()].push_back(testing::edit_sim_oracle(hyps.at(s.id), *s.reference));
  }
  for (const auto& [tag, pairs] : by_pair) {
    EXPECT_NEAR(r.metric("chrf").per_lang_pair.at(tag), testing::chrf_corpus_oracle(pairs), 1e-9);
    const auto& v = es_by_pair[tag];
    EXPECT_NEAR(r.metric("edit_sim").per_lang_pair.at(tag),
                std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()), 1e-9);
  }
  EXPECT_DOUBLE_EQ(r.metric("chrf").per_direction.at(Direction::kIntoPivot),
                   r.metric("chrf").per_lang_pair.at("xx-en"));
  const auto serial = evaluate_system("sys", hyps, c, scorers, "en", 1);
  EXPECT_EQ(serial.to_csv(), r.to_csv());
  EXPECT_EQ(serial.segments_csv(), r.segments_csv());
}

TEST(Evaluate, HypothesesMustCoverCorpus) {
  const auto c = small_corpus();
  auto hyps = corrupted(c, 0.1, 1);
  const auto es = metrics::make_scorer("edit_sim");
  const metrics::MetricScorer* scorers[] = {es.get()};
  hyps.erase(c[0].id);
  EXPECT_THROW(evaluate_system("s", hyps, c, scorers), InputError);
  hyps[c[0].id] = "x";
  hyps["extra"] = "y";
  EXPECT_THROW(evaluate_system("s", hyps, c, scorers), InputError);
}

TEST(Compare, SelfAndImprovement) {
  const auto c = small_corpus();
  const auto es = metrics::make_scorer("edit_sim");
  const metrics::MetricScorer* scorers[] = {es.get()};
  const auto worse = evaluate_system("worse", corrupted(c, 0.5, 3), c, scorers);
  const auto better = evaluate_system("better", corrupted(c, 0.05, 4), c, scorers);
  const auto self = compare_report(worse, worse);
  ASSERT_FALSE(self.rows.empty());
  for (const auto& row : self.rows) {
    EXPECT_EQ(row.delta, 0.0);
    ASSERT_TRUE(row.test);
    EXPECT_FALSE(row.test->significant);
  }
  const auto cmp = compare_report(worse, better);
  bool saw_direction = false;
  for (const auto& row : cmp.rows) {
    EXPECT_NEAR(row.delta, row.value_b - row.value_a, 1e-12);
    EXPECT_GT(row.delta, 0.0) << row.group;
    if (row.group == "*-en" || row.group == "en-*") saw_direction = true;
  }
  EXPECT_TRUE(saw_direction);
  EXPECT_NE(cmp.to_text().find("better"), std::string::npos);

  auto shorter = c;
  shorter.pop_back();
  Hypotheses h;
  for (const auto& s : shorter) h[s.id] = *s.reference;
  EXPECT_THROW(compare_report(worse, evaluate_system("s", h, shorter, scorers)), InputError);
}

toymt::ToyModel letter_model() {
  toymt::ModelConfig cfg;
  std::u32string chars;
  for (char ch : corpus::kSyntheticAlphabet) chars.push_back(static_cast<char32_t>(ch));
  cfg.chars = chars;
  cfg.dim = 8;
  cfg.n_layers = 1;
  cfg.n_heads = 2;
  cfg.max_len = 24;
  cfg.seed = 3;
  auto model = toymt::ToyModel::init(cfg);
  // untrained greedy output is empty; discourage EOS so candidates have text
  model.mutable_tensor("b_out")[toymt::kEos] = -4.0;
  return model;
}

TEST(Pipeline, CandidateSetsAreCompleteAndWorkerIndependent) {
  const auto c = small_corpus();
  const auto model = letter_model();
  CandidateOptions opt;
  opt.k = 4;
  opt.max_chars = 8;
  opt.include_reference = true;
  opt.external = SyntheticSystem{};
  const auto a = generate_candidate_sets(model, c, opt, 1);
  const auto b = generate_candidate_sets(model, c, opt, 3);
  EXPECT_EQ(a.sets, b.sets);
  EXPECT_EQ(a.sets.size() + a.skipped.size(), c.size());
  ASSERT_FALSE(a.sets.empty());
  for (const auto& set : a.sets) {
    EXPECT_NO_THROW(set.validate());
    ASSERT_EQ(set.candidates.size(), 7u);
    EXPECT_TRUE(set.find(corpus::SystemId::base()));
    EXPECT_TRUE(set.find(corpus::SystemId::external("synth")));
    for (int k = 1; k <= 4; ++k) {
      const auto* s = set.find(corpus::SystemId::sampled(k));
      ASSERT_TRUE(s);
      EXPECT_LE(s->text.size(), 8u);
    }
  }

  const auto es = metrics::make_scorer("edit_sim");
  const auto scores = score_candidate_sets(a.sets, c, *es, 2);
  ASSERT_EQ(scores.size(), a.sets.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    ASSERT_EQ(scores[i].scores.size(), a.sets[i].candidates.size());
    for (std::size_t j = 0; j < scores[i].scores.size(); ++j) {
      const auto& cand = a.sets[i].candidates[j];
      const auto* seg = corpus::index_by_id(c).at(a.sets[i].segment_id);
      EXPECT_DOUBLE_EQ(scores[i].scores[j], testing::edit_sim_oracle(cand.text, *seg->reference));
    }
  }
  const auto ranked = rank_pool(a.sets, scores);
  EXPECT_EQ(ranked.size(), a.sets.size());

  auto stray = a.sets;
  stray[0].segment_id = "missing";
  EXPECT_THROW(score_candidate_sets(stray, c, *es), InputError);
}

TEST(GridExperimentResult, MatrixAndBestCell) {
  GridExperimentResult r;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.score = {{{1.0, nan, 2.0}, {3.0, 5.0, 5.0}, {nan, 4.0, 0.0}}};
  EXPECT_EQ(r.best_cell(), std::make_pair(prefbuild::QualityLevel::kMid, prefbuild::QualityLevel::kMid));
  const std::string csv = r.matrix_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "chosen\\rejected,Low,Mid,High");
  EXPECT_NE(csv.find("Low,1.0000,nan,2.0000"), std::string::npos);
}

}  // namespace
}  // namespace prefalign::eval
