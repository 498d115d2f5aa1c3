// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "prefalign/metrics/metric.hpp"

namespace prefalign::metrics {

// --- chrF -----------------------------------------------------------------
//
// Character n-gram F-score over orders 1..char_order, whitespace removed
// before extraction, no word n-grams. Per order n: precision = matches /
// hyp n-grams, recall = matches / ref n-grams, with clipped (min) match
// counts. P and R are averaged over the orders where both sides have at least
// one n-gram; the score is 100 * (1+b^2) P R / (b^2 P + R), 0 when P+R = 0.
// With no such order the score is 100 if the stripped strings are equal and 0
// otherwise.

struct ChrfStats {
  // For order n (index n-1): hyp n-gram count, ref n-gram count, matches.
  std::vector<std::array<double, 3>> orders;

  ChrfStats& operator+=(const ChrfStats& other);
};

ChrfStats chrf_stats(std::string_view hypothesis, std::string_view reference, int char_order = 6);
double chrf_from_stats(const ChrfStats& stats, double beta = 2.0, bool identical = false);

double chrf(const ScoreRequest& request, int char_order = 6, double beta = 2.0);
// Micro-average: statistics summed over segments before combining.
double chrf_corpus(std::span<const ScoreRequest> requests, int char_order = 6, double beta = 2.0);

// --- BLEU -----------------------------------------------------------------
//
// Whitespace-tokenized, up to 4-grams, clipped counts, brevity penalty
// exp(1 - r/c) when c < r. The geometric mean runs over the orders where the
// hypothesis side has at least one n-gram. Sentence mode adds one to the
// matches and totals of orders n > 1.

enum class BleuMode { kSentence, kCorpus };

double bleu(std::span<const ScoreRequest> requests, BleuMode mode);
double sentence_bleu(const ScoreRequest& request);

// --- character-level similarity scorers ----------------------------------

std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

// 100 * (1 - lev(hyp, ref) / max(|hyp|, |ref|)), over Unicode scalars; 100
// when both are empty.
double edit_sim(const ScoreRequest& request);

// F1 of character-bigram multisets * 100. If neither side has a bigram: 100
// when the texts are equal, else 0.
double bigram_f1(const ScoreRequest& request);

// --- scorer objects ---------------------------------------------------------

class ChrfScorer final : public MetricScorer {
 public:
  explicit ChrfScorer(int char_order = 6, double beta = 2.0);
  const MetricId& id() const override { return id_; }
  std::vector<double> score_batch(std::span<const ScoreRequest> requests) const override;
  Aggregation aggregation() const override { return Aggregation::kCorpus; }
  double corpus_score(std::span<const ScoreRequest> requests) const override;

 private:
  MetricId id_;
  int char_order_;
  double beta_;
};

// Segment scores use sentence mode; corpus_score uses corpus mode.
class BleuScorer final : public MetricScorer {
 public:
  BleuScorer();
  const MetricId& id() const override { return id_; }
  std::vector<double> score_batch(std::span<const ScoreRequest> requests) const override;
  Aggregation aggregation() const override { return Aggregation::kCorpus; }
  double corpus_score(std::span<const ScoreRequest> requests) const override;

 private:
  MetricId id_;
};

class EditSimScorer final : public MetricScorer {
 public:
  EditSimScorer();
  const MetricId& id() const override { return id_; }
  std::vector<double> score_batch(std::span<const ScoreRequest> requests) const override;

 private:
  MetricId id_;
};

class BigramF1Scorer final : public MetricScorer {
 public:
  BigramF1Scorer();
  const MetricId& id() const override { return id_; }
  std::vector<double> score_batch(std::span<const ScoreRequest> requests) const override;

 private:
  MetricId id_;
};

}  // namespace prefalign::metrics
