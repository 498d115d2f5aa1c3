// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "prefalign/corpus/types.hpp"
#include "prefalign/metrics/metric.hpp"
#include "prefalign/prefbuild/grid.hpp"
#include "prefalign/toymt/model.hpp"
#include "prefalign/train/train.hpp"

namespace prefalign::eval {

using Hypotheses = std::unordered_map<std::string, std::string>;

struct MetricReport {
  std::string metric;
  metrics::Aggregation aggregation = metrics::Aggregation::kSegmentMean;
  std::vector<double> segment_scores;           // aligned with EvalReport::segment_ids
  std::map<std::string, double> per_lang_pair;  // keyed by "src-tgt"
  // Unweighted mean over the language pairs of each direction present.
  std::map<corpus::Direction, double> per_direction;
};

// Group label of a direction in reports: "*-en" (into the pivot), "en-*".
std::string direction_label(corpus::Direction d, const std::string& pivot);

struct EvalReport {
  std::string system;
  std::string pivot;
  std::vector<std::string> segment_ids;  // sorted
  std::vector<std::string> lang_pairs;   // tag of each segment
  std::vector<MetricReport> metrics;

  const MetricReport& metric(const std::string& name) const;
  // Rows group,metric,aggregation,value where group is a language pair tag
  // or a direction name.
  std::string to_csv() const;
  // Per-segment scores: segment_id,lang_pair,<metric>...
  std::string segments_csv() const;
};

// Scores every segment's hypothesis with every scorer. Language-pair
// aggregates follow each scorer's aggregation mode. Throws InputError listing
// the ids when the hypotheses do not cover the corpus exactly.
EvalReport evaluate_system(const std::string& system, const Hypotheses& hypotheses,
                           const corpus::Corpus& corpus,
                           std::span<const metrics::MetricScorer* const> scorers,
                           const std::string& pivot = "en", std::size_t workers = 1);

// Greedy translations of every segment, decoded in parallel.
Hypotheses translate(const toymt::ToyModel& model, const corpus::Corpus& corpus, int max_chars,
                     std::size_t workers = 1);

// -- significance -----------------------------------------------------------

struct SignificanceResult {
  double t = 0.0;
  int df = 0;
  double p_one_tailed = 0.5;
  bool significant = false;
  bool degenerate_variance = false;  // all differences identical and nonzero
  double mean_diff = 0.0;
};

// One-tailed paired Student t-test of a > b on d = a - b. Throws
// InsufficientDataError for n < 2 and InputError for unequal lengths.
SignificanceResult paired_t_test(std::span<const double> a, std::span<const double> b,
                                 double alpha = 0.05);

// P(T > t) for Student's t with df degrees of freedom.
double student_t_upper_tail(double t, double df);

// I_x(a, b), evaluated with a Lentz continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

// -- comparison -------------------------------------------------------------

struct CompareRow {
  std::string group;  // language pair tag or direction name
  std::string metric;
  double value_a = 0.0;
  double value_b = 0.0;
  double delta = 0.0;                       // value_b - value_a
  std::optional<SignificanceResult> test;   // b > a on segment scores; unset for n < 2
};

struct Comparison {
  std::string system_a;
  std::string system_b;
  double alpha = 0.05;
  std::vector<CompareRow> rows;

  std::string to_csv() const;
  std::string to_text() const;
};

// Deltas of b against a per (group, metric). Throws InputError unless both
// reports cover the same segments and metrics.
Comparison compare_report(const EvalReport& a, const EvalReport& b, double alpha = 0.05);

// -- quality grid -----------------------------------------------------------

struct GridExperimentConfig {
  train::TrainConfig train;  // objective is forced to CPO
  int max_chars = 32;
  std::size_t workers = 1;
  std::string pivot = "en";
};

struct GridExperimentResult {
  std::string metric;
  double base_score = 0.0;
  // score[chosen level][rejected level], Low/Mid/High order. NaN for cells
  // whose dataset is empty.
  std::array<std::array<double, 3>, 3> score{};
  std::vector<prefbuild::GridCell> cells;

  // Row label = chosen level, column label = rejected level.
  std::string matrix_csv() const;
  // The cell with the highest score (first in chosen-major order on ties).
  std::pair<prefbuild::QualityLevel, prefbuild::QualityLevel> best_cell() const;
};

// Trains one CPO model per grid cell from `base` with the same seed and
// reports each model's corpus-level alignment score on `test`.
GridExperimentResult run_quality_grid_experiment(const toymt::ToyModel& base,
                                                 const prefbuild::GridResult& grid,
                                                 const corpus::Corpus& train_corpus,
                                                 const corpus::Corpus& test,
                                                 const metrics::MetricScorer& metric,
                                                 const GridExperimentConfig& cfg);

}  // namespace prefalign::eval
