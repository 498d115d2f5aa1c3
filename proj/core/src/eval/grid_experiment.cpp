// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <sstream>

#include "prefalign/error.hpp"
#include "prefalign/eval/eval.hpp"
#include "prefalign/util/format.hpp"

namespace prefalign::eval {

namespace {

std::size_t level_index(prefbuild::QualityLevel l) { return static_cast<std::size_t>(l); }

}  // namespace

std::string GridExperimentResult::matrix_csv() const {
  std::ostringstream out;
  out << "chosen\\rejected";
  for (auto r : prefbuild::kAllLevels) out << ',' << prefbuild::to_string(r);
  out << '\n';
  for (auto c : prefbuild::kAllLevels) {
    out << prefbuild::to_string(c);
    for (auto r : prefbuild::kAllLevels) {
      const double v = score[level_index(c)][level_index(r)];
      out << ',' << (std::isnan(v) ? std::string("nan") : util::fmt_fixed(v, 4));
    }
    out << '\n';
  }
  return out.str();
}

std::pair<prefbuild::QualityLevel, prefbuild::QualityLevel> GridExperimentResult::best_cell()
    const {
  std::pair<prefbuild::QualityLevel, prefbuild::QualityLevel> best{prefbuild::QualityLevel::kLow,
                                                                   prefbuild::QualityLevel::kLow};
  double best_v = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (auto c : prefbuild::kAllLevels) {
    for (auto r : prefbuild::kAllLevels) {
      const double v = score[level_index(c)][level_index(r)];
      if (!std::isnan(v) && v > best_v) {
        best_v = v;
        best = {c, r};
        found = true;
      }
    }
  }
  if (!found) throw InsufficientDataError("no grid cell produced a trained model");
  return best;
}

GridExperimentResult run_quality_grid_experiment(const toymt::ToyModel& base,
                                                 const prefbuild::GridResult& grid,
                                                 const corpus::Corpus& train_corpus,
                                                 const corpus::Corpus& test,
                                                 const metrics::MetricScorer& metric,
                                                 const GridExperimentConfig& cfg) {
  if (grid.cells.size() != 9) {
    throw InputError("quality grid needs 9 cells, got " + std::to_string(grid.cells.size()));
  }
  GridExperimentResult out;
  out.metric = metric.id().name;
  out.cells = grid.cells;
  for (const auto& cell : grid.cells) {
    if (!cell.result.dataset.pairs.empty() && cell.result.dataset.pairs.front().metric != out.metric) {
      throw InputError("grid dataset was built with metric '" +
                       cell.result.dataset.pairs.front().metric + "', evaluating '" + out.metric +
                       "'");
    }
  }
  const metrics::MetricScorer* scorers[] = {&metric};
  auto corpus_score = [&](const toymt::ToyModel& model, const std::string& label) {
    const Hypotheses hyp = translate(model, test, cfg.max_chars, cfg.workers);
    const EvalReport r = evaluate_system(label, hyp, test, scorers, cfg.pivot, cfg.workers);
    std::vector<metrics::ScoreRequest> all;
    for (const auto& s : test) all.push_back({s.source, hyp.at(s.id), s.reference});
    if (metric.aggregation() == metrics::Aggregation::kCorpus) return metric.corpus_score(all);
    double sum = 0.0;
    for (double v : r.metrics.front().segment_scores) sum += v;
    return sum / static_cast<double>(test.size());
  };
  out.base_score = corpus_score(base, "base");

  train::TrainConfig tc = cfg.train;
  tc.objective = train::Objective::kCpo;
  for (auto& row : out.score) row.fill(std::numeric_limits<double>::quiet_NaN());
  for (const auto& cell : grid.cells) {
    if (cell.result.dataset.pairs.empty()) continue;
    const auto examples = train::examples_from_dataset(cell.result.dataset, train_corpus);
    train::TrainResult trained = train::train(base, examples, tc);
    out.score[level_index(cell.chosen.level)][level_index(cell.rejected.level)] =
        corpus_score(trained.model, prefbuild::grid_builder_tag(cell.chosen.level,
                                                                cell.rejected.level));
  }
  return out;
}

}  // namespace prefalign::eval
