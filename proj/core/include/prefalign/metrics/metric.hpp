// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace prefalign::metrics {

struct MetricId {
  std::string name;
  bool needs_reference = true;
  bool higher_is_better = true;
  double lo = 0.0;
  double hi = 100.0;
};

struct ScoreRequest {
  std::string source;
  std::string hypothesis;
  std::optional<std::string> reference;
};

// How per-language-pair aggregates are formed in reports.
enum class Aggregation {
  kSegmentMean,  // arithmetic mean of segment scores
  kCorpus,       // metric recomputed from pooled sufficient statistics
};

const char* to_string(Aggregation a);

// Uniform scoring contract. Implementations are pure: identical requests give
// identical scores, every score lies in [id().lo, id().hi], and the result has
// the same length and order as the input.
class MetricScorer {
 public:
  virtual ~MetricScorer() = default;

  virtual const MetricId& id() const = 0;
  virtual std::vector<double> score_batch(std::span<const ScoreRequest> requests) const = 0;

  virtual Aggregation aggregation() const { return Aggregation::kSegmentMean; }
  // Corpus-level score. Defaults to the mean of score_batch.
  virtual double corpus_score(std::span<const ScoreRequest> requests) const;

 protected:
  // Throws ContractError when a reference-based metric gets no reference.
  void require_references(std::span<const ScoreRequest> requests) const;
};

// Scores `requests` in `workers` contiguous chunks. Output order and values do
// not depend on the worker count.
std::vector<double> score_parallel(const MetricScorer& scorer,
                                   std::span<const ScoreRequest> requests, std::size_t workers);

struct ExternalOptions {
  std::string endpoint;  // e.g. http://127.0.0.1:8080
  double timeout_seconds = 30.0;
  int max_retries = 3;
  double initial_backoff_seconds = 0.05;
  std::size_t max_batch = 64;
  std::size_t max_in_flight = 2;
  bool needs_reference = false;
  double lo = 0.0;
  double hi = 100.0;
};

// Builds a registered scorer: "chrf", "bleu", "edit_sim", "bigram_f1", or
// "ext:<metric>" (served remotely; needs `external`). Throws ParameterError
// for unknown names.
std::unique_ptr<MetricScorer> make_scorer(const std::string& name,
                                          const std::optional<ExternalOptions>& external = {});

// Names accepted by make_scorer without external options.
std::vector<std::string> builtin_metric_names();

}  // namespace prefalign::metrics
