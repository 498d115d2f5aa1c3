// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "prefalign/metrics/metric.hpp"

#include <numeric>

#include "prefalign/error.hpp"
#include "prefalign/metrics/external.hpp"
#include "prefalign/metrics/lexical.hpp"
#include "prefalign/util/parallel.hpp"

namespace prefalign::metrics {

const char* to_string(Aggregation a) {
  return a == Aggregation::kCorpus ? "corpus" : "segment-mean";
}

double MetricScorer::corpus_score(std::span<const ScoreRequest> requests) const {
  if (requests.empty()) return 0.0;
  const auto scores = score_batch(requests);
  return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

void MetricScorer::require_references(std::span<const ScoreRequest> requests) const {
  if (!id().needs_reference) return;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (!requests[i].reference) {
      throw ContractError("metric '" + id().name + "' needs a reference (request " +
                          std::to_string(i) + ")");
    }
  }
}

std::vector<double> score_parallel(const MetricScorer& scorer,
                                   std::span<const ScoreRequest> requests, std::size_t workers) {
  const std::size_t n = requests.size();
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) return scorer.score_batch(requests);
  std::vector<std::vector<double>> parts(workers);
  util::parallel_for(workers, workers, [&](std::size_t w) {
    const std::size_t lo = n * w / workers;
    const std::size_t hi = n * (w + 1) / workers;
    parts[w] = scorer.score_batch(requests.subspan(lo, hi - lo));
  });
  std::vector<double> out;
  out.reserve(n);
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::unique_ptr<MetricScorer> make_scorer(const std::string& name,
                                          const std::optional<ExternalOptions>& external) {
  if (name == "chrf") return std::make_unique<ChrfScorer>();
  if (name == "bleu") return std::make_unique<BleuScorer>();
  if (name == "edit_sim") return std::make_unique<EditSimScorer>();
  if (name == "bigram_f1") return std::make_unique<BigramF1Scorer>();
  if (name.rfind("ext:", 0) == 0 && name.size() > 4) {
    if (!external || external->endpoint.empty()) {
      throw ParameterError("metric '" + name + "' needs an external scorer endpoint");
    }
    return std::make_unique<ExternalScorer>(name.substr(4), *external);
  }
  throw ParameterError("unknown metric '" + name + "'");
}

std::vector<std::string> builtin_metric_names() {
  return {"chrf", "bleu", "edit_sim", "bigram_f1"};
}

}  // namespace prefalign::metrics
