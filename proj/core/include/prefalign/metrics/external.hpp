// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "prefalign/metrics/metric.hpp"

namespace prefalign::metrics {

// Client for an out-of-process scorer.
//
// Wire protocol: POST {endpoint}/v1/score with body
//   {"metric": str, "pairs": [{"source": str, "hypothesis": str, "reference": str|null}]}
// answered by 200 and {"scores": [num, ...]}, one score per pair in order.
// 5xx and connection failures are retried with exponential backoff; 4xx is
// fatal.

struct ExternalResult {
  std::vector<double> scores;
  int retries = 0;  // summed over all HTTP batches
};

// Splits `requests` into batches of options.max_batch, keeps at most
// options.max_in_flight batches outstanding, and reassembles the scores in
// request order. Throws ProtocolError (bad status 4xx, bad body, length
// mismatch, non-numeric or out-of-range score) or TransportError (retries
// exhausted).
ExternalResult external_score_batch(const ExternalOptions& options, const std::string& metric_name,
                                    std::span<const ScoreRequest> requests);

class ExternalScorer final : public MetricScorer {
 public:
  ExternalScorer(std::string metric_name, ExternalOptions options);

  const MetricId& id() const override { return id_; }
  std::vector<double> score_batch(std::span<const ScoreRequest> requests) const override;

 private:
  MetricId id_;
  std::string remote_name_;
  ExternalOptions options_;
};

}  // namespace prefalign::metrics
