// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

// Candidate generation and scoring stages shared by the command-line tool and
// the experiment drivers.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prefalign/corpus/synthetic.hpp"
#include "prefalign/corpus/types.hpp"
#include "prefalign/metrics/metric.hpp"
#include "prefalign/prefbuild/mono.hpp"
#include "prefalign/toymt/model.hpp"

namespace prefalign::eval {

// Stand-in for an external MT system: the exact task output with
// per-character noise (see generate_synthetic_corpus).
struct SyntheticSystem {
  std::string name = "synth";
  corpus::SyntheticTask task = corpus::SyntheticTask::kCipher;
  double noise_rate = 0.1;
};

struct CandidateOptions {
  int k = 20;
  toymt::SamplingParams sampling;
  int max_chars = 32;
  std::uint64_t seed = 1;
  bool include_reference = false;
  std::optional<SyntheticSystem> external;
};

struct CandidateBatch {
  std::vector<corpus::CandidateSet> sets;
  // Segments left out because the greedy translation was empty, which a
  // non-sampled candidate may not be.
  std::vector<std::string> skipped;
};

// One set per segment: greedy "base", samples "sample:1".."sample:k" and,
// when requested, "ref" and "ext:<name>". Segment i samples from seed
// derive_seed(seed, i), so results do not depend on `workers`.
CandidateBatch generate_candidate_sets(const toymt::ToyModel& model, const corpus::Corpus& corpus,
                                       const CandidateOptions& options, std::size_t workers = 1);

// Scores every candidate against its segment's source and reference.
// Throws InputError for sets whose segment is not in `corpus`.
std::vector<corpus::CandidateScores> score_candidate_sets(
    std::span<const corpus::CandidateSet> sets, const corpus::Corpus& corpus,
    const metrics::MetricScorer& scorer, std::size_t workers = 1);

// rank_candidate_set over matching sets and scores.
std::vector<prefbuild::RankedCandidates> rank_pool(std::span<const corpus::CandidateSet> sets,
                                                   std::span<const corpus::CandidateScores> scores);

}  // namespace prefalign::eval
