// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "prefalign/eval/pipeline.hpp"

#include "prefalign/error.hpp"
#include "prefalign/util/parallel.hpp"
#include "prefalign/util/rng.hpp"

namespace prefalign::eval {

CandidateBatch generate_candidate_sets(const toymt::ToyModel& model, const corpus::Corpus& corpus,
                                       const CandidateOptions& options, std::size_t workers) {
  if (options.k < 1) throw ParameterError("candidate count k must be >= 1");
  auto sets = util::parallel_map<std::optional<corpus::CandidateSet>>(
      corpus.size(), workers, [&](std::size_t i) -> std::optional<corpus::CandidateSet> {
        const corpus::Segment& seg = corpus[i];
        corpus::CandidateSet set;
        set.segment_id = seg.id;
        std::string greedy = toymt::greedy_decode(model, seg.source, options.max_chars);
        if (greedy.empty()) return std::nullopt;
        set.candidates.push_back({corpus::SystemId::base(), std::move(greedy)});
        const std::uint64_t seed = util::derive_seed(options.seed, i);
        auto samples = toymt::generate_candidates(model, seg.source, options.k, options.sampling,
                                                  options.max_chars, seed);
        for (int k = 0; k < options.k; ++k) {
          set.candidates.push_back(
              {corpus::SystemId::sampled(k + 1), std::move(samples[static_cast<std::size_t>(k)])});
        }
        if (options.include_reference && seg.reference && !seg.reference->empty()) {
          set.candidates.push_back({corpus::SystemId::reference(), *seg.reference});
        }
        if (options.external) {
          util::Rng rng(util::derive_seed(seed, 0x5eed));
          std::string text = corpus::apply_task(options.external->task, seg.source);
          corpus::corrupt_in_place(text, options.external->noise_rate, rng);
          if (!text.empty()) {
            set.candidates.push_back({corpus::SystemId::external(options.external->name), text});
          }
        }
        set.validate();
        return set;
      });
  CandidateBatch out;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (sets[i]) {
      out.sets.push_back(std::move(*sets[i]));
    } else {
      out.skipped.push_back(corpus[i].id);
    }
  }
  return out;
}

std::vector<corpus::CandidateScores> score_candidate_sets(
    std::span<const corpus::CandidateSet> sets, const corpus::Corpus& corpus,
    const metrics::MetricScorer& scorer, std::size_t workers) {
  const auto index = corpus::index_by_id(corpus);
  std::vector<metrics::ScoreRequest> requests;
  for (const auto& set : sets) {
    auto it = index.find(set.segment_id);
    if (it == index.end()) {
      throw InputError("candidate set for unknown segment '" + set.segment_id + "'");
    }
    for (const auto& c : set.candidates) {
      requests.push_back({it->second->source, c.text, it->second->reference});
    }
  }
  const std::vector<double> flat = metrics::score_parallel(scorer, requests, workers);
  std::vector<corpus::CandidateScores> out;
  out.reserve(sets.size());
  std::size_t pos = 0;
  for (const auto& set : sets) {
    corpus::CandidateScores cs;
    cs.segment_id = set.segment_id;
    cs.metric = scorer.id().name;
    cs.scores.assign(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                     flat.begin() + static_cast<std::ptrdiff_t>(pos + set.candidates.size()));
    pos += set.candidates.size();
    out.push_back(std::move(cs));
  }
  return out;
}

std::vector<prefbuild::RankedCandidates> rank_pool(std::span<const corpus::CandidateSet> sets,
                                                   std::span<const corpus::CandidateScores> scores) {
  if (sets.size() != scores.size()) {
    throw InputError("got " + std::to_string(scores.size()) + " score records for " +
                     std::to_string(sets.size()) + " candidate sets");
  }
  std::vector<prefbuild::RankedCandidates> pool;
  pool.reserve(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    pool.push_back(prefbuild::rank_candidate_set(sets[i], scores[i]));
  }
  return pool;
}

}  // namespace prefalign::eval
