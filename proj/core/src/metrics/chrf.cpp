// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <string>
#include <unordered_map>

#include "prefalign/error.hpp"
#include "prefalign/metrics/lexical.hpp"
#include "prefalign/util/utf8.hpp"

namespace prefalign::metrics {

namespace {

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\v' || c == U'\f';
}

std::u32string strip_whitespace(std::string_view text) {
  std::u32string out = util::utf8_decode(text);
  std::erase_if(out, is_space);
  return out;
}

using NgramCounts = std::unordered_map<std::u32string_view, int>;

NgramCounts count_ngrams(const std::u32string& s, std::size_t n) {
  NgramCounts counts;
  if (s.size() < n) return counts;
  const std::u32string_view view(s);
  for (std::size_t i = 0; i + n <= s.size(); ++i) ++counts[view.substr(i, n)];
  return counts;
}

}  // namespace

ChrfStats& ChrfStats::operator+=(const ChrfStats& other) {
  if (orders.size() < other.orders.size()) orders.resize(other.orders.size(), {0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < other.orders.size(); ++i) {
    for (int k = 0; k < 3; ++k) orders[i][k] += other.orders[i][k];
  }
  return *this;
}

ChrfStats chrf_stats(std::string_view hypothesis, std::string_view reference, int char_order) {
  if (char_order < 1) throw ParameterError("chrF char_order must be >= 1");
  const std::u32string hyp = strip_whitespace(hypothesis);
  const std::u32string ref = strip_whitespace(reference);
  ChrfStats stats;
  stats.orders.resize(static_cast<std::size_t>(char_order));
  for (int n = 1; n <= char_order; ++n) {
    const auto un = static_cast<std::size_t>(n);
    const double hyp_total = hyp.size() >= un ? static_cast<double>(hyp.size() - un + 1) : 0.0;
    const double ref_total = ref.size() >= un ? static_cast<double>(ref.size() - un + 1) : 0.0;
    double matches = 0.0;
    if (hyp_total > 0 && ref_total > 0) {
      const auto hyp_counts = count_ngrams(hyp, un);
      const auto ref_counts = count_ngrams(ref, un);
      for (const auto& [gram, count] : hyp_counts) {
        const auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) matches += std::min(count, it->second);
      }
    }
    stats.orders[un - 1] = {hyp_total, ref_total, matches};
  }
  return stats;
}

double chrf_from_stats(const ChrfStats& stats, double beta, bool identical) {
  double precision = 0.0;
  double recall = 0.0;
  int effective = 0;
  for (const auto& [hyp_total, ref_total, matches] : stats.orders) {
    if (hyp_total > 0 && ref_total > 0) {
      precision += matches / hyp_total;
      recall += matches / ref_total;
      ++effective;
    }
  }
  if (effective == 0) return identical ? 100.0 : 0.0;
  precision /= effective;
  recall /= effective;
  const double b2 = beta * beta;
  const double denom = b2 * precision + recall;
  if (denom <= 0.0) return 0.0;
  return 100.0 * (1.0 + b2) * precision * recall / denom;
}

double chrf(const ScoreRequest& request, int char_order, double beta) {
  if (!request.reference) throw ContractError("chrF needs a reference");
  const auto stats = chrf_stats(request.hypothesis, *request.reference, char_order);
  const bool identical =
      strip_whitespace(request.hypothesis) == strip_whitespace(*request.reference);
  return chrf_from_stats(stats, beta, identical);
}

double chrf_corpus(std::span<const ScoreRequest> requests, int char_order, double beta) {
  ChrfStats total;
  total.orders.resize(static_cast<std::size_t>(char_order), {0.0, 0.0, 0.0});
  bool all_identical = true;
  for (const auto& r : requests) {
    if (!r.reference) throw ContractError("chrF needs a reference");
    total += chrf_stats(r.hypothesis, *r.reference, char_order);
    all_identical = all_identical && strip_whitespace(r.hypothesis) == strip_whitespace(*r.reference);
  }
  return chrf_from_stats(total, beta, all_identical);
}

ChrfScorer::ChrfScorer(int char_order, double beta)
    : id_{"chrf", true, true, 0.0, 100.0}, char_order_(char_order), beta_(beta) {}

std::vector<double> ChrfScorer::score_batch(std::span<const ScoreRequest> requests) const {
  require_references(requests);
  std::vector<double> out;
  out.reserve(requests.size());
  for (const auto& r : requests) out.push_back(chrf(r, char_order_, beta_));
  return out;
}

double ChrfScorer::corpus_score(std::span<const ScoreRequest> requests) const {
  require_references(requests);
  return chrf_corpus(requests, char_order_, beta_);
}

}  // namespace prefalign::metrics
