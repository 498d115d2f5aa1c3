// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "prefalign/error.hpp"
#include "prefalign/metrics/lexical.hpp"

namespace prefalign::metrics {

namespace {

constexpr int kMaxOrder = 4;

struct BleuStats {
  std::array<double, kMaxOrder> matches{};
  std::array<double, kMaxOrder> totals{};
  double hyp_len = 0.0;
  double ref_len = 0.0;

  BleuStats& operator+=(const BleuStats& o) {
    for (int n = 0; n < kMaxOrder; ++n) {
      matches[n] += o.matches[n];
      totals[n] += o.totals[n];
    }
    hyp_len += o.hyp_len;
    ref_len += o.ref_len;
    return *this;
  }
};

std::vector<std::string> tokenize(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> tokens;
  for (std::string tok; in >> tok;) tokens.push_back(std::move(tok));
  return tokens;
}

std::map<std::vector<std::string>, int> ngram_counts(const std::vector<std::string>& toks,
                                                     std::size_t n) {
  std::map<std::vector<std::string>, int> counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    ++counts[std::vector<std::string>(toks.begin() + static_cast<std::ptrdiff_t>(i),
                                      toks.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

BleuStats segment_stats(const ScoreRequest& r) {
  if (!r.reference) throw ContractError("BLEU needs a reference");
  const auto hyp = tokenize(r.hypothesis);
  const auto ref = tokenize(*r.reference);
  BleuStats s;
  s.hyp_len = static_cast<double>(hyp.size());
  s.ref_len = static_cast<double>(ref.size());
  for (std::size_t n = 1; n <= kMaxOrder; ++n) {
    if (hyp.size() < n) continue;
    const auto hyp_counts = ngram_counts(hyp, n);
    const auto ref_counts = ngram_counts(ref, n);
    double m = 0.0;
    for (const auto& [gram, count] : hyp_counts) {
      const auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) m += std::min(count, it->second);
    }
    s.matches[n - 1] = m;
    s.totals[n - 1] = static_cast<double>(hyp.size() - n + 1);
  }
  return s;
}

double combine(const BleuStats& s, bool smooth) {
  double log_sum = 0.0;
  int effective = 0;
  for (int n = 0; n < kMaxOrder; ++n) {
    if (s.totals[n] <= 0.0) continue;
    double m = s.matches[n];
    double t = s.totals[n];
    if (smooth && n > 0) {
      m += 1.0;
      t += 1.0;
    }
    if (m <= 0.0) return 0.0;
    log_sum += std::log(m / t);
    ++effective;
  }
  if (effective == 0) return 0.0;
  const double bp = s.hyp_len < s.ref_len ? std::exp(1.0 - s.ref_len / s.hyp_len) : 1.0;
  return std::clamp(100.0 * bp * std::exp(log_sum / effective), 0.0, 100.0);
}

}  // namespace

double bleu(std::span<const ScoreRequest> requests, BleuMode mode) {
  BleuStats total;
  for (const auto& r : requests) total += segment_stats(r);
  return combine(total, mode == BleuMode::kSentence);
}

double sentence_bleu(const ScoreRequest& request) {
  return combine(segment_stats(request), true);
}

BleuScorer::BleuScorer() : id_{"bleu", true, true, 0.0, 100.0} {}

std::vector<double> BleuScorer::score_batch(std::span<const ScoreRequest> requests) const {
  require_references(requests);
  std::vector<double> out;
  out.reserve(requests.size());
  for (const auto& r : requests) out.push_back(sentence_bleu(r));
  return out;
}

double BleuScorer::corpus_score(std::span<const ScoreRequest> requests) const {
  require_references(requests);
  return bleu(requests, BleuMode::kCorpus);
}

}  // namespace prefalign::metrics
