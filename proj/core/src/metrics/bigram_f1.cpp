// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <map>
#include <utility>

#include "prefalign/error.hpp"
#include "prefalign/metrics/lexical.hpp"
#include "prefalign/util/utf8.hpp"

namespace prefalign::metrics {

namespace {

std::map<std::pair<char32_t, char32_t>, int> bigrams(const std::u32string& s) {
  std::map<std::pair<char32_t, char32_t>, int> counts;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) ++counts[{s[i], s[i + 1]}];
  return counts;
}

}  // namespace

double bigram_f1(const ScoreRequest& request) {
  if (!request.reference) throw ContractError("bigram_f1 needs a reference");
  const auto hyp = util::utf8_decode(request.hypothesis);
  const auto ref = util::utf8_decode(*request.reference);
  const std::size_t hyp_total = hyp.size() >= 2 ? hyp.size() - 1 : 0;
  const std::size_t ref_total = ref.size() >= 2 ? ref.size() - 1 : 0;
  if (hyp_total == 0 && ref_total == 0) return hyp == ref ? 100.0 : 0.0;
  const auto hyp_counts = bigrams(hyp);
  const auto ref_counts = bigrams(ref);
  double matches = 0.0;
  for (const auto& [gram, count] : hyp_counts) {
    const auto it = ref_counts.find(gram);
    if (it != ref_counts.end()) matches += std::min(count, it->second);
  }
  // F1 = 2PR/(P+R) = 2m / (|H| + |R|)
  return 100.0 * 2.0 * matches / static_cast<double>(hyp_total + ref_total);
}

BigramF1Scorer::BigramF1Scorer() : id_{"bigram_f1", true, true, 0.0, 100.0} {}

std::vector<double> BigramF1Scorer::score_batch(std::span<const ScoreRequest> requests) const {
  require_references(requests);
  std::vector<double> out;
  out.reserve(requests.size());
  for (const auto& r : requests) out.push_back(bigram_f1(r));
  return out;
}

}  // namespace prefalign::metrics
