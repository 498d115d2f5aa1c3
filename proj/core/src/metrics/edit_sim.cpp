// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <numeric>
#include <vector>

#include "prefalign/error.hpp"
#include "prefalign/metrics/lexical.hpp"
#include "prefalign/util/utf8.hpp"

namespace prefalign::metrics {

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  // single rolling row over the shorter string
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

double edit_sim(const ScoreRequest& request) {
  if (!request.reference) throw ContractError("edit_sim needs a reference");
  const auto hyp = util::utf8_decode(request.hypothesis);
  const auto ref = util::utf8_decode(*request.reference);
  const std::size_t longest = std::max(hyp.size(), ref.size());
  if (longest == 0) return 100.0;
  const auto d = static_cast<double>(levenshtein(hyp, ref));
  return 100.0 * (1.0 - d / static_cast<double>(longest));
}

EditSimScorer::EditSimScorer() : id_{"edit_sim", true, true, 0.0, 100.0} {}

std::vector<double> EditSimScorer::score_batch(std::span<const ScoreRequest> requests) const {
  require_references(requests);
  std::vector<double> out;
  out.reserve(requests.size());
  for (const auto& r : requests) out.push_back(edit_sim(r));
  return out;
}

}  // namespace prefalign::metrics
