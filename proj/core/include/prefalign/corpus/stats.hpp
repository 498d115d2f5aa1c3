// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "prefalign/corpus/types.hpp"

namespace prefalign::corpus {

struct DatasetStats {
  std::size_t n_pairs = 0;
  double avg_chosen = 0.0;
  double avg_rejected = 0.0;
  std::map<std::string, std::size_t> per_lang_pair;  // keyed by "src-tgt"
  // Keyed by system string; all sampled candidates share the key "sample".
  std::map<std::string, std::size_t> per_chosen_system;
  std::map<std::string, std::size_t> per_rejected_system;

  double percent(std::size_t count) const {
    return n_pairs ? 100.0 * static_cast<double>(count) / static_cast<double>(n_pairs) : 0.0;
  }
};

// Arithmetic means and counts over the dataset's pairs. Language pairs are
// looked up in `corpus` by segment id. Throws InputError when the dataset is
// empty or references a segment absent from the corpus.
DatasetStats dataset_stats(const PreferenceDataset& dataset, const Corpus& corpus);

// Writes the stats as "key,value" CSV rows (deterministic order).
std::string stats_to_csv(const DatasetStats& stats);

}  // namespace prefalign::corpus
