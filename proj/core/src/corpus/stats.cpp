// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "prefalign/corpus/stats.hpp"

#include <sstream>

#include "prefalign/error.hpp"
#include "prefalign/util/format.hpp"

namespace prefalign::corpus {

namespace {

std::string system_key(const SystemId& id) {
  return id.kind() == SystemId::Kind::kSampled ? std::string("sample") : id.str();
}

}  // namespace

DatasetStats dataset_stats(const PreferenceDataset& dataset, const Corpus& corpus) {
  if (dataset.pairs.empty()) throw InputError("dataset_stats: dataset is empty");
  const auto index = index_by_id(corpus);
  DatasetStats stats;
  double sum_chosen = 0.0;
  double sum_rejected = 0.0;
  for (const auto& p : dataset.pairs) {
    const auto it = index.find(p.segment_id);
    if (it == index.end()) {
      throw InputError("dataset_stats: segment '" + p.segment_id + "' not in corpus");
    }
    sum_chosen += p.chosen_score;
    sum_rejected += p.rejected_score;
    ++stats.per_lang_pair[it->second->lang_pair.tag()];
    ++stats.per_chosen_system[system_key(p.chosen.system)];
    ++stats.per_rejected_system[system_key(p.rejected.system)];
  }
  stats.n_pairs = dataset.pairs.size();
  stats.avg_chosen = sum_chosen / static_cast<double>(stats.n_pairs);
  stats.avg_rejected = sum_rejected / static_cast<double>(stats.n_pairs);
  return stats;
}

std::string stats_to_csv(const DatasetStats& stats) {
  std::ostringstream out;
  out << "key,value,percent\n";
  out << "n_pairs," << stats.n_pairs << ",100\n";
  out << "avg_chosen," << util::fmt_double(stats.avg_chosen) << ",\n";
  out << "avg_rejected," << util::fmt_double(stats.avg_rejected) << ",\n";
  auto emit = [&](const char* prefix, const std::map<std::string, std::size_t>& counts) {
    for (const auto& [k, v] : counts) {
      out << prefix << k << ',' << v << ',' << util::fmt_fixed(stats.percent(v), 2) << '\n';
    }
  };
  emit("lang_pair:", stats.per_lang_pair);
  emit("chosen_system:", stats.per_chosen_system);
  emit("rejected_system:", stats.per_rejected_system);
  return out.str();
}

}  // namespace prefalign::corpus
