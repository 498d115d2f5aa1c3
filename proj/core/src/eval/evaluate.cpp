// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <numeric>
#include <sstream>

#include "prefalign/error.hpp"
#include "prefalign/eval/eval.hpp"
#include "prefalign/util/format.hpp"
#include "prefalign/util/parallel.hpp"

namespace prefalign::eval {

std::string direction_label(corpus::Direction d, const std::string& pivot) {
  return d == corpus::Direction::kIntoPivot ? "*-" + pivot : pivot + "-*";
}

namespace {

std::string list_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < 10; ++i) out += (i ? ", " : "") + ids[i];
  if (ids.size() > 10) out += ", ... (" + std::to_string(ids.size()) + " total)";
  return out;
}

}  // namespace

const MetricReport& EvalReport::metric(const std::string& name) const {
  for (const auto& m : metrics) {
    if (m.metric == name) return m;
  }
  throw InputError("report has no metric '" + name + "'");
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "group,metric,aggregation,value\n";
  for (const auto& m : metrics) {
    for (const auto& [lp, v] : m.per_lang_pair) {
      out << lp << ',' << m.metric << ',' << metrics::to_string(m.aggregation) << ','
          << util::fmt_fixed(v, 4) << '\n';
    }
    for (const auto& [d, v] : m.per_direction) {
      out << direction_label(d, pivot) << ',' << m.metric << ",lang-pair-mean,"
          << util::fmt_fixed(v, 4) << '\n';
    }
  }
  return out.str();
}

std::string EvalReport::segments_csv() const {
  std::ostringstream out;
  out << "segment_id,lang_pair";
  for (const auto& m : metrics) out << ',' << m.metric;
  out << '\n';
  for (std::size_t i = 0; i < segment_ids.size(); ++i) {
    out << segment_ids[i] << ',' << lang_pairs[i];
    for (const auto& m : metrics) out << ',' << util::fmt_double(m.segment_scores[i]);
    out << '\n';
  }
  return out.str();
}

EvalReport evaluate_system(const std::string& system, const Hypotheses& hypotheses,
                           const corpus::Corpus& corpus,
                           std::span<const metrics::MetricScorer* const> scorers,
                           const std::string& pivot, std::size_t workers) {
  if (corpus.empty()) throw InputError("empty evaluation corpus");
  std::vector<const corpus::Segment*> segs;
  segs.reserve(corpus.size());
  for (const auto& s : corpus) segs.push_back(&s);
  std::sort(segs.begin(), segs.end(), [](const auto* a, const auto* b) { return a->id < b->id; });

  std::vector<std::string> missing;
  std::vector<std::string> extra;
  for (const auto* s : segs) {
    if (!hypotheses.count(s->id)) missing.push_back(s->id);
  }
  if (hypotheses.size() + missing.size() != segs.size()) {
    std::unordered_map<std::string, int> known;
    for (const auto* s : segs) known[s->id] = 1;
    for (const auto& [id, h] : hypotheses) {
      if (!known.count(id)) extra.push_back(id);
    }
    std::sort(extra.begin(), extra.end());
  }
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "hypotheses do not match the corpus";
    if (!missing.empty()) msg += "; missing: " + list_ids(missing);
    if (!extra.empty()) msg += "; unexpected: " + list_ids(extra);
    throw InputError(msg);
  }

  EvalReport report;
  report.system = system;
  report.pivot = pivot;
  std::vector<metrics::ScoreRequest> requests;
  std::map<std::string, std::vector<std::size_t>> by_lp;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto* s = segs[i];
    report.segment_ids.push_back(s->id);
    report.lang_pairs.push_back(s->lang_pair.tag());
    by_lp[s->lang_pair.tag()].push_back(i);
    requests.push_back({s->source, hypotheses.at(s->id), s->reference});
  }
  std::map<std::string, corpus::Direction> lp_direction;
  for (const auto* s : segs) lp_direction[s->lang_pair.tag()] = s->lang_pair.direction(pivot);

  for (const auto* scorer : scorers) {
    MetricReport m;
    m.metric = scorer->id().name;
    m.aggregation = scorer->aggregation();
    m.segment_scores = metrics::score_parallel(*scorer, requests, workers);
    for (const auto& [lp, idx] : by_lp) {
      if (m.aggregation == metrics::Aggregation::kCorpus) {
        std::vector<metrics::ScoreRequest> sub;
        sub.reserve(idx.size());
        for (auto i : idx) sub.push_back(requests[i]);
        m.per_lang_pair[lp] = scorer->corpus_score(sub);
      } else {
        double sum = 0.0;
        for (auto i : idx) sum += m.segment_scores[i];
        m.per_lang_pair[lp] = sum / static_cast<double>(idx.size());
      }
    }
    std::map<corpus::Direction, std::pair<double, int>> acc;
    for (const auto& [lp, v] : m.per_lang_pair) {
      auto& [sum, n] = acc[lp_direction.at(lp)];
      sum += v;
      ++n;
    }
    for (const auto& [d, sn] : acc) m.per_direction[d] = sn.first / sn.second;
    report.metrics.push_back(std::move(m));
  }
  return report;
}

Hypotheses translate(const toymt::ToyModel& model, const corpus::Corpus& corpus, int max_chars,
                     std::size_t workers) {
  const auto outs = util::parallel_map<std::string>(corpus.size(), workers, [&](std::size_t i) {
    return toymt::greedy_decode(model, corpus[i].source, max_chars);
  });
  Hypotheses h;
  for (std::size_t i = 0; i < corpus.size(); ++i) h[corpus[i].id] = outs[i];
  return h;
}

}  // namespace prefalign::eval
