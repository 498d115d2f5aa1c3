// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "report_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "prefalign/error.hpp"

namespace prefalign::cli {

namespace {

metrics::Aggregation parse_aggregation(const std::string& s) {
  if (s == metrics::to_string(metrics::Aggregation::kCorpus)) return metrics::Aggregation::kCorpus;
  if (s == metrics::to_string(metrics::Aggregation::kSegmentMean)) {
    return metrics::Aggregation::kSegmentMean;
  }
  throw ParseError("unknown aggregation '" + s + "'");
}

corpus::Direction parse_direction(const std::string& s) {
  if (s == corpus::to_string(corpus::Direction::kIntoPivot)) return corpus::Direction::kIntoPivot;
  if (s == corpus::to_string(corpus::Direction::kOutOfPivot)) return corpus::Direction::kOutOfPivot;
  throw ParseError("unknown direction '" + s + "'");
}

}  // namespace

std::string eval_report_to_json(const eval::EvalReport& report) {
  nlohmann::ordered_json j;
  j["system"] = report.system;
  j["pivot"] = report.pivot;
  j["segment_ids"] = report.segment_ids;
  j["lang_pairs"] = report.lang_pairs;
  j["metrics"] = nlohmann::ordered_json::array();
  for (const auto& m : report.metrics) {
    nlohmann::ordered_json mj;
    mj["metric"] = m.metric;
    mj["aggregation"] = metrics::to_string(m.aggregation);
    mj["per_lang_pair"] = m.per_lang_pair;
    nlohmann::ordered_json dirs = nlohmann::ordered_json::object();
    for (const auto& [d, v] : m.per_direction) dirs[corpus::to_string(d)] = v;
    mj["per_direction"] = dirs;
    mj["segment_scores"] = m.segment_scores;
    j["metrics"].push_back(mj);
  }
  return j.dump(1) + "\n";
}

eval::EvalReport read_eval_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read report " + path.string());
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    eval::EvalReport r;
    r.system = j.at("system").get<std::string>();
    r.pivot = j.at("pivot").get<std::string>();
    r.segment_ids = j.at("segment_ids").get<std::vector<std::string>>();
    r.lang_pairs = j.at("lang_pairs").get<std::vector<std::string>>();
    for (const auto& mj : j.at("metrics")) {
      eval::MetricReport m;
      m.metric = mj.at("metric").get<std::string>();
      m.aggregation = parse_aggregation(mj.at("aggregation").get<std::string>());
      m.per_lang_pair = mj.at("per_lang_pair").get<std::map<std::string, double>>();
      for (const auto& [k, v] : mj.at("per_direction").items()) {
        m.per_direction[parse_direction(k)] = v.get<double>();
      }
      m.segment_scores = mj.at("segment_scores").get<std::vector<double>>();
      if (m.segment_scores.size() != r.segment_ids.size()) {
        throw ParseError("metric " + m.metric + " has the wrong number of segment scores");
      }
      r.metrics.push_back(std::move(m));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("report " + path.string() + ": " + e.what());
  }
}

}  // namespace prefalign::cli
