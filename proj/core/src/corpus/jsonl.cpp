// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "prefalign/corpus/jsonl.hpp"

#include <fstream>
#include <initializer_list>
#include <nlohmann/json.hpp>

#include "prefalign/error.hpp"

namespace prefalign::corpus {

using nlohmann::json;

namespace {

// Requires `obj` to be an object with exactly the listed keys.
void expect_keys(const json& obj, std::initializer_list<const char*> keys, const char* what,
                 std::size_t line) {
  if (!obj.is_object()) throw ParseError(std::string(what) + " must be a JSON object", line);
  for (const char* k : keys) {
    if (!obj.contains(k)) throw ParseError(std::string(what) + " is missing field '" + k + "'", line);
  }
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* expected : keys) known = known || k == expected;
    if (!known) throw ParseError(std::string(what) + " has unknown field '" + k + "'", line);
  }
}

std::string get_string(const json& obj, const char* key, std::size_t line) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ParseError(std::string("field '") + key + "' must be a string", line);
  return v.get<std::string>();
}

double get_number(const json& obj, const char* key, std::size_t line) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ParseError(std::string("field '") + key + "' must be a number", line);
  return v.get<double>();
}

json candidate_to_json(const Candidate& c) {
  return json{{"system", c.system.str()}, {"text", c.text}};
}

Candidate candidate_from_json(const json& obj, std::size_t line) {
  expect_keys(obj, {"system", "text"}, "candidate", line);
  Candidate c{SystemId::base(), {}};
  try {
    c.system = SystemId::parse(get_string(obj, "system", line));
  } catch (const ParseError& e) {
    throw ParseError(e.what(), line);
  }
  c.text = get_string(obj, "text", line);
  return c;
}

json to_json(const Segment& s) {
  json j{{"id", s.id},
         {"src_lang", s.lang_pair.src},
         {"tgt_lang", s.lang_pair.tgt},
         {"source", s.source},
         {"reference", nullptr}};
  if (s.reference) j["reference"] = *s.reference;
  return j;
}

json to_json(const CandidateSet& cs) {
  json cands = json::array();
  for (const auto& c : cs.candidates) cands.push_back(candidate_to_json(c));
  return json{{"segment_id", cs.segment_id}, {"candidates", std::move(cands)}};
}

json to_json(const PreferencePair& p) {
  return json{{"segment_id", p.segment_id},
              {"chosen", candidate_to_json(p.chosen)},
              {"rejected", candidate_to_json(p.rejected)},
              {"chosen_score", p.chosen_score},
              {"rejected_score", p.rejected_score},
              {"metric", p.metric},
              {"builder", p.builder}};
}

json to_json(const CandidateScores& s) {
  return json{{"segment_id", s.segment_id}, {"metric", s.metric}, {"scores", s.scores}};
}

template <typename T>
T decode(const json& obj, std::size_t line);

template <>
Segment decode<Segment>(const json& obj, std::size_t line) {
  expect_keys(obj, {"id", "src_lang", "tgt_lang", "source", "reference"}, "segment", line);
  Segment s;
  s.id = get_string(obj, "id", line);
  s.lang_pair = {get_string(obj, "src_lang", line), get_string(obj, "tgt_lang", line)};
  s.source = get_string(obj, "source", line);
  if (!obj.at("reference").is_null()) s.reference = get_string(obj, "reference", line);
  if (s.id.empty()) throw ValidationError("segment id must be non-empty", s.id, line);
  if (s.source.empty()) throw ValidationError("source text must be non-empty", s.id, line);
  if (s.lang_pair.src == s.lang_pair.tgt) {
    throw ValidationError("source and target language must differ", s.id, line);
  }
  return s;
}

template <>
CandidateSet decode<CandidateSet>(const json& obj, std::size_t line) {
  expect_keys(obj, {"segment_id", "candidates"}, "candidate set", line);
  CandidateSet cs;
  cs.segment_id = get_string(obj, "segment_id", line);
  const auto& arr = obj.at("candidates");
  if (!arr.is_array()) throw ParseError("field 'candidates' must be an array", line);
  for (const auto& c : arr) cs.candidates.push_back(candidate_from_json(c, line));
  try {
    cs.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(e.reason(), cs.segment_id, line);
  }
  return cs;
}

template <>
PreferencePair decode<PreferencePair>(const json& obj, std::size_t line) {
  expect_keys(obj,
              {"segment_id", "chosen", "rejected", "chosen_score", "rejected_score", "metric",
               "builder"},
              "preference pair", line);
  PreferencePair p{.segment_id = get_string(obj, "segment_id", line),
                   .chosen = candidate_from_json(obj.at("chosen"), line),
                   .rejected = candidate_from_json(obj.at("rejected"), line),
                   .chosen_score = get_number(obj, "chosen_score", line),
                   .rejected_score = get_number(obj, "rejected_score", line),
                   .metric = get_string(obj, "metric", line),
                   .builder = get_string(obj, "builder", line)};
  try {
    p.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(e.reason(), p.segment_id, line);
  }
  return p;
}

template <>
CandidateScores decode<CandidateScores>(const json& obj, std::size_t line) {
  expect_keys(obj, {"segment_id", "metric", "scores"}, "candidate scores", line);
  CandidateScores s;
  s.segment_id = get_string(obj, "segment_id", line);
  s.metric = get_string(obj, "metric", line);
  const auto& arr = obj.at("scores");
  if (!arr.is_array()) throw ParseError("field 'scores' must be an array", line);
  for (const auto& v : arr) {
    if (!v.is_number()) throw ParseError("scores must be numbers", line);
    s.scores.push_back(v.get<double>());
  }
  return s;
}

}  // namespace

template <typename T>
std::string to_json_line(const T& record) {
  return to_json(record).dump();
}

template <typename T>
T from_json_line(const std::string& line, std::size_t line_no) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
  }
  try {
    return decode<T>(obj, line_no);
  } catch (const json::exception& e) {
    throw ParseError(e.what(), line_no);
  }
}

template <typename T>
std::vector<T> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string() + " for reading");
  std::vector<T> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(from_json_line<T>(line, line_no));
  }
  return out;
}

template <typename T>
void write_jsonl(const std::filesystem::path& path, std::span<const T> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  for (const auto& r : records) out << to_json_line(r) << '\n';
  if (!out) throw InputError("write failed for " + path.string());
}

#define PREFALIGN_INSTANTIATE_JSONL(T)                                                  \
  template std::vector<T> read_jsonl<T>(const std::filesystem::path&);                  \
  template void write_jsonl<T>(const std::filesystem::path&, std::span<const T>);       \
  template std::string to_json_line<T>(const T&);                                       \
  template T from_json_line<T>(const std::string&, std::size_t);

PREFALIGN_INSTANTIATE_JSONL(Segment)
PREFALIGN_INSTANTIATE_JSONL(CandidateSet)
PREFALIGN_INSTANTIATE_JSONL(PreferencePair)
PREFALIGN_INSTANTIATE_JSONL(CandidateScores)

#undef PREFALIGN_INSTANTIATE_JSONL

}  // namespace prefalign::corpus
