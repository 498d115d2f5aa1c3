// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "prefalign/toymt/config.hpp"

#include <nlohmann/json.hpp>
#include <set>

#include "prefalign/error.hpp"
#include "prefalign/util/utf8.hpp"

namespace prefalign::toymt {

std::size_t ModelConfig::param_count() const {
  const std::size_t v = static_cast<std::size_t>(vocab_size());
  const std::size_t d = static_cast<std::size_t>(dim);
  const std::size_t f = static_cast<std::size_t>(ffn());
  const std::size_t layers = static_cast<std::size_t>(n_layers);
  return v * d + static_cast<std::size_t>(max_len) * d + 2 * d +
         layers * (4 * d * d + 2 * d * f + 9 * d + f) + 2 * d + d * v + v;
}

void ModelConfig::validate() const {
  if (chars.empty()) throw ParameterError("model vocabulary has no characters");
  if (std::set<char32_t>(chars.begin(), chars.end()).size() != chars.size()) {
    throw ParameterError("model vocabulary has duplicate characters");
  }
  if (dim < 1 || n_layers < 0 || n_heads < 1 || ffn_dim < 0) {
    throw ParameterError("model dimensions must be positive");
  }
  if (dim % n_heads != 0) {
    throw ParameterError("dim (" + std::to_string(dim) + ") not divisible by n_heads (" +
                         std::to_string(n_heads) + ")");
  }
  if (max_len < 4) throw ParameterError("max_len must be >= 4");
}

std::string ModelConfig::to_json() const {
  nlohmann::ordered_json j;
  j["vocab"] = util::utf8_encode(chars);
  j["dim"] = dim;
  j["n_layers"] = n_layers;
  j["n_heads"] = n_heads;
  j["ffn_dim"] = ffn_dim;
  j["max_len"] = max_len;
  j["seed"] = seed;
  return j.dump();
}

ModelConfig ModelConfig::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model config: ") + e.what());
  }
  static const std::set<std::string> kKeys = {"vocab",   "dim",     "n_layers", "n_heads",
                                              "ffn_dim", "max_len", "seed"};
  if (!j.is_object()) throw ParseError("model config must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!kKeys.contains(k)) throw ParseError("model config has unknown field '" + k + "'");
  }
  ModelConfig c;
  try {
    c.chars = util::utf8_decode(j.at("vocab").get<std::string>());
    c.dim = j.at("dim").get<int>();
    c.n_layers = j.at("n_layers").get<int>();
    c.n_heads = j.at("n_heads").get<int>();
    c.ffn_dim = j.value("ffn_dim", 0);
    c.max_len = j.at("max_len").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model config: ") + e.what());
  }
  c.validate();
  return c;
}

Vocabulary::Vocabulary(const std::u32string& chars) : chars_(chars) {
  for (std::size_t i = 0; i < chars_.size(); ++i) {
    ids_.emplace(chars_[i], kFirstCharId + static_cast<int>(i));
  }
}

int Vocabulary::id(char32_t c) const {
  const auto it = ids_.find(c);
  if (it == ids_.end()) {
    throw InputError("character U+" + std::to_string(static_cast<unsigned>(c)) +
                     " ('" + util::utf8_encode(c) + "') is not in the model vocabulary");
  }
  return it->second;
}

std::vector<int> Vocabulary::encode(std::string_view utf8) const {
  std::vector<int> out;
  for (char32_t c : util::utf8_decode(utf8)) out.push_back(id(c));
  return out;
}

std::string Vocabulary::decode(const std::vector<int>& ids) const {
  std::u32string text;
  for (int i : ids) {
    if (is_char(i)) text.push_back(char_of(i));
  }
  return util::utf8_encode(text);
}

}  // namespace prefalign::toymt
