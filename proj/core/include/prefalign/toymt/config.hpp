// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace prefalign::toymt {

// Reserved token ids; character ids start at kFirstCharId.
inline constexpr int kPad = 0;
inline constexpr int kBos = 1;
inline constexpr int kEos = 2;
inline constexpr int kSep = 3;
inline constexpr int kFirstCharId = 4;

struct ModelConfig {
  std::u32string chars;  // ordered character set, no duplicates
  int dim = 32;
  int n_layers = 2;
  int n_heads = 4;
  int ffn_dim = 0;  // 0 means 4 * dim
  int max_len = 32;
  std::uint64_t seed = 1;

  int vocab_size() const { return kFirstCharId + static_cast<int>(chars.size()); }
  int ffn() const { return ffn_dim > 0 ? ffn_dim : 4 * dim; }

  // Closed form: V*d + max_len*d + 2d                      (embeddings)
  //            + n_layers * (4d^2 + 2*d*f + 9d + f)         (blocks)
  //            + 2d + d*V + V                               (final norm, output)
  std::size_t param_count() const;

  // Throws ParameterError on an unusable configuration.
  void validate() const;

  std::string to_json() const;
  static ModelConfig from_json(std::string_view text);

  bool operator==(const ModelConfig&) const = default;
};

class Vocabulary {
 public:
  explicit Vocabulary(const std::u32string& chars);

  int size() const { return kFirstCharId + static_cast<int>(chars_.size()); }
  // Throws InputError for characters outside the vocabulary.
  int id(char32_t c) const;
  bool is_char(int id) const { return id >= kFirstCharId && id < size(); }
  char32_t char_of(int id) const { return chars_[static_cast<std::size_t>(id - kFirstCharId)]; }

  std::vector<int> encode(std::string_view utf8) const;
  std::string decode(const std::vector<int>& ids) const;

 private:
  std::u32string chars_;
  std::unordered_map<char32_t, int> ids_;
};

}  // namespace prefalign::toymt
