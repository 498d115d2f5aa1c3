// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "prefalign/corpus/synthetic.hpp"

#include <algorithm>

#include "prefalign/error.hpp"
#include "prefalign/util/rng.hpp"

namespace prefalign::corpus {

SyntheticTask parse_task(const std::string& name) {
  if (name == "cipher") return SyntheticTask::kCipher;
  if (name == "reverse") return SyntheticTask::kReverse;
  throw ParameterError("unknown synthetic task '" + name + "' (expected cipher|reverse)");
}

const char* to_string(SyntheticTask task) {
  return task == SyntheticTask::kCipher ? "cipher" : "reverse";
}

std::string substitution_cipher(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>('a' + (7 * (c - 'a') + 3) % 26);
  }
  return out;
}

std::string apply_task(SyntheticTask task, std::string_view source) {
  if (task == SyntheticTask::kCipher) return substitution_cipher(source);
  return std::string(source.rbegin(), source.rend());
}

void corrupt_in_place(std::string& text, double noise_rate, util::Rng& rng) {
  const auto size = kSyntheticAlphabet.size();
  for (char& c : text) {
    if (rng.uniform() < noise_rate) {
      // shift by 1..|A|-1 positions so the replacement always differs
      const auto pos = kSyntheticAlphabet.find(c);
      if (pos == std::string_view::npos) throw InputError("character outside the synthetic alphabet");
      const auto shift = 1 + rng.below(size - 1);
      c = kSyntheticAlphabet[(pos + shift) % size];
    }
  }
}

Corpus generate_synthetic_corpus(SyntheticTask task, int n, double noise_rate, std::uint64_t seed,
                                 const SyntheticOptions& options) {
  if (n < 1) throw ParameterError("corpus size must be >= 1");
  if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) {
    throw ParameterError("noise_rate must lie in [0, 1]");
  }
  if (options.min_chars < 1 || options.max_chars < options.min_chars) {
    throw ParameterError("invalid source length range");
  }
  if (options.confusable_letters < 0 || options.confusable_letters > 26 ||
      !(options.confusion_rate >= 0.0 && options.confusion_rate <= 1.0)) {
    throw ParameterError("invalid confusion settings");
  }
  util::Rng rng(seed);
  const std::string_view letters = kSyntheticAlphabet.substr(0, 26);

  Corpus corpus;
  corpus.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto span = static_cast<std::uint64_t>(options.max_chars - options.min_chars + 1);
    const int len = options.min_chars + static_cast<int>(rng.below(span));
    std::string source;
    for (int j = 0; j < len; ++j) {
      const bool interior = j > 0 && j + 1 < len && source.back() != ' ';
      if (interior && rng.uniform() < options.space_rate) {
        source.push_back(' ');
      } else {
        source.push_back(letters[rng.below(letters.size())]);
      }
    }
    std::string reference = apply_task(task, source);
    for (char& c : reference) {
      const auto idx = static_cast<int>(c - 'a');
      if (c != ' ' && idx < options.confusable_letters && rng.uniform() < options.confusion_rate) {
        c = letters[static_cast<std::size_t>((idx + 13) % 26)];
      }
    }
    corrupt_in_place(reference, noise_rate, rng);
    std::string index = std::to_string(i);
    if (index.size() < 6) index.insert(0, 6 - index.size(), '0');
    Segment seg;
    seg.id = options.id_prefix + "-" + index;
    seg.lang_pair = i % 2 == 0 ? LangPair{"en", "xx"} : LangPair{"xx", "en"};
    seg.source = std::move(source);
    seg.reference = std::move(reference);
    corpus.push_back(std::move(seg));
  }
  return corpus;
}

}  // namespace prefalign::corpus
