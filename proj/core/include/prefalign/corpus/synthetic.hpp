// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "prefalign/corpus/types.hpp"
#include "prefalign/util/rng.hpp"

namespace prefalign::corpus {

enum class SyntheticTask { kCipher, kReverse };

SyntheticTask parse_task(const std::string& name);
const char* to_string(SyntheticTask task);

// Characters used by generated sources and by corruption: a-z and space.
inline constexpr std::string_view kSyntheticAlphabet = "abcdefghijklmnopqrstuvwxyz ";

struct SyntheticOptions {
  int min_chars = 4;
  int max_chars = 10;
  // Chance that a character position (not first/last) becomes a space.
  double space_rate = 0.15;
  std::string id_prefix = "seg";
  // Systematic reference confusion: each output letter among the first
  // `confusable_letters` of a-z is swapped, with probability confusion_rate,
  // for its partner 13 places away. Unlike `noise_rate` the swap is always
  // the same letter, so a model trained on such references keeps two
  // competing readings of those letters.
  int confusable_letters = 0;
  double confusion_rate = 0.0;
};

// Affine substitution over a-z (letter i -> 7i+3 mod 26); other characters
// pass through unchanged.
std::string substitution_cipher(std::string_view text);

// The exact noiseless transform for `task`.
std::string apply_task(SyntheticTask task, std::string_view source);

// Replaces each character, with probability noise_rate, by a different
// character of kSyntheticAlphabet. Throws InputError for characters outside
// the alphabet.
void corrupt_in_place(std::string& text, double noise_rate, util::Rng& rng);

// Generates n segments. References are the task transform, after the
// optional systematic confusion, with each character independently replaced,
// with probability noise_rate, by a different character of
// kSyntheticAlphabet. Even indices are tagged en-xx,
// odd indices xx-en. Pure function of its arguments.
Corpus generate_synthetic_corpus(SyntheticTask task, int n, double noise_rate, std::uint64_t seed,
                                 const SyntheticOptions& options = {});

}  // namespace prefalign::corpus
