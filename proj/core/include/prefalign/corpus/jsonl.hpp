// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "prefalign/corpus/types.hpp"

namespace prefalign::corpus {

// JSON-lines persistence for Segment, CandidateSet, PreferencePair and
// CandidateScores. One object per line; unknown or missing fields are
// rejected with ParseError, invariant violations with ValidationError. Both
// carry the 1-based line number. Doubles are written with round-trip
// precision.
template <typename T>
std::vector<T> read_jsonl(const std::filesystem::path& path);

template <typename T>
void write_jsonl(const std::filesystem::path& path, std::span<const T> records);

template <typename T>
void write_jsonl(const std::filesystem::path& path, const std::vector<T>& records) {
  write_jsonl<T>(path, std::span<const T>(records));
}

// Single-record codecs used by the file functions; exposed for tests and for
// streaming callers.
template <typename T>
std::string to_json_line(const T& record);

template <typename T>
T from_json_line(const std::string& line, std::size_t line_no = 0);

}  // namespace prefalign::corpus
