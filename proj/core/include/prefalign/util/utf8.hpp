// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

namespace prefalign::util {

// Decodes UTF-8 into Unicode scalar values. Throws ParseError on malformed input.
std::u32string utf8_decode(std::string_view text);

std::string utf8_encode(std::u32string_view text);
std::string utf8_encode(char32_t cp);

}  // namespace prefalign::util
