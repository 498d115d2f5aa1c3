// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace prefalign::cli {

// Parses argv, runs one subcommand and returns the process exit status:
// 0 on success (and for --help), 2 for usage errors, 1 for any other failure.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace prefalign::cli
