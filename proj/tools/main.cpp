// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli/commands.hpp"

int main(int argc, char** argv) { return prefalign::cli::run(argc, argv); }
