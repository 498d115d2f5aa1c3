// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "prefalign/eval/eval.hpp"

namespace prefalign::cli {

std::string eval_report_to_json(const eval::EvalReport& report);
eval::EvalReport read_eval_report(const std::filesystem::path& path);

}  // namespace prefalign::cli
