// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "prefalign/error.hpp"
#include "prefalign/train/train.hpp"

namespace prefalign::train {

double lr_at(long step, double base_lr, int warmup_steps) {
  if (warmup_steps < 1) throw ParameterError("warmup_steps must be >= 1");
  if (step < 0) throw ParameterError("step must be >= 0");
  const auto s = static_cast<double>(step);
  const auto w = static_cast<double>(warmup_steps);
  if (step <= warmup_steps) return base_lr * s / w;
  return base_lr * std::sqrt(w / s);
}

}  // namespace prefalign::train
