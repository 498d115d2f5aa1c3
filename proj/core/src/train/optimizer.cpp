// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "prefalign/error.hpp"
#include "prefalign/train/train.hpp"

namespace prefalign::train {

void Sgd::update(std::span<double> params, std::span<const double> grad, double lr) {
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
}

void Adam::update(std::span<double> params, std::span<const double> grad, double lr) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw ContractError("optimizer state size does not match the parameters");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = kAdamBeta1 * m_[i] + (1.0 - kAdamBeta1) * grad[i];
    v_[i] = kAdamBeta2 * v_[i] + (1.0 - kAdamBeta2) * grad[i] * grad[i];
    params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kAdamEps);
  }
}

}  // namespace prefalign::train
