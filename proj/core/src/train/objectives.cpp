// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "prefalign/error.hpp"
#include "prefalign/train/train.hpp"

namespace prefalign::train {

namespace {

toymt::EncodedPair encode_named(const toymt::ToyModel& model, const TrainExample& ex,
                                const std::string& target) {
  try {
    return model.encode(ex.source, target);
  } catch (const Error& e) {
    throw InputError("sample '" + ex.id + "': " + e.what());
  }
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double neg_log_sigmoid(double x) {
  // -log sigmoid(x) = log(1 + exp(-x))
  if (x >= 0.0) return std::log1p(std::exp(-x));
  return -x + std::log1p(std::exp(x));
}

ObjectiveValue sft_loss(const toymt::ToyModel& model, std::span<const TrainExample> batch) {
  if (batch.empty()) throw InputError("empty batch");
  std::vector<toymt::EncodedPair> seqs;
  seqs.reserve(batch.size());
  for (const auto& ex : batch) seqs.push_back(encode_named(model, ex, ex.chosen));
  const auto n = static_cast<double>(batch.size());
  toymt::Gradient g = toymt::loss_gradient(
      model, seqs, [&](std::span<const double> lp, std::span<const double>, std::span<double>) {
        toymt::LossValue v;
        v.d_logprobs.assign(lp.size(), -1.0 / n);
        for (double x : lp) v.value -= x;
        v.value /= n;
        return v;
      });
  ObjectiveValue out;
  out.loss = g.value;
  out.sft_term = g.value;
  out.grad = std::move(g.grad);
  return out;
}

ObjectiveValue cpo_loss(const toymt::ToyModel& model, std::span<const TrainExample> batch,
                        double beta) {
  if (batch.empty()) throw InputError("empty batch");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ParameterError("beta must be >= 0");
  const std::size_t n = batch.size();
  // sequences [0, n) are the chosen side, [n, 2n) the rejected side
  std::vector<toymt::EncodedPair> seqs;
  seqs.reserve(2 * n);
  for (const auto& ex : batch) seqs.push_back(encode_named(model, ex, ex.chosen));
  for (const auto& ex : batch) {
    if (!ex.rejected) throw InputError("sample '" + ex.id + "' has no rejected translation");
    seqs.push_back(encode_named(model, ex, *ex.rejected));
  }
  const auto nd = static_cast<double>(n);
  double pref = 0.0;
  double sft = 0.0;
  toymt::Gradient g = toymt::loss_gradient(
      model, seqs, [&](std::span<const double> lp, std::span<const double>, std::span<double>) {
        toymt::LossValue v;
        v.d_logprobs.assign(2 * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          const double margin = lp[i] - lp[n + i];
          pref += neg_log_sigmoid(beta * margin);
          sft -= lp[i];
          const double s = beta * sigmoid(-beta * margin) / nd;
          v.d_logprobs[i] = -s - 1.0 / nd;
          v.d_logprobs[n + i] = s;
        }
        pref /= nd;
        sft /= nd;
        v.value = pref + sft;
        return v;
      });
  ObjectiveValue out;
  out.loss = g.value;
  out.pref_term = pref;
  out.sft_term = sft;
  out.grad = std::move(g.grad);
  return out;
}

}  // namespace prefalign::train
