// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>

#include "prefalign/error.hpp"
#include "prefalign/toymt/model.hpp"
#include "prefalign/util/rng.hpp"
#include "transformer.hpp"

namespace prefalign::toymt {

namespace {

// Runs the prefix [BOS, source..., SEP] and returns the state plus the
// logits for the first target token.
struct Decoder {
  const ToyModel& model;
  detail::Network net;
  detail::DecodeState state;
  std::vector<double> logits;
  int cap = 0;

  Decoder(const ToyModel& m, std::string_view source, int max_chars)
      : model(m),
        net(m.config(), m.layout(), m.params().data()),
        state(net.start()),
        logits(static_cast<std::size_t>(m.config().vocab_size())) {
    const std::vector<int> src = m.vocab().encode(source);
    cap = std::min(max_chars, m.config().max_len - static_cast<int>(src.size()) - 3);
    if (cap < 0) {
      throw InputError("source of " + std::to_string(src.size()) +
                       " characters does not fit max_len " + std::to_string(m.config().max_len));
    }
    net.step(state, kBos, 0, 0, logits.data());
    for (std::size_t j = 0; j < src.size(); ++j) {
      net.step(state, src[j], static_cast<int>(j + 1), 0, logits.data());
    }
    net.step(state, kSep, 0, 1, logits.data());
  }

  // Token ids that may be emitted next.
  static bool allowed(int id) { return id == kEos || id >= kFirstCharId; }

  template <typename Choose>
  std::string run(Choose&& choose) {
    std::vector<int> out;
    while (static_cast<int>(out.size()) < cap) {
      const int id = choose(logits);
      if (id == kEos) break;
      out.push_back(id);
      net.step(state, id, static_cast<int>(out.size()), 1, logits.data());
    }
    return model.vocab().decode(out);
  }
};

}  // namespace

std::string greedy_decode(const ToyModel& model, std::string_view source, int max_chars) {
  Decoder dec(model, source, max_chars);
  return dec.run([](const std::vector<double>& z) {
    int best = -1;
    for (int id = 0; id < static_cast<int>(z.size()); ++id) {
      if (!Decoder::allowed(id)) continue;
      if (best < 0 || z[static_cast<std::size_t>(id)] > z[static_cast<std::size_t>(best)]) best = id;
    }
    return best;
  });
}

std::string sample_top_p(const ToyModel& model, std::string_view source, const SamplingParams& sp,
                         int max_chars, std::uint64_t seed) {
  if (!(sp.top_p > 0.0 && sp.top_p <= 1.0)) throw ParameterError("top_p must be in (0, 1]");
  if (!(sp.temperature > 0.0)) throw ParameterError("temperature must be positive");
  Decoder dec(model, source, max_chars);
  util::Rng rng(seed);
  std::vector<int> ids;
  std::vector<double> probs;
  return dec.run([&](const std::vector<double>& z) {
    ids.clear();
    for (int id = 0; id < static_cast<int>(z.size()); ++id) {
      if (Decoder::allowed(id)) ids.push_back(id);
    }
    double mx = -INFINITY;
    for (int id : ids) mx = std::max(mx, z[static_cast<std::size_t>(id)] / sp.temperature);
    probs.assign(z.size(), 0.0);
    double total = 0.0;
    for (int id : ids) {
      const double p = std::exp(z[static_cast<std::size_t>(id)] / sp.temperature - mx);
      probs[static_cast<std::size_t>(id)] = p;
      total += p;
    }
    for (int id : ids) probs[static_cast<std::size_t>(id)] /= total;
    std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
      return probs[static_cast<std::size_t>(a)] > probs[static_cast<std::size_t>(b)];
    });
    std::size_t keep = 0;
    double mass = 0.0;
    while (keep < ids.size()) {
      mass += probs[static_cast<std::size_t>(ids[keep])];
      ++keep;
      if (mass >= sp.top_p) break;
    }
    const double u = rng.uniform() * mass;
    double acc = 0.0;
    for (std::size_t i = 0; i < keep; ++i) {
      acc += probs[static_cast<std::size_t>(ids[i])];
      if (u < acc) return ids[i];
    }
    return ids[keep - 1];
  });
}

std::vector<std::string> generate_candidates(const ToyModel& model, std::string_view source, int k,
                                             const SamplingParams& sp, int max_chars,
                                             std::uint64_t base_seed) {
  if (k < 1) throw ParameterError("candidate count must be at least 1");
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 1; i <= k; ++i) {
    out.push_back(sample_top_p(model, source, sp, max_chars, base_seed + static_cast<std::uint64_t>(i)));
  }
  return out;
}

}  // namespace prefalign::toymt
