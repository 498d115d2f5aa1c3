// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "prefalign/toymt/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "prefalign/error.hpp"
#include "prefalign/util/rng.hpp"
#include "prefalign/util/utf8.hpp"
#include "transformer.hpp"

namespace prefalign::toymt {

std::size_t EncodedPair::n_target_predictions() const {
  std::size_t n = 0;
  for (auto m : target_mask) n += m;
  return n;
}

ParamLayout::ParamLayout(const ModelConfig& config) {
  const auto d = static_cast<std::size_t>(config.dim);
  const auto f = static_cast<std::size_t>(config.ffn());
  const auto v = static_cast<std::size_t>(config.vocab_size());
  auto add = [&](const std::string& name, std::size_t rows, std::size_t cols) {
    tensors_[name] = TensorView{total_, rows, cols};
    total_ += rows * cols;
  };
  add("tok_emb", v, d);
  add("pos_emb", static_cast<std::size_t>(config.max_len), d);
  add("seg_emb", 2, d);
  for (int l = 0; l < config.n_layers; ++l) {
    const std::string p = "L" + std::to_string(l) + ".";
    add(p + "ln1_g", 1, d);
    add(p + "ln1_b", 1, d);
    add(p + "w_qkv", d, 3 * d);
    add(p + "b_qkv", 1, 3 * d);
    add(p + "w_o", d, d);
    add(p + "b_o", 1, d);
    add(p + "ln2_g", 1, d);
    add(p + "ln2_b", 1, d);
    add(p + "w_1", d, f);
    add(p + "b_1", 1, f);
    add(p + "w_2", f, d);
    add(p + "b_2", 1, d);
  }
  add("lnf_g", 1, d);
  add("lnf_b", 1, d);
  add("w_out", d, v);
  add("b_out", 1, v);
}

const TensorView& ParamLayout::at(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw InputError("unknown tensor '" + name + "'");
  return it->second;
}

ToyModel::ToyModel(ModelConfig config, std::vector<double> params)
    : config_(std::move(config)),
      vocab_(config_.chars),
      layout_(config_),
      params_(std::move(params)) {}

ToyModel ToyModel::init(const ModelConfig& config) {
  config.validate();
  const ParamLayout layout(config);
  std::vector<double> params(layout.total(), 0.0);
  util::Rng rng(config.seed);
  const double depth_scale = 1.0 / std::sqrt(2.0 * config.n_layers);
  // Tensors are filled in offset order so the draw sequence is fixed.
  std::vector<std::pair<std::string, TensorView>> ordered(layout.tensors().begin(),
                                                          layout.tensors().end());
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.second.offset < b.second.offset; });
  for (const auto& [name, view] : ordered) {
    const std::string base = name.substr(name.find('.') + 1);
    double sd = 0.0;
    double fill = 0.0;
    if (base == "tok_emb" || base == "pos_emb" || base == "seg_emb") {
      sd = 0.1;
    } else if (base == "ln1_g" || base == "ln2_g" || base == "lnf_g") {
      fill = 1.0;
    } else if (base == "w_qkv" || base == "w_1") {
      sd = 1.0 / std::sqrt(static_cast<double>(view.rows));
    } else if (base == "w_o" || base == "w_2") {
      sd = depth_scale / std::sqrt(static_cast<double>(view.rows));
    }
    for (std::size_t i = 0; i < view.size(); ++i) {
      params[view.offset + i] = sd > 0.0 ? rng.normal(0.0, sd) : fill;
    }
  }
  return ToyModel(config, std::move(params));
}

ToyModel ToyModel::from_params(const ModelConfig& config, std::vector<double> params) {
  config.validate();
  const std::size_t expected = config.param_count();
  if (params.size() != expected) {
    throw InputError("parameter count " + std::to_string(params.size()) + " does not match " +
                     std::to_string(expected));
  }
  for (double p : params) {
    if (!std::isfinite(p)) throw InputError("non-finite parameter");
  }
  return ToyModel(config, std::move(params));
}

std::span<const double> ToyModel::tensor(const std::string& name) const {
  const auto& v = layout_.at(name);
  return std::span<const double>(params_).subspan(v.offset, v.size());
}

std::span<double> ToyModel::mutable_tensor(const std::string& name) {
  const auto& v = layout_.at(name);
  return std::span<double>(params_).subspan(v.offset, v.size());
}

int ToyModel::max_target_chars(std::string_view source) const {
  const auto s = static_cast<int>(util::utf8_decode(source).size());
  return config_.max_len - s - 3;
}

EncodedPair ToyModel::encode(std::string_view source, std::string_view target) const {
  const std::vector<int> src = vocab_.encode(source);
  const std::vector<int> tgt = vocab_.encode(target);
  const std::size_t length = src.size() + tgt.size() + 3;
  if (length > static_cast<std::size_t>(config_.max_len)) {
    throw InputError("sequence of " + std::to_string(length) + " tokens exceeds max_len " +
                     std::to_string(config_.max_len));
  }
  EncodedPair e;
  e.tokens.reserve(length);
  auto push = [&](int token, int pos, std::uint8_t seg, std::uint8_t mask) {
    e.tokens.push_back(token);
    e.positions.push_back(pos);
    e.segments.push_back(seg);
    e.target_mask.push_back(mask);
  };
  push(kBos, 0, 0, 0);
  for (std::size_t j = 0; j < src.size(); ++j) push(src[j], static_cast<int>(j + 1), 0, 0);
  push(kSep, 0, 1, 1);
  for (std::size_t j = 0; j < tgt.size(); ++j) push(tgt[j], static_cast<int>(j + 1), 1, 1);
  push(kEos, static_cast<int>(tgt.size() + 1), 1, 0);
  return e;
}

double ToyModel::sequence_logprob(std::string_view source, std::string_view target) const {
  return sequence_logprob(encode(source, target));
}

double ToyModel::sequence_logprob(const EncodedPair& pair) const {
  const detail::Network net(config_, layout_, params_.data());
  return net.forward(pair, nullptr);
}

std::vector<double> ToyModel::logits(const EncodedPair& pair) const {
  const detail::Network net(config_, layout_, params_.data());
  const detail::Mat z = net.logits(pair);
  return std::vector<double>(z.data(), z.data() + z.size());
}

std::uint64_t ToyModel::checksum() const {
  std::uint64_t h = 14695981039346656037ULL;
  for (double p : params_) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &p, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

Gradient loss_gradient(const ToyModel& model, std::span<const EncodedPair> sequences,
                       const LossFn& loss) {
  const detail::Network net(model.config(), model.layout(), model.params().data());
  std::vector<detail::ForwardCache> caches(sequences.size());
  Gradient out;
  out.logprobs.resize(sequences.size());
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    out.logprobs[i] = net.forward(sequences[i], &caches[i]);
  }
  out.grad.assign(model.params().size(), 0.0);
  LossValue lv = loss(out.logprobs, model.params(), out.grad);
  if (lv.d_logprobs.size() != sequences.size()) {
    throw ContractError("loss returned " + std::to_string(lv.d_logprobs.size()) +
                        " sequence gradients for " + std::to_string(sequences.size()) +
                        " sequences");
  }
  if (!std::isfinite(lv.value)) throw NumericError("loss is not finite");
  out.value = lv.value;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    if (lv.d_logprobs[i] == 0.0) continue;
    net.backward(sequences[i], caches[i], lv.d_logprobs[i], out.grad.data());
  }
  for (double g : out.grad) {
    if (!std::isfinite(g)) throw NumericError("gradient is not finite");
  }
  return out;
}

}  // namespace prefalign::toymt
