// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prefalign/toymt/config.hpp"

namespace prefalign::toymt {

// Token ids for [BOS, source..., SEP, target..., EOS] plus per-token segment
// (0 = source side, 1 = target side) and position within the segment. The
// model's positional signal is the position inside each segment, so target
// character i and source character i share a position code.
//
// target_mask[t] is set when the prediction made at position t (of token
// t + 1) belongs to the target span, i.e. for the target characters and EOS.
struct EncodedPair {
  std::vector<int> tokens;
  std::vector<int> positions;
  std::vector<std::uint8_t> segments;
  std::vector<std::uint8_t> target_mask;

  std::size_t length() const { return tokens.size(); }
  std::size_t n_target_predictions() const;
};

// Offset and extent of one named tensor inside the flat parameter vector.
struct TensorView {
  std::size_t offset = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t size() const { return rows * cols; }
};

// Named layout of the flat parameter vector. Names: tok_emb, pos_emb,
// seg_emb, L<i>.ln1_g, L<i>.ln1_b, L<i>.w_qkv, L<i>.b_qkv, L<i>.w_o,
// L<i>.b_o, L<i>.ln2_g, L<i>.ln2_b, L<i>.w_1, L<i>.b_1, L<i>.w_2, L<i>.b_2,
// lnf_g, lnf_b, w_out, b_out. Matrices are row-major [in x out].
class ParamLayout {
 public:
  explicit ParamLayout(const ModelConfig& config);
  const TensorView& at(const std::string& name) const;
  std::size_t total() const { return total_; }
  const std::map<std::string, TensorView>& tensors() const { return tensors_; }

 private:
  std::map<std::string, TensorView> tensors_;
  std::size_t total_ = 0;
};

class ToyModel {
 public:
  // Seeded initialization: output projection and its bias are zero, so the
  // first next-token distribution is uniform; layer-norm gains are one and
  // biases zero; everything else is small Gaussian noise.
  static ToyModel init(const ModelConfig& config);
  // Adopts an existing parameter vector (checkpoint load). Throws
  // InputError on a size mismatch or non-finite entries.
  static ToyModel from_params(const ModelConfig& config, std::vector<double> params);

  const ModelConfig& config() const { return config_; }
  const Vocabulary& vocab() const { return vocab_; }
  const ParamLayout& layout() const { return layout_; }

  std::span<const double> params() const { return params_; }
  std::span<double> mutable_params() { return params_; }
  std::span<const double> tensor(const std::string& name) const;
  std::span<double> mutable_tensor(const std::string& name);

  // Throws InputError for unknown characters or when the encoded pair would
  // exceed config().max_len.
  EncodedPair encode(std::string_view source, std::string_view target) const;
  // Longest target (in characters) that still fits next to `source`.
  int max_target_chars(std::string_view source) const;

  // log pi(target | source): sum over target predictions of the
  // log-softmax probability of the realized token.
  double sequence_logprob(std::string_view source, std::string_view target) const;
  double sequence_logprob(const EncodedPair& pair) const;

  // Full-sequence logits, row t = distribution over token t + 1. Row-major
  // [length x vocab].
  std::vector<double> logits(const EncodedPair& pair) const;

  // FNV-1a over the raw parameter bytes; cheap identity for logs.
  std::uint64_t checksum() const;

 private:
  ToyModel(ModelConfig config, std::vector<double> params);

  ModelConfig config_;
  Vocabulary vocab_;
  ParamLayout layout_;
  std::vector<double> params_;
};

// -- reverse-mode gradients -------------------------------------------------

// Value of a scalar objective given the log-probabilities of a set of
// sequences and the raw parameters. The callback fills `d_logprobs` (one
// entry per sequence) and may add direct parameter terms into `d_params`.
struct LossValue {
  double value = 0.0;
  std::vector<double> d_logprobs;
};
using LossFn = std::function<LossValue(std::span<const double> logprobs,
                                       std::span<const double> params, std::span<double> d_params)>;

struct Gradient {
  double value = 0.0;
  std::vector<double> logprobs;
  std::vector<double> grad;
};

// Runs every sequence forward, evaluates `loss`, and back-propagates the
// chain rule through the model analytically. Throws NumericError when the
// loss or any gradient entry is not finite.
Gradient loss_gradient(const ToyModel& model, std::span<const EncodedPair> sequences,
                       const LossFn& loss);

// -- decoding ---------------------------------------------------------------

// Argmax decoding (ties to the lowest token id) until EOS or `max_chars`
// characters. Padding/BOS/SEP are never emitted.
std::string greedy_decode(const ToyModel& model, std::string_view source, int max_chars);

struct SamplingParams {
  double top_p = 0.6;
  double temperature = 0.9;
};

// Nucleus sampling: logits / temperature, softmax, keep the smallest
// descending-probability prefix whose mass reaches top_p (the crossing token
// included), renormalize, draw. Deterministic for a given seed.
std::string sample_top_p(const ToyModel& model, std::string_view source, const SamplingParams& sp,
                         int max_chars, std::uint64_t seed);

// K samples; sample k (1-based) uses seed base_seed + k. Duplicates kept.
std::vector<std::string> generate_candidates(const ToyModel& model, std::string_view source, int k,
                                             const SamplingParams& sp, int max_chars,
                                             std::uint64_t base_seed);

// -- persistence ------------------------------------------------------------
//
// Layout: 8-byte magic "PFALMDL1", uint64 LE length of the config JSON, the
// JSON bytes, uint64 LE parameter count, then the parameters as IEEE-754
// binary64 little-endian.

void save_checkpoint(const ToyModel& model, const std::filesystem::path& path);
ToyModel load_checkpoint(const std::filesystem::path& path);

}  // namespace prefalign::toymt
