// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

// Pre-norm decoder-only transformer over a flat parameter vector, with a
// cached full-sequence forward pass, its hand-derived backward pass, and an
// incremental (KV-cached) step for decoding.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "prefalign/toymt/model.hpp"

namespace prefalign::toymt::detail {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVec = Eigen::Matrix<double, 1, Eigen::Dynamic>;
using ColVec = Eigen::VectorXd;

struct LayerCache {
  Mat x_in;
  Mat xhat1;
  ColVec rstd1;
  Mat h1;
  Mat qkv;
  std::vector<Mat> probs;  // one T x T causal attention matrix per head
  Mat attn;
  Mat x_mid;
  Mat xhat2;
  ColVec rstd2;
  Mat h2;
  Mat u;
  Mat g;
};

struct ForwardCache {
  std::vector<LayerCache> layers;
  Mat xhatf;
  ColVec rstdf;
  Mat hf;
  Mat probs_out;  // softmax rows at masked positions, zero elsewhere
  double logprob = 0.0;
};

struct DecodeState {
  std::vector<Mat> keys;    // per layer, max_len x dim
  std::vector<Mat> values;  // per layer, max_len x dim
  int length = 0;
};

class Network {
 public:
  Network(const ModelConfig& config, const ParamLayout& layout, const double* params);

  // Returns log pi(target | source). Fills `cache` when non-null.
  double forward(const EncodedPair& pair, ForwardCache* cache) const;
  Mat logits(const EncodedPair& pair) const;
  // grad += upstream * d logprob / d params
  void backward(const EncodedPair& pair, const ForwardCache& cache, double upstream,
                double* grad) const;

  DecodeState start() const;
  // Appends one token and writes the logits for the next token into `out`
  // (size vocab).
  void step(DecodeState& state, int token, int position, int segment, double* out) const;

 private:
  struct LayerOffsets {
    std::size_t ln1_g, ln1_b, w_qkv, b_qkv, w_o, b_o, ln2_g, ln2_b, w_1, b_1, w_2, b_2;
  };

  Eigen::Map<const Mat> mat(std::size_t off, Eigen::Index rows, Eigen::Index cols) const {
    return Eigen::Map<const Mat>(params_ + off, rows, cols);
  }
  Eigen::Map<const RowVec> vec(std::size_t off, Eigen::Index n) const {
    return Eigen::Map<const RowVec>(params_ + off, n);
  }
  Mat embed(const EncodedPair& pair) const;
  Mat run_layers(Mat x, ForwardCache* cache) const;

  const ModelConfig& config_;
  const double* params_;
  Eigen::Index d_, f_, v_, heads_, head_dim_;
  double scale_;
  std::size_t tok_emb_, pos_emb_, seg_emb_, lnf_g_, lnf_b_, w_out_, b_out_;
  std::vector<LayerOffsets> layers_;
};

}  // namespace prefalign::toymt::detail
