// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "transformer.hpp"

#include <cmath>
#include <limits>

namespace prefalign::toymt::detail {

namespace {

constexpr double kLnEps = 1e-5;
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)
constexpr double kGeluA = 0.044715;

double gelu(double x) {
  return 0.5 * x * (1.0 + std::tanh(kGeluC * (x + kGeluA * x * x * x)));
}

double gelu_grad(double x) {
  const double th = std::tanh(kGeluC * (x + kGeluA * x * x * x));
  return 0.5 * (1.0 + th) + 0.5 * x * (1.0 - th * th) * kGeluC * (1.0 + 3.0 * kGeluA * x * x);
}

// Row-wise layer norm. Writes normalized rows to xhat and 1/std to rstd.
Mat layer_norm(const Mat& x, const Eigen::Map<const RowVec>& gain,
               const Eigen::Map<const RowVec>& bias, Mat& xhat, ColVec& rstd) {
  const Eigen::Index rows = x.rows();
  const auto d = static_cast<double>(x.cols());
  xhat.resize(rows, x.cols());
  rstd.resize(rows);
  for (Eigen::Index t = 0; t < rows; ++t) {
    const double mu = x.row(t).sum() / d;
    const double var = (x.row(t).array() - mu).square().sum() / d;
    rstd(t) = 1.0 / std::sqrt(var + kLnEps);
    xhat.row(t) = (x.row(t).array() - mu) * rstd(t);
  }
  Mat out = xhat.array().rowwise() * gain.array();
  out.rowwise() += bias;
  return out;
}

// Backward of layer_norm. Accumulates gain/bias gradients and returns dx.
Mat layer_norm_backward(const Mat& dh, const Mat& xhat, const ColVec& rstd,
                        const Eigen::Map<const RowVec>& gain, double* d_gain, double* d_bias) {
  const Eigen::Index cols = dh.cols();
  Eigen::Map<RowVec>(d_gain, cols) += (dh.array() * xhat.array()).colwise().sum().matrix();
  Eigen::Map<RowVec>(d_bias, cols) += dh.colwise().sum();
  const Mat dxhat = dh.array().rowwise() * gain.array();
  Mat dx(dh.rows(), cols);
  const auto d = static_cast<double>(cols);
  for (Eigen::Index t = 0; t < dh.rows(); ++t) {
    const double mean_dxhat = dxhat.row(t).sum() / d;
    const double mean_dxhat_xhat = dxhat.row(t).dot(xhat.row(t)) / d;
    dx.row(t) = rstd(t) * (dxhat.row(t).array() - mean_dxhat - xhat.row(t).array() * mean_dxhat_xhat);
  }
  return dx;
}

void softmax_inplace(double* row, Eigen::Index n) {
  double mx = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) mx = std::max(mx, row[j]);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    row[j] = std::exp(row[j] - mx);
    sum += row[j];
  }
  for (Eigen::Index j = 0; j < n; ++j) row[j] /= sum;
}

}  // namespace

Network::Network(const ModelConfig& config, const ParamLayout& layout, const double* params)
    : config_(config),
      params_(params),
      d_(config.dim),
      f_(config.ffn()),
      v_(config.vocab_size()),
      heads_(config.n_heads),
      head_dim_(config.dim / config.n_heads),
      scale_(1.0 / std::sqrt(static_cast<double>(config.dim / config.n_heads))) {
  tok_emb_ = layout.at("tok_emb").offset;
  pos_emb_ = layout.at("pos_emb").offset;
  seg_emb_ = layout.at("seg_emb").offset;
  lnf_g_ = layout.at("lnf_g").offset;
  lnf_b_ = layout.at("lnf_b").offset;
  w_out_ = layout.at("w_out").offset;
  b_out_ = layout.at("b_out").offset;
  for (int l = 0; l < config.n_layers; ++l) {
    const std::string p = "L" + std::to_string(l) + ".";
    layers_.push_back({layout.at(p + "ln1_g").offset, layout.at(p + "ln1_b").offset,
                       layout.at(p + "w_qkv").offset, layout.at(p + "b_qkv").offset,
                       layout.at(p + "w_o").offset, layout.at(p + "b_o").offset,
                       layout.at(p + "ln2_g").offset, layout.at(p + "ln2_b").offset,
                       layout.at(p + "w_1").offset, layout.at(p + "b_1").offset,
                       layout.at(p + "w_2").offset, layout.at(p + "b_2").offset});
  }
}

Mat Network::embed(const EncodedPair& pair) const {
  const auto n = static_cast<Eigen::Index>(pair.length());
  Mat x(n, d_);
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    x.row(t) = vec(tok_emb_ + static_cast<std::size_t>(pair.tokens[ut] * d_), d_) +
               vec(pos_emb_ + static_cast<std::size_t>(pair.positions[ut] * d_), d_) +
               vec(seg_emb_ + static_cast<std::size_t>(pair.segments[ut] * d_), d_);
  }
  return x;
}

Mat Network::run_layers(Mat x, ForwardCache* cache) const {
  const Eigen::Index n = x.rows();
  if (cache) cache->layers.resize(layers_.size());
  LayerCache scratch;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& o = layers_[l];
    LayerCache& c = cache ? cache->layers[l] : scratch;
    c.x_in = x;
    c.h1 = layer_norm(x, vec(o.ln1_g, d_), vec(o.ln1_b, d_), c.xhat1, c.rstd1);
    c.qkv.noalias() = c.h1 * mat(o.w_qkv, d_, 3 * d_);
    c.qkv.rowwise() += vec(o.b_qkv, 3 * d_);
    c.attn.setZero(n, d_);
    c.probs.resize(static_cast<std::size_t>(heads_));
    for (Eigen::Index h = 0; h < heads_; ++h) {
      const auto q = c.qkv.middleCols(h * head_dim_, head_dim_);
      const auto k = c.qkv.middleCols(d_ + h * head_dim_, head_dim_);
      const auto v = c.qkv.middleCols(2 * d_ + h * head_dim_, head_dim_);
      Mat& p = c.probs[static_cast<std::size_t>(h)];
      p.noalias() = (q * k.transpose()) * scale_;
      for (Eigen::Index t = 0; t < n; ++t) {
        softmax_inplace(p.row(t).data(), t + 1);
        p.row(t).tail(n - t - 1).setZero();
      }
      c.attn.middleCols(h * head_dim_, head_dim_).noalias() = p * v;
    }
    c.x_mid = x;
    c.x_mid.noalias() += c.attn * mat(o.w_o, d_, d_);
    c.x_mid.rowwise() += vec(o.b_o, d_);
    c.h2 = layer_norm(c.x_mid, vec(o.ln2_g, d_), vec(o.ln2_b, d_), c.xhat2, c.rstd2);
    c.u.noalias() = c.h2 * mat(o.w_1, d_, f_);
    c.u.rowwise() += vec(o.b_1, f_);
    c.g = c.u.unaryExpr(&gelu);
    x = c.x_mid;
    x.noalias() += c.g * mat(o.w_2, f_, d_);
    x.rowwise() += vec(o.b_2, d_);
  }
  return x;
}

Mat Network::logits(const EncodedPair& pair) const {
  const Mat x = run_layers(embed(pair), nullptr);
  Mat xhat;
  ColVec rstd;
  const Mat hf = layer_norm(x, vec(lnf_g_, d_), vec(lnf_b_, d_), xhat, rstd);
  Mat z = hf * mat(w_out_, d_, v_);
  z.rowwise() += vec(b_out_, v_);
  return z;
}

double Network::forward(const EncodedPair& pair, ForwardCache* cache) const {
  const Mat x = run_layers(embed(pair), cache);
  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.hf = layer_norm(x, vec(lnf_g_, d_), vec(lnf_b_, d_), c.xhatf, c.rstdf);
  Mat z = c.hf * mat(w_out_, d_, v_);
  z.rowwise() += vec(b_out_, v_);
  const Eigen::Index n = z.rows();
  c.probs_out.setZero(n, v_);
  double logprob = 0.0;
  for (Eigen::Index t = 0; t + 1 < n; ++t) {
    if (!pair.target_mask[static_cast<std::size_t>(t)]) continue;
    const double mx = z.row(t).maxCoeff();
    const double lse = mx + std::log((z.row(t).array() - mx).exp().sum());
    logprob += z(t, pair.tokens[static_cast<std::size_t>(t + 1)]) - lse;
    c.probs_out.row(t) = (z.row(t).array() - lse).exp();
  }
  c.logprob = logprob;
  return logprob;
}

void Network::backward(const EncodedPair& pair, const ForwardCache& cache, double upstream,
                       double* grad) const {
  const Eigen::Index n = static_cast<Eigen::Index>(pair.length());
  // d logprob / d z = onehot(next) - softmax at masked rows
  Mat dz = -cache.probs_out;
  for (Eigen::Index t = 0; t + 1 < n; ++t) {
    if (pair.target_mask[static_cast<std::size_t>(t)]) {
      dz(t, pair.tokens[static_cast<std::size_t>(t + 1)]) += 1.0;
    }
  }
  dz *= upstream;

  Eigen::Map<Mat>(grad + w_out_, d_, v_).noalias() += cache.hf.transpose() * dz;
  Eigen::Map<RowVec>(grad + b_out_, v_) += dz.colwise().sum();
  Mat dh = dz * mat(w_out_, d_, v_).transpose();
  Mat dx = layer_norm_backward(dh, cache.xhatf, cache.rstdf, vec(lnf_g_, d_), grad + lnf_g_,
                               grad + lnf_b_);

  for (std::size_t li = layers_.size(); li-- > 0;) {
    const auto& o = layers_[li];
    const LayerCache& c = cache.layers[li];

    // MLP: x_out = x_mid + gelu(h2 W1 + b1) W2 + b2
    Eigen::Map<Mat>(grad + o.w_2, f_, d_).noalias() += c.g.transpose() * dx;
    Eigen::Map<RowVec>(grad + o.b_2, d_) += dx.colwise().sum();
    Mat du = dx * mat(o.w_2, f_, d_).transpose();
    du.array() *= c.u.unaryExpr(&gelu_grad).array();
    Eigen::Map<Mat>(grad + o.w_1, d_, f_).noalias() += c.h2.transpose() * du;
    Eigen::Map<RowVec>(grad + o.b_1, f_) += du.colwise().sum();
    const Mat dh2 = du * mat(o.w_1, d_, f_).transpose();
    dx += layer_norm_backward(dh2, c.xhat2, c.rstd2, vec(o.ln2_g, d_), grad + o.ln2_g,
                              grad + o.ln2_b);

    // attention: x_mid = x_in + attn W_o + b_o
    Eigen::Map<Mat>(grad + o.w_o, d_, d_).noalias() += c.attn.transpose() * dx;
    Eigen::Map<RowVec>(grad + o.b_o, d_) += dx.colwise().sum();
    const Mat dattn = dx * mat(o.w_o, d_, d_).transpose();
    Mat dqkv = Mat::Zero(n, 3 * d_);
    for (Eigen::Index h = 0; h < heads_; ++h) {
      const Mat& p = c.probs[static_cast<std::size_t>(h)];
      const auto q = c.qkv.middleCols(h * head_dim_, head_dim_);
      const auto k = c.qkv.middleCols(d_ + h * head_dim_, head_dim_);
      const auto v = c.qkv.middleCols(2 * d_ + h * head_dim_, head_dim_);
      const auto da = dattn.middleCols(h * head_dim_, head_dim_);
      const Mat dp = da * v.transpose();
      dqkv.middleCols(2 * d_ + h * head_dim_, head_dim_).noalias() = p.transpose() * da;
      // softmax backward, row-wise: ds = p * (dp - <dp, p>)
      const ColVec inner = (dp.array() * p.array()).rowwise().sum();
      Mat ds = p.array() * (dp.array().colwise() - inner.array());
      ds *= scale_;
      dqkv.middleCols(h * head_dim_, head_dim_).noalias() = ds * k;
      dqkv.middleCols(d_ + h * head_dim_, head_dim_).noalias() = ds.transpose() * q;
    }
    Eigen::Map<Mat>(grad + o.w_qkv, d_, 3 * d_).noalias() += c.h1.transpose() * dqkv;
    Eigen::Map<RowVec>(grad + o.b_qkv, 3 * d_) += dqkv.colwise().sum();
    const Mat dh1 = dqkv * mat(o.w_qkv, d_, 3 * d_).transpose();
    dx += layer_norm_backward(dh1, c.xhat1, c.rstd1, vec(o.ln1_g, d_), grad + o.ln1_g,
                              grad + o.ln1_b);
  }

  for (Eigen::Index t = 0; t < n; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    Eigen::Map<RowVec>(grad + tok_emb_ + static_cast<std::size_t>(pair.tokens[ut] * d_), d_) +=
        dx.row(t);
    Eigen::Map<RowVec>(grad + pos_emb_ + static_cast<std::size_t>(pair.positions[ut] * d_), d_) +=
        dx.row(t);
    Eigen::Map<RowVec>(grad + seg_emb_ + static_cast<std::size_t>(pair.segments[ut] * d_), d_) +=
        dx.row(t);
  }
}

DecodeState Network::start() const {
  DecodeState s;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    s.keys.emplace_back(config_.max_len, d_);
    s.values.emplace_back(config_.max_len, d_);
  }
  return s;
}

void Network::step(DecodeState& state, int token, int position, int segment, double* out) const {
  const Eigen::Index t = state.length;
  RowVec x = vec(tok_emb_ + static_cast<std::size_t>(token * d_), d_) +
             vec(pos_emb_ + static_cast<std::size_t>(position * d_), d_) +
             vec(seg_emb_ + static_cast<std::size_t>(segment * d_), d_);
  Mat xhat;
  ColVec rstd;
  RowVec scores(t + 1);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& o = layers_[l];
    const Mat h1 = layer_norm(x, vec(o.ln1_g, d_), vec(o.ln1_b, d_), xhat, rstd);
    RowVec qkv = h1 * mat(o.w_qkv, d_, 3 * d_);
    qkv += vec(o.b_qkv, 3 * d_);
    state.keys[l].row(t) = qkv.segment(d_, d_);
    state.values[l].row(t) = qkv.segment(2 * d_, d_);
    RowVec attn = RowVec::Zero(d_);
    for (Eigen::Index h = 0; h < heads_; ++h) {
      const auto q = qkv.segment(h * head_dim_, head_dim_);
      const auto keys = state.keys[l].block(0, h * head_dim_, t + 1, head_dim_);
      const auto vals = state.values[l].block(0, h * head_dim_, t + 1, head_dim_);
      scores.noalias() = (q * keys.transpose()) * scale_;
      softmax_inplace(scores.data(), t + 1);
      attn.segment(h * head_dim_, head_dim_).noalias() = scores * vals;
    }
    x.noalias() += attn * mat(o.w_o, d_, d_);
    x += vec(o.b_o, d_);
    const Mat h2 = layer_norm(x, vec(o.ln2_g, d_), vec(o.ln2_b, d_), xhat, rstd);
    RowVec u = h2 * mat(o.w_1, d_, f_);
    u += vec(o.b_1, f_);
    const RowVec g = u.unaryExpr(&gelu);
    x.noalias() += g * mat(o.w_2, f_, d_);
    x += vec(o.b_2, d_);
  }
  const Mat hf = layer_norm(x, vec(lnf_g_, d_), vec(lnf_b_, d_), xhat, rstd);
  Eigen::Map<RowVec> logits(out, v_);
  logits.noalias() = hf * mat(w_out_, d_, v_);
  logits += vec(b_out_, v_);
  ++state.length;
}

}  // namespace prefalign::toymt::detail
