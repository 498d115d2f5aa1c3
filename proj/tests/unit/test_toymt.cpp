// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>

#include "prefalign/error.hpp"
#include "prefalign/toymt/model.hpp"
#include "reference_model.hpp"

namespace prefalign::toymt {
namespace {

using testing::random_tiny_model;
using testing::ReferenceModel;

ModelConfig small_config() {
  ModelConfig cfg;
  cfg.chars = U"abcdefgh ";
  cfg.dim = 8;
  cfg.n_layers = 2;
  cfg.n_heads = 2;
  cfg.max_len = 20;
  cfg.seed = 11;
  return cfg;
}

TEST(ModelConfig, ParamCountMatchesLayout) {
  for (int dim : {4, 8, 12}) {
    for (int layers : {1, 2, 3}) {
      ModelConfig cfg = small_config();
      cfg.dim = dim;
      cfg.n_layers = layers;
      cfg.n_heads = 2;
      EXPECT_EQ(cfg.param_count(), ParamLayout(cfg).total());
      EXPECT_EQ(ToyModel::init(cfg).params().size(), cfg.param_count());
    }
  }
}

TEST(ModelConfig, JsonRoundTripAndStrictness) {
  const ModelConfig cfg = small_config();
  EXPECT_EQ(ModelConfig::from_json(cfg.to_json()), cfg);
  EXPECT_THROW(ModelConfig::from_json(R"({"dim": 8})"), ParseError);
  ModelConfig bad = cfg;
  bad.n_heads = 3;
  EXPECT_THROW(bad.validate(), ParameterError);
}

TEST(Encode, LayoutOfTokensPositionsAndMask) {
  const ToyModel model = ToyModel::init(small_config());
  const EncodedPair e = model.encode("ab", "cde");
  const int a = model.vocab().id(U'a');
  EXPECT_EQ(e.tokens, (std::vector<int>{kBos, a, a + 1, kSep, a + 2, a + 3, a + 4, kEos}));
  EXPECT_EQ(e.positions, (std::vector<int>{0, 1, 2, 0, 1, 2, 3, 4}));
  EXPECT_EQ(e.segments, (std::vector<std::uint8_t>{0, 0, 0, 1, 1, 1, 1, 1}));
  EXPECT_EQ(e.target_mask, (std::vector<std::uint8_t>{0, 0, 0, 1, 1, 1, 1, 0}));
  EXPECT_EQ(e.n_target_predictions(), 4u);
}

TEST(Encode, RejectsUnknownCharactersAndOverlength) {
  const ToyModel model = ToyModel::init(small_config());
  EXPECT_THROW(model.encode("abz", "a"), InputError);
  EXPECT_THROW(model.encode(std::string(10, 'a'), std::string(8, 'b')), InputError);
  EXPECT_NO_THROW(model.encode(std::string(10, 'a'), std::string(7, 'b')));
  EXPECT_EQ(model.max_target_chars(std::string(10, 'a')), 7);
}

TEST(Init, UniformFirstDistribution) {
  const ToyModel model = ToyModel::init(small_config());
  const double v = model.config().vocab_size();
  // three target characters plus EOS, each at probability 1/V
  EXPECT_NEAR(model.sequence_logprob("abc", "hgf"), -4.0 * std::log(v), 1e-12);
  EXPECT_NEAR(model.sequence_logprob("a", ""), -std::log(v), 1e-12);
}

TEST(Forward, MatchesStraightLoopReference) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ModelConfig cfg = small_config();
    cfg.seed = seed;
    ToyModel model = ToyModel::init(cfg);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, 0.3);
    for (double& p : model.mutable_params()) p = nd(gen);
    const ReferenceModel ref(model);
    for (const auto& [src, tgt] : std::vector<std::pair<std::string, std::string>>{
             {"abc", "cba"}, {"h", ""}, {"a b", "gfedcb"}}) {
      const EncodedPair e = model.encode(src, tgt);
      EXPECT_NEAR(model.sequence_logprob(e), ref.sequence_logprob(e), 1e-10);
      const auto z = model.logits(e);
      const auto lp = ref.log_softmax_rows(e);
      const std::size_t vs = static_cast<std::size_t>(cfg.vocab_size());
      for (std::size_t t = 0; t < e.length(); ++t) {
        // logits are defined up to a shift; compare normalized rows
        double mx = -1e300;
        for (std::size_t k = 0; k < vs; ++k) mx = std::max(mx, z[t * vs + k]);
        double s = 0.0;
        for (std::size_t k = 0; k < vs; ++k) s += std::exp(z[t * vs + k] - mx);
        for (std::size_t k = 0; k < vs; ++k) {
          EXPECT_NEAR(z[t * vs + k] - mx - std::log(s), lp[t][k], 1e-10);
        }
      }
    }
  }
}

double max_rel_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double denom = std::max({std::fabs(analytic[i]), std::fabs(numeric[i]), 1e-3});
    worst = std::max(worst, std::fabs(analytic[i] - numeric[i]) / denom);
  }
  return worst;
}

TEST(Gradient, WeightedLogprobsMatchFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    ToyModel model = random_tiny_model(seed);
    const std::vector<EncodedPair> seqs = {model.encode("abc", "cab"), model.encode("b a", "a"),
                                           model.encode("cc", "")};
    const std::vector<double> weights = {0.7, -1.3, 0.4};
    auto objective = [&](const ToyModel& m) {
      double v = 0.0;
      for (std::size_t i = 0; i < seqs.size(); ++i) v += weights[i] * m.sequence_logprob(seqs[i]);
      return v;
    };
    const Gradient g = loss_gradient(model, seqs, [&](std::span<const double> lp, auto, auto) {
      LossValue v;
      for (std::size_t i = 0; i < lp.size(); ++i) v.value += weights[i] * lp[i];
      v.d_logprobs = weights;
      return v;
    });
    EXPECT_NEAR(g.value, objective(model), 1e-12);
    std::vector<double> numeric(g.grad.size());
    const double h = 1e-4;
    for (std::size_t i = 0; i < numeric.size(); ++i) {
      double& p = model.mutable_params()[i];
      const double keep = p;
      p = keep + h;
      const double up = objective(model);
      p = keep - h;
      const double down = objective(model);
      p = keep;
      numeric[i] = (up - down) / (2 * h);
    }
    EXPECT_LT(max_rel_error(g.grad, numeric), 1e-4) << "seed " << seed;
  }
}

TEST(Gradient, DirectParameterTermsAreAdded) {
  const ToyModel model = random_tiny_model(3);
  const std::vector<EncodedPair> seqs = {model.encode("a", "b")};
  const Gradient g = loss_gradient(model, seqs, [](std::span<const double> lp,
                                                   std::span<const double> params,
                                                   std::span<double> d_params) {
    LossValue v;
    v.value = 0.5 * params[0] * params[0];
    d_params[0] += params[0];
    v.d_logprobs.assign(lp.size(), 0.0);
    return v;
  });
  EXPECT_DOUBLE_EQ(g.grad[0], model.params()[0]);
  for (std::size_t i = 1; i < g.grad.size(); ++i) ASSERT_EQ(g.grad[i], 0.0);
}

TEST(Gradient, NonFiniteLossThrows) {
  const ToyModel model = random_tiny_model(2);
  const std::vector<EncodedPair> seqs = {model.encode("a", "b")};
  EXPECT_THROW(loss_gradient(model, seqs,
                             [](std::span<const double> lp, auto, auto) {
                               LossValue v;
                               v.value = std::nan("");
                               v.d_logprobs.assign(lp.size(), 1.0);
                               return v;
                             }),
               NumericError);
}

// Best allowed next token under the reference log-probabilities.
int reference_argmax(const std::vector<double>& row) {
  int best = -1;
  for (int k = 0; k < static_cast<int>(row.size()); ++k) {
    if (k != kEos && k < kFirstCharId) continue;
    if (best < 0 || row[static_cast<std::size_t>(k)] > row[static_cast<std::size_t>(best)]) best = k;
  }
  return best;
}

TEST(Decode, GreedyAgreesWithFullForwardArgmax) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const ToyModel model = random_tiny_model(seed, 0.8);
    const ReferenceModel ref(model);
    for (const std::string src : {"abc", "c", "ba c"}) {
      const int cap = 5;
      const std::string out = greedy_decode(model, src, cap);
      ASSERT_LE(out.size(), static_cast<std::size_t>(cap));
      const EncodedPair e = model.encode(src, out);
      const auto lp = ref.log_softmax_rows(e);
      const std::size_t sep = src.size() + 1;
      for (std::size_t j = 0; j < out.size(); ++j) {
        EXPECT_EQ(reference_argmax(lp[sep + j]), e.tokens[sep + j + 1]);
      }
      if (static_cast<int>(out.size()) < cap) {
        EXPECT_EQ(reference_argmax(lp[sep + out.size()]), kEos);
      }
    }
  }
}

TEST(Decode, CapIsBoundedByMaxLen) {
  const ToyModel model = random_tiny_model(4, 0.8);
  const std::string src = "abcabcab";  // 8 chars, max_len 12 leaves 1
  EXPECT_LE(greedy_decode(model, src, 100).size(), 1u);
  EXPECT_THROW(greedy_decode(model, "abcabcabca", 5), InputError);
}

TEST(Decode, NucleusFirstTokenFrequencies) {
  const ToyModel model = random_tiny_model(9, 1.2);
  const ReferenceModel ref(model);
  const SamplingParams sp{0.6, 0.9};
  const std::string src = "ab";
  // expected truncated distribution for the first target token
  const auto lp = ref.log_softmax_rows(model.encode(src, ""))[3];
  std::vector<std::pair<double, int>> allowed;
  double z = 0.0;
  for (int k = 0; k < static_cast<int>(lp.size()); ++k) {
    if (k != kEos && k < kFirstCharId) continue;
    allowed.push_back({lp[static_cast<std::size_t>(k)] / sp.temperature, k});
  }
  double mx = -1e300;
  for (auto& [v, k] : allowed) mx = std::max(mx, v);
  for (auto& [v, k] : allowed) z += (v = std::exp(v - mx));
  for (auto& [v, k] : allowed) v /= z;
  std::stable_sort(allowed.begin(), allowed.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::map<int, double> expected;
  double mass = 0.0;
  for (const auto& [p, k] : allowed) {
    expected[k] = p;
    mass += p;
    if (mass >= sp.top_p) break;
  }
  for (auto& [k, p] : expected) p /= mass;

  const int draws = 6000;
  std::map<int, int> counts;
  for (int s = 0; s < draws; ++s) {
    const std::string out = sample_top_p(model, src, sp, 1, 1000 + static_cast<std::uint64_t>(s));
    const int tok = out.empty() ? kEos : model.vocab().id(static_cast<char32_t>(out[0]));
    ASSERT_TRUE(expected.count(tok)) << "token outside the nucleus: " << tok;
    ++counts[tok];
  }
  for (const auto& [k, p] : expected) {
    const double freq = static_cast<double>(counts[k]) / draws;
    const double sigma = std::sqrt(p * (1 - p) / draws);
    EXPECT_NEAR(freq, p, 5 * sigma + 1e-9) << "token " << k;
  }
}

TEST(Decode, SamplingIsSeededAndCandidatesUseConsecutiveSeeds) {
  const ToyModel model = random_tiny_model(5, 1.0);
  const SamplingParams sp;
  const auto cands = generate_candidates(model, "abc", 6, sp, 6, 40);
  ASSERT_EQ(cands.size(), 6u);
  for (int k = 1; k <= 6; ++k) {
    EXPECT_EQ(cands[static_cast<std::size_t>(k - 1)],
              sample_top_p(model, "abc", sp, 6, 40 + static_cast<std::uint64_t>(k)));
  }
  EXPECT_EQ(generate_candidates(model, "abc", 6, sp, 6, 40), cands);
}

TEST(Decode, TinyTopPIsGreedy) {
  const ToyModel model = random_tiny_model(6, 1.0);
  for (std::uint64_t s = 0; s < 10; ++s) {
    EXPECT_EQ(sample_top_p(model, "cab", {1e-9, 1.0}, 6, s), greedy_decode(model, "cab", 6));
  }
}

class CheckpointTest : public ::testing::Test {
 protected:
  std::filesystem::path dir_ = std::filesystem::temp_directory_path() / "prefalign_ckpt_test";
  void SetUp() override { std::filesystem::create_directories(dir_); }
  void TearDown() override { std::filesystem::remove_all(dir_); }
};

TEST_F(CheckpointTest, RoundTripIsBitwise) {
  const ToyModel model = random_tiny_model(8);
  save_checkpoint(model, dir_ / "m.bin");
  const ToyModel back = load_checkpoint(dir_ / "m.bin");
  EXPECT_EQ(back.config(), model.config());
  EXPECT_EQ(back.checksum(), model.checksum());
  ASSERT_EQ(back.params().size(), model.params().size());
  EXPECT_EQ(std::memcmp(back.params().data(), model.params().data(),
                        model.params().size() * sizeof(double)),
            0);
}

TEST_F(CheckpointTest, CorruptFilesAreRejected) {
  const ToyModel model = random_tiny_model(8);
  save_checkpoint(model, dir_ / "m.bin");
  std::string bytes;
  {
    std::ifstream in(dir_ / "m.bin", std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  auto write = [&](const std::string& name, const std::string& data) {
    std::ofstream(dir_ / name, std::ios::binary) << data;
    return dir_ / name;
  };
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(load_checkpoint(write("magic.bin", bad_magic)), ParseError);
  EXPECT_THROW(load_checkpoint(write("short.bin", bytes.substr(0, bytes.size() - 3))), ParseError);
  EXPECT_THROW(load_checkpoint(write("long.bin", bytes + "x")), ParseError);
  EXPECT_THROW(load_checkpoint(dir_ / "missing.bin"), InputError);
}

}  // namespace
}  // namespace prefalign::toymt
