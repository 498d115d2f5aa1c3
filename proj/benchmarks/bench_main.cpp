// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "prefalign/corpus/synthetic.hpp"
#include "prefalign/metrics/lexical.hpp"
#include "prefalign/toymt/model.hpp"
#include "prefalign/train/train.hpp"
#include "prefalign/util/utf8.hpp"

namespace prefalign {
namespace {

std::vector<metrics::ScoreRequest> pairs(int n, int len) {
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<int> ch(0, 26);
  std::vector<metrics::ScoreRequest> out;
  for (int i = 0; i < n; ++i) {
    std::string h, r;
    for (int j = 0; j < len; ++j) {
      h.push_back(corpus::kSyntheticAlphabet[ch(gen)]);
      r.push_back(corpus::kSyntheticAlphabet[ch(gen)]);
    }
    out.push_back({"src", h, r});
  }
  return out;
}

void BM_Chrf(benchmark::State& state) {
  const auto batch = pairs(100, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    for (const auto& q : batch) benchmark::DoNotOptimize(metrics::chrf(q));
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_Chrf)->Arg(16)->Arg(64);

void BM_SentenceBleu(benchmark::State& state) {
  const auto batch = pairs(100, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    for (const auto& q : batch) benchmark::DoNotOptimize(metrics::sentence_bleu(q));
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_SentenceBleu)->Arg(16)->Arg(64);

void BM_EditSim(benchmark::State& state) {
  const auto batch = pairs(100, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    for (const auto& q : batch) benchmark::DoNotOptimize(metrics::edit_sim(q));
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_EditSim)->Arg(16)->Arg(64);

toymt::ToyModel bench_model() {
  toymt::ModelConfig cfg;
  cfg.chars = util::utf8_decode(corpus::kSyntheticAlphabet);
  cfg.dim = 24;
  cfg.n_layers = 2;
  cfg.n_heads = 2;
  cfg.max_len = 24;
  return toymt::ToyModel::init(cfg);
}

std::vector<train::TrainExample> bench_batch(int n) {
  const auto c = corpus::generate_synthetic_corpus(corpus::SyntheticTask::kCipher, n, 0.0, 3);
  std::vector<train::TrainExample> out;
  for (const auto& s : c) out.push_back({s.id, s.source, *s.reference, s.source});
  return out;
}

void BM_CpoLossAndGradient(benchmark::State& state) {
  const auto model = bench_model();
  const auto batch = bench_batch(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(train::cpo_loss(model, batch, 0.1).loss);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CpoLossAndGradient)->Arg(16);

void BM_SequenceLogprob(benchmark::State& state) {
  const auto model = bench_model();
  for (auto _ : state) benchmark::DoNotOptimize(model.sequence_logprob("abcdefghij", "klmnopqrst"));
}
BENCHMARK(BM_SequenceLogprob);

void BM_GreedyDecode(benchmark::State& state) {
  const auto model = bench_model();
  for (auto _ : state) benchmark::DoNotOptimize(toymt::greedy_decode(model, "abcdefghij", 12));
}
BENCHMARK(BM_GreedyDecode);

void BM_SampleTopP(benchmark::State& state) {
  const auto model = bench_model();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(toymt::sample_top_p(model, "abcdefghij", {}, 12, ++seed));
  }
}
BENCHMARK(BM_SampleTopP);

}  // namespace
}  // namespace prefalign

BENCHMARK_MAIN();
