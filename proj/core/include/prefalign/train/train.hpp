// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "prefalign/corpus/types.hpp"
#include "prefalign/toymt/model.hpp"

namespace prefalign::train {

enum class Objective { kSft, kCpo };
enum class OptimizerKind { kSgd, kAdam };

std::string to_string(Objective o);
Objective parse_objective(std::string_view text);
std::string to_string(OptimizerKind o);
OptimizerKind parse_optimizer(std::string_view text);

// Standard Adam constants.
inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

struct TrainConfig {
  Objective objective = Objective::kCpo;
  double beta = 0.1;
  double base_lr = 1e-4;
  std::optional<int> warmup_steps;  // unset: max(10, 1% of total steps)
  int batch_size = 128;
  int epochs = 1;
  std::uint64_t seed = 1;
  OptimizerKind optimizer = OptimizerKind::kAdam;

  // Throws ParameterError.
  void validate() const;
  int resolved_warmup(long total_steps) const;
};

// One training example. `rejected` is required by CPO and ignored by SFT.
struct TrainExample {
  std::string id;
  std::string source;
  std::string chosen;
  std::optional<std::string> rejected;
};

// Pairs joined with their sources. Throws InputError for unknown segments.
std::vector<TrainExample> examples_from_dataset(const corpus::PreferenceDataset& dataset,
                                                const corpus::Corpus& corpus);
// SFT examples from references. Throws InputError if one is missing.
std::vector<TrainExample> examples_from_references(const corpus::Corpus& corpus);
// SFT examples from hypotheses keyed by segment id (e.g. a model's own greedy
// outputs). Throws InputError for ids missing from `hypotheses`.
std::vector<TrainExample> examples_from_hypotheses(
    const corpus::Corpus& corpus, const std::unordered_map<std::string, std::string>& hypotheses);

// -- objectives -------------------------------------------------------------

struct ObjectiveValue {
  double loss = 0.0;
  double pref_term = 0.0;
  double sft_term = 0.0;
  std::vector<double> grad;  // d loss / d params
};

// mean_i -log pi(chosen_i | source_i). Throws InputError on an empty batch or
// a sample that does not fit the model, naming the sample.
ObjectiveValue sft_loss(const toymt::ToyModel& model, std::span<const TrainExample> batch);

// pref_term = mean_i -log sigmoid(beta * (log pi(y_c) - log pi(y_r)));
// loss = pref_term + sft_term, sft_term as in sft_loss on the chosen side.
ObjectiveValue cpo_loss(const toymt::ToyModel& model, std::span<const TrainExample> batch,
                        double beta);

// -log sigmoid(x), stable for large |x|.
double neg_log_sigmoid(double x);

// -- schedule and optimizers ------------------------------------------------

// Linear warmup from 0 at step 0 to base_lr at warmup_steps, then
// base_lr * sqrt(warmup_steps / step).
double lr_at(long step, double base_lr, int warmup_steps);

class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual void update(std::span<double> params, std::span<const double> grad, double lr) = 0;
};

class Sgd final : public Optimizer {
 public:
  void update(std::span<double> params, std::span<const double> grad, double lr) override;
};

class Adam final : public Optimizer {
 public:
  explicit Adam(std::size_t n) : m_(n, 0.0), v_(n, 0.0) {}
  void update(std::span<double> params, std::span<const double> grad, double lr) override;

 private:
  std::vector<double> m_;
  std::vector<double> v_;
  long t_ = 0;
};

// -- loop -------------------------------------------------------------------

struct StepRecord {
  long step = 0;
  double lr = 0.0;
  double loss = 0.0;
  double pref_term = 0.0;
  double sft_term = 0.0;
};

struct TrainLog {
  std::vector<StepRecord> steps;
  std::size_t n_examples = 0;
  std::size_t n_dropped = 0;  // over-length examples left out
  int warmup_steps = 0;
  std::uint64_t checksum = 0;

  // Header step,lr,loss,pref_term,sft_term; values round-trip exactly.
  std::string to_csv() const;
};

struct TrainResult {
  toymt::ToyModel model;
  TrainLog log;
};

// Epochs over seeded shuffles of `examples` in batches of cfg.batch_size (the
// last batch may be short). Steps are numbered from 1 and use lr_at(step).
// Throws InputError when no usable example remains and NumericError naming
// the step when the loss or gradient stops being finite.
TrainResult train(toymt::ToyModel model, std::span<const TrainExample> examples,
                  const TrainConfig& cfg);

}  // namespace prefalign::train
