// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

#include "prefalign/error.hpp"
#include "prefalign/train/train.hpp"
#include "prefalign/util/format.hpp"
#include "prefalign/util/rng.hpp"
#include "prefalign/util/utf8.hpp"

namespace prefalign::train {

std::string to_string(Objective o) { return o == Objective::kSft ? "sft" : "cpo"; }

Objective parse_objective(std::string_view text) {
  if (text == "sft") return Objective::kSft;
  if (text == "cpo") return Objective::kCpo;
  throw ParameterError("unknown objective '" + std::string(text) + "' (expected sft or cpo)");
}

std::string to_string(OptimizerKind o) { return o == OptimizerKind::kSgd ? "sgd" : "adam"; }

OptimizerKind parse_optimizer(std::string_view text) {
  if (text == "sgd") return OptimizerKind::kSgd;
  if (text == "adam") return OptimizerKind::kAdam;
  throw ParameterError("unknown optimizer '" + std::string(text) + "' (expected sgd or adam)");
}

void TrainConfig::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ParameterError("beta must be >= 0");
  if (!(base_lr > 0.0) || !std::isfinite(base_lr)) throw ParameterError("base_lr must be > 0");
  if (warmup_steps && *warmup_steps < 1) throw ParameterError("warmup_steps must be >= 1");
  if (batch_size < 1) throw ParameterError("batch_size must be >= 1");
  if (epochs < 0) throw ParameterError("epochs must be >= 0");
}

int TrainConfig::resolved_warmup(long total_steps) const {
  if (warmup_steps) return *warmup_steps;
  return static_cast<int>(std::max<long>(10, total_steps / 100));
}

std::vector<TrainExample> examples_from_dataset(const corpus::PreferenceDataset& dataset,
                                                const corpus::Corpus& corpus) {
  const auto index = corpus::index_by_id(corpus);
  std::vector<TrainExample> out;
  out.reserve(dataset.pairs.size());
  for (const auto& p : dataset.pairs) {
    auto it = index.find(p.segment_id);
    if (it == index.end()) throw InputError("pair for unknown segment '" + p.segment_id + "'");
    out.push_back({p.segment_id, it->second->source, p.chosen.text, p.rejected.text});
  }
  return out;
}

std::vector<TrainExample> examples_from_references(const corpus::Corpus& corpus) {
  std::vector<TrainExample> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) {
    if (!s.reference) throw InputError("segment '" + s.id + "' has no reference");
    out.push_back({s.id, s.source, *s.reference, std::nullopt});
  }
  return out;
}

std::vector<TrainExample> examples_from_hypotheses(
    const corpus::Corpus& corpus, const std::unordered_map<std::string, std::string>& hypotheses) {
  std::vector<TrainExample> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) {
    auto it = hypotheses.find(s.id);
    if (it == hypotheses.end()) throw InputError("no hypothesis for segment '" + s.id + "'");
    out.push_back({s.id, s.source, it->second, std::nullopt});
  }
  return out;
}

std::string TrainLog::to_csv() const {
  std::ostringstream out;
  out << "step,lr,loss,pref_term,sft_term\n";
  for (const auto& r : steps) {
    out << r.step << ',' << util::fmt_double(r.lr) << ',' << util::fmt_double(r.loss) << ','
        << util::fmt_double(r.pref_term) << ',' << util::fmt_double(r.sft_term) << '\n';
  }
  return out.str();
}

namespace {

bool fits(const toymt::ToyModel& model, const TrainExample& ex, bool need_rejected) {
  const auto len = [](const std::string& s) { return util::utf8_decode(s).size(); };
  const std::size_t budget = static_cast<std::size_t>(model.config().max_len) - 3;
  const std::size_t src = len(ex.source);
  if (src + len(ex.chosen) > budget) return false;
  if (need_rejected && ex.rejected && src + len(*ex.rejected) > budget) return false;
  return true;
}

}  // namespace

TrainResult train(toymt::ToyModel model, std::span<const TrainExample> examples,
                  const TrainConfig& cfg) {
  cfg.validate();
  const bool cpo = cfg.objective == Objective::kCpo;
  std::vector<TrainExample> usable;
  usable.reserve(examples.size());
  TrainLog log;
  log.n_examples = examples.size();
  for (const auto& ex : examples) {
    if (cpo && !ex.rejected) throw InputError("sample '" + ex.id + "' has no rejected translation");
    if (fits(model, ex, cpo)) {
      usable.push_back(ex);
    } else {
      ++log.n_dropped;
    }
  }
  if (usable.empty()) throw InputError("no usable training examples");

  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  const long per_epoch = static_cast<long>((usable.size() + batch - 1) / batch);
  const long total = per_epoch * cfg.epochs;
  log.warmup_steps = cfg.resolved_warmup(total);

  std::unique_ptr<Optimizer> opt;
  if (cfg.optimizer == OptimizerKind::kAdam) {
    opt = std::make_unique<Adam>(model.params().size());
  } else {
    opt = std::make_unique<Sgd>();
  }

  std::vector<std::size_t> order(usable.size());
  std::vector<TrainExample> current;
  long step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    util::Rng rng(util::derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t lo = 0; lo < order.size(); lo += batch) {
      ++step;
      current.clear();
      for (std::size_t i = lo; i < std::min(order.size(), lo + batch); ++i) {
        current.push_back(usable[order[i]]);
      }
      ObjectiveValue v;
      try {
        v = cpo ? cpo_loss(model, current, cfg.beta) : sft_loss(model, current);
      } catch (const NumericError& e) {
        throw NumericError("step " + std::to_string(step) + ": " + e.what());
      }
      const double lr = lr_at(step, cfg.base_lr, log.warmup_steps);
      opt->update(model.mutable_params(), v.grad, lr);
      log.steps.push_back({step, lr, v.loss, v.pref_term, v.sft_term});
    }
  }
  for (double p : model.params()) {
    if (!std::isfinite(p)) throw NumericError("parameters diverged by step " + std::to_string(step));
  }
  log.checksum = model.checksum();
  return TrainResult{std::move(model), std::move(log)};
}

}  // namespace prefalign::train
