// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "config.hpp"
#include "manifest.hpp"
#include "prefalign/corpus/jsonl.hpp"
#include "prefalign/corpus/stats.hpp"
#include "prefalign/corpus/synthetic.hpp"
#include "prefalign/error.hpp"
#include "prefalign/eval/eval.hpp"
#include "prefalign/eval/pipeline.hpp"
#include "prefalign/prefbuild/builders.hpp"
#include "prefalign/prefbuild/grid.hpp"
#include "prefalign/prefbuild/mono.hpp"
#include "prefalign/toymt/model.hpp"
#include "prefalign/train/train.hpp"
#include "prefalign/util/rng.hpp"
#include "prefalign/util/utf8.hpp"
#include "report_io.hpp"

namespace prefalign::cli {

namespace fs = std::filesystem;

namespace {

// Stream ids for derive_seed, one per seeded stage.
constexpr std::uint64_t kPretrainCorpusStream = 101;
constexpr std::uint64_t kTrainCorpusStream = 102;
constexpr std::uint64_t kTestCorpusStream = 103;
constexpr std::uint64_t kCandidateStream = 201;

struct Context {
  RunConfig config;
  std::size_t workers = 1;
};

fs::path corpus_path(const RunConfig& c, const std::string& which) {
  if (which == "pretrain") return c.path("pretrain_corpus");
  if (which == "train") return c.path("train_corpus");
  if (which == "test") return c.path("test_corpus");
  throw ValidationError("unknown corpus '" + which + "' (pretrain, train or test)");
}

corpus::Corpus load_corpus(ManifestWriter& mw, const fs::path& path) {
  mw.consume(path);
  return corpus::read_jsonl<corpus::Segment>(path);
}

toymt::ToyModel load_model(ManifestWriter& mw, const fs::path& path) {
  mw.consume(path);
  return toymt::load_checkpoint(path);
}

std::unique_ptr<metrics::MetricScorer> scorer_for(const RunConfig& c, const std::string& name) {
  try {
    return metrics::make_scorer(name, c.external_options());
  } catch (const ParameterError& e) {
    throw ValidationError(e.what());
  }
}

std::string report_stem(const fs::path& reports, const std::string& label) {
  return (reports / label).generic_string();
}

// -- gen-corpus ---------------------------------------------------------------

void gen_corpus(Context& ctx) {
  const RunConfig& c = ctx.config;
  const double noise = c.at("corpus.noise_rate").get<double>();
  struct Part {
    const char* key;
    const char* size_key;
    const char* prefix;
    std::uint64_t stream;
    bool pretrain;
  };
  const Part parts[] = {
      {"pretrain_corpus", "corpus.pretrain_size", "pre", kPretrainCorpusStream, true},
      {"train_corpus", "corpus.train_size", "trn", kTrainCorpusStream, false},
      {"test_corpus", "corpus.test_size", "tst", kTestCorpusStream, false},
  };
  ManifestWriter mw(c, "gen-corpus", {"corpus"});
  std::vector<fs::path> outputs;
  for (const Part& p : parts) {
    // only the pretraining references carry the systematic confusion
    const auto corpus = corpus::generate_synthetic_corpus(
        c.task(), c.at(p.size_key).get<int>(), p.pretrain ? 0.0 : noise,
        util::derive_seed(c.seed(), p.stream), c.corpus_options(p.prefix, p.pretrain));
    const fs::path out = c.path(p.key);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    corpus::write_jsonl(out, corpus);
    mw.produce(out);
    mw.info()[p.key] = corpus.size();
    outputs.push_back(out);
  }
  for (const auto& out : outputs) mw.write(manifest_path(out));
  std::cout << "wrote " << outputs.size() << " corpora\n";
}

// -- train --------------------------------------------------------------------

struct TrainArgs {
  std::string section = "train";
  std::string objective;
  std::string data = "dataset";
  std::string corpus = "train";
  std::string init;
  bool from_scratch = false;
  std::string dataset;
  std::string out;
};

void train_cmd(Context& ctx, const TrainArgs& a) {
  const RunConfig& c = ctx.config;
  if (a.section != "train" && a.section != "pretrain") {
    throw ValidationError("--section must be train or pretrain");
  }
  train::TrainConfig tc = c.train_config(a.section);
  if (!a.objective.empty()) tc.objective = train::parse_objective(a.objective);
  if (a.from_scratch && !a.init.empty()) throw ValidationError("--init and --from-scratch exclude each other");

  std::set<std::string> sections = {a.section};
  if (a.from_scratch) sections.insert("model");
  if (a.data == "greedy") sections.insert("eval");
  ManifestWriter mw(c, "train", sections);

  const fs::path corpus_file = corpus_path(c, a.corpus);
  const corpus::Corpus corpus = load_corpus(mw, corpus_file);
  std::optional<toymt::ToyModel> init;
  if (a.from_scratch) {
    init = toymt::ToyModel::init(c.model_config(util::utf8_decode(corpus::kSyntheticAlphabet)));
  } else {
    init = load_model(mw, a.init.empty() ? c.path("base_model") : fs::path(a.init));
  }

  std::vector<train::TrainExample> examples;
  if (a.data == "dataset") {
    const fs::path ds = a.dataset.empty() ? c.path("dataset") : fs::path(a.dataset);
    mw.consume(ds);
    corpus::PreferenceDataset dataset;
    dataset.pairs = corpus::read_jsonl<corpus::PreferencePair>(ds);
    examples = train::examples_from_dataset(dataset, corpus);
  } else if (a.data == "references") {
    examples = train::examples_from_references(corpus);
  } else if (a.data == "greedy") {
    const eval::Hypotheses hyp =
        eval::translate(*init, corpus, c.at("eval.max_chars").get<int>(), ctx.workers);
    examples = train::examples_from_hypotheses(corpus, hyp);
  } else {
    throw ValidationError("--data must be dataset, references or greedy");
  }
  if (tc.objective == train::Objective::kCpo && a.data != "dataset") {
    throw ValidationError("cpo needs --data dataset");
  }

  const train::TrainResult result = train::train(*init, examples, tc);
  const fs::path out = a.out.empty() ? c.path("model") : fs::path(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  toymt::save_checkpoint(result.model, out);
  const fs::path log = out.string() + ".log.csv";
  write_text(log, result.log.to_csv());
  mw.produce(out);
  mw.produce(log);
  mw.info()["objective"] = train::to_string(tc.objective);
  mw.info()["data"] = a.data;
  mw.info()["n_examples"] = result.log.n_examples;
  mw.info()["n_dropped"] = result.log.n_dropped;
  mw.info()["steps"] = result.log.steps.size();
  mw.write();
  std::cout << "trained " << train::to_string(tc.objective) << " on " << result.log.n_examples
            << " examples (" << result.log.steps.size() << " steps) -> " << out.generic_string()
            << "\n";
}

// -- gen-candidates -----------------------------------------------------------

void gen_candidates(Context& ctx, const std::string& model_arg, const std::string& which) {
  const RunConfig& c = ctx.config;
  ManifestWriter mw(c, "gen-candidates", {"candidates"});
  const corpus::Corpus corpus = load_corpus(mw, corpus_path(c, which));
  const toymt::ToyModel model =
      load_model(mw, model_arg.empty() ? c.path("base_model") : fs::path(model_arg));

  eval::CandidateOptions o;
  o.k = c.at("candidates.k").get<int>();
  o.sampling.top_p = c.at("candidates.top_p").get<double>();
  o.sampling.temperature = c.at("candidates.temperature").get<double>();
  o.max_chars = c.at("candidates.max_chars").get<int>();
  o.seed = util::derive_seed(c.seed(), kCandidateStream);
  o.include_reference = c.at("candidates.include_reference").get<bool>();
  if (c.at("candidates.external.enabled").get<bool>()) {
    o.external = eval::SyntheticSystem{c.at("candidates.external.name").get<std::string>(),
                                       c.task(),
                                       c.at("candidates.external.noise_rate").get<double>()};
  }
  const eval::CandidateBatch batch = eval::generate_candidate_sets(model, corpus, o, ctx.workers);
  const fs::path out = c.path("candidates");
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  corpus::write_jsonl(out, batch.sets);
  mw.produce(out);
  mw.info()["n_sets"] = batch.sets.size();
  mw.info()["skipped"] = batch.skipped;
  mw.write();
  std::cout << "generated " << batch.sets.size() << " candidate sets (" << batch.skipped.size()
            << " skipped)\n";
}

// -- score --------------------------------------------------------------------

struct CandidateInputs {
  corpus::Corpus corpus;
  std::vector<corpus::CandidateSet> sets;
  std::vector<corpus::CandidateScores> scores;
};

CandidateInputs load_candidates(ManifestWriter& mw, const RunConfig& c, const std::string& which,
                                bool with_scores) {
  CandidateInputs in;
  in.corpus = load_corpus(mw, corpus_path(c, which));
  mw.consume(c.path("candidates"));
  in.sets = corpus::read_jsonl<corpus::CandidateSet>(c.path("candidates"));
  if (with_scores) {
    mw.consume(c.path("scores"));
    in.scores = corpus::read_jsonl<corpus::CandidateScores>(c.path("scores"));
    const std::string metric = c.at("metrics.alignment").get<std::string>();
    for (const auto& s : in.scores) {
      if (s.metric != metric) {
        throw ValidationError("scores were computed with '" + s.metric +
                              "' but metrics.alignment is '" + metric + "'");
      }
    }
  }
  return in;
}

void score_cmd(Context& ctx, const std::string& which) {
  const RunConfig& c = ctx.config;
  ManifestWriter mw(c, "score", {"metrics"});
  const CandidateInputs in = load_candidates(mw, c, which, false);
  const auto scorer = scorer_for(c, c.at("metrics.alignment").get<std::string>());
  const auto scores = eval::score_candidate_sets(in.sets, in.corpus, *scorer, ctx.workers);
  const fs::path out = c.path("scores");
  corpus::write_jsonl(out, scores);
  mw.produce(out);
  mw.info()["metric"] = scorer->id().name;
  mw.write();
  std::cout << "scored " << scores.size() << " candidate sets with " << scorer->id().name << "\n";
}

// -- build-prefs ----------------------------------------------------------------

fs::path grid_cell_path(const fs::path& dir, prefbuild::QualityLevel chosen,
                        prefbuild::QualityLevel rejected) {
  return dir / (std::string(prefbuild::to_string(chosen)) + "_" + prefbuild::to_string(rejected) +
                ".jsonl");
}

void build_prefs(Context& ctx, const std::string& which, const std::string& out_arg) {
  const RunConfig& c = ctx.config;
  ManifestWriter mw(c, "build-prefs", {"build"});
  const CandidateInputs in = load_candidates(mw, c, which, true);
  const std::string metric = c.at("metrics.alignment").get<std::string>();
  const std::string regime = c.at("build.regime").get<std::string>();
  mw.info()["regime"] = regime;

  if (regime == "grid") {
    const auto pool = eval::rank_pool(in.sets, in.scores);
    const auto buckets = prefbuild::resolve_buckets(pool);
    const prefbuild::GridResult grid = prefbuild::build_quality_grid(pool, buckets, metric);
    const fs::path dir = c.path("grid_dir");
    fs::create_directories(dir);
    Json cells = Json::array();
    for (const auto& cell : grid.cells) {
      const auto& pairs = cell.result.dataset.pairs;
      cells.push_back({{"chosen", prefbuild::to_string(cell.chosen.level)},
                       {"rejected", prefbuild::to_string(cell.rejected.level)},
                       {"chosen_offset", cell.chosen.offset},
                       {"rejected_offset", cell.rejected.offset},
                       {"pairs", pairs.size()},
                       {"discarded", cell.result.n_discarded}});
      if (pairs.empty()) continue;
      const fs::path p = grid_cell_path(dir, cell.chosen.level, cell.rejected.level);
      corpus::write_jsonl(p, pairs);
      mw.produce(p);
    }
    const fs::path stats = dir / "grid_stats.csv";
    write_text(stats, prefbuild::grid_stats_csv(grid));
    mw.produce(stats);
    mw.info()["cells"] = cells;
    mw.write(dir / "manifest.json");
    std::cout << "wrote quality grid to " << dir.generic_string() << "\n";
    return;
  }

  prefbuild::BuildResult result;
  if (regime == "mono-offset") {
    const auto pool = eval::rank_pool(in.sets, in.scores);
    prefbuild::OffsetConfig oc{c.at("build.rejected_offset").get<int>(),
                               c.at("build.chosen_offset").get<int>()};
    result = prefbuild::build_mono_dataset(pool, oc, metric);
    mw.info()["rejected_offset"] = oc.rejected;
    mw.info()["chosen_offset"] = oc.chosen;
  } else {
    prefbuild::MultiOptions mo;
    if (regime == "multi-ablate") {
      mo.regime = prefbuild::MultiRegime::kMultiAblate;
      for (const auto& s : c.at("build.excluded")) mo.excluded.insert(corpus::SystemId::parse(s));
    } else if (regime == "fixed-chosen") {
      mo.regime = prefbuild::MultiRegime::kFixedChosen;
      mo.chosen_system = corpus::SystemId::parse(c.at("build.chosen_system").get<std::string>());
    }
    result = prefbuild::build_multi_dataset(in.sets, in.scores, metric, mo);
  }
  if (result.dataset.pairs.empty()) {
    throw InsufficientDataError("regime '" + regime + "' produced no preference pairs");
  }
  const fs::path out = out_arg.empty() ? c.path("dataset") : fs::path(out_arg);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  corpus::write_jsonl(out, result.dataset.pairs);
  mw.produce(out);
  mw.info()["n_input"] = result.n_input;
  mw.info()["n_pairs"] = result.dataset.pairs.size();
  mw.info()["n_discarded"] = result.n_discarded;
  mw.write();
  std::cout << "built " << result.dataset.pairs.size() << " pairs (" << result.n_discarded
            << " discarded) -> " << out.generic_string() << "\n";
}

// -- calibrate ----------------------------------------------------------------

void calibrate_cmd(Context& ctx, const std::string& which) {
  const RunConfig& c = ctx.config;
  ManifestWriter mw(c, "calibrate", {"build"});
  const CandidateInputs in = load_candidates(mw, c, which, true);
  const auto pool = eval::rank_pool(in.sets, in.scores);
  const auto scorer = scorer_for(c, c.at("metrics.alignment").get<std::string>());
  const double tc = c.at("build.calibrate_chosen").get<double>();
  const double tr = c.at("build.calibrate_rejected").get<double>();
  const prefbuild::Calibration cal = prefbuild::calibrate_offsets(pool, tc, tr, scorer->id());
  nlohmann::ordered_json j;
  j["metric"] = scorer->id().name;
  j["target_chosen"] = tc;
  j["target_rejected"] = tr;
  j["chosen_offset"] = cal.config.chosen;
  j["rejected_offset"] = cal.config.rejected;
  j["achieved_chosen"] = cal.achieved_chosen;
  j["achieved_rejected"] = cal.achieved_rejected;
  j["deviation"] = cal.deviation;
  j["n_emitted"] = cal.n_emitted;
  j["n_discarded"] = cal.n_discarded;
  const fs::path out = c.path("reports") / "calibration.json";
  write_text(out, j.dump(2) + "\n");
  mw.produce(out);
  mw.write();
  std::cout << "calibrated offsets: o_c=" << cal.config.chosen << " o_r=" << cal.config.rejected
            << " (chosen " << cal.achieved_chosen << ", rejected " << cal.achieved_rejected << ")\n";
}

// -- evaluate -----------------------------------------------------------------

struct EvaluateArgs {
  std::string model;
  std::string label;
  bool use_references = false;
  std::string corpus = "test";
};

void evaluate_cmd(Context& ctx, const EvaluateArgs& a) {
  const RunConfig& c = ctx.config;
  ManifestWriter mw(c, "evaluate", {"metrics", "eval", "pivot"});
  const corpus::Corpus corpus = load_corpus(mw, corpus_path(c, a.corpus));
  eval::Hypotheses hyp;
  std::string label = a.label;
  if (a.use_references) {
    if (!a.model.empty()) throw ValidationError("--use-references and --model exclude each other");
    for (const auto& s : corpus) {
      if (!s.reference) throw ValidationError("segment '" + s.id + "' has no reference");
      hyp[s.id] = *s.reference;
    }
    if (label.empty()) label = "references";
  } else {
    const fs::path model_path = a.model.empty() ? c.path("model") : fs::path(a.model);
    const toymt::ToyModel model = load_model(mw, model_path);
    hyp = eval::translate(model, corpus, c.at("eval.max_chars").get<int>(), ctx.workers);
    if (label.empty()) label = model_path.stem().string();
  }
  std::vector<std::unique_ptr<metrics::MetricScorer>> owned;
  std::vector<const metrics::MetricScorer*> scorers;
  for (const auto& name : c.at("metrics.evaluation")) {
    owned.push_back(scorer_for(c, name.get<std::string>()));
    scorers.push_back(owned.back().get());
  }
  const eval::EvalReport report =
      eval::evaluate_system(label, hyp, corpus, scorers, c.pivot(), ctx.workers);
  const std::string stem = report_stem(c.path("reports"), label);
  write_text(stem + ".json", eval_report_to_json(report));
  write_text(stem + ".csv", report.to_csv());
  write_text(stem + ".segments.csv", report.segments_csv());
  for (const char* ext : {".json", ".csv", ".segments.csv"}) mw.produce(stem + ext);
  mw.write();
  std::cout << report.to_csv();
}

// -- compare ------------------------------------------------------------------

void compare_cmd(Context& ctx, const std::string& a, const std::string& b) {
  const RunConfig& c = ctx.config;
  ManifestWriter mw(c, "compare", {"eval"});
  const fs::path reports = c.path("reports");
  const fs::path pa = report_stem(reports, a) + ".json";
  const fs::path pb = report_stem(reports, b) + ".json";
  mw.consume(pa);
  mw.consume(pb);
  const eval::Comparison cmp = eval::compare_report(read_eval_report(pa), read_eval_report(pb),
                                                    c.at("eval.alpha").get<double>());
  const std::string stem = report_stem(reports, "compare_" + a + "_" + b);
  write_text(stem + ".csv", cmp.to_csv());
  write_text(stem + ".txt", cmp.to_text());
  mw.produce(stem + ".csv");
  mw.produce(stem + ".txt");
  mw.write();
  std::cout << cmp.to_text();
}

// -- grid-experiment ----------------------------------------------------------

void grid_experiment_cmd(Context& ctx) {
  const RunConfig& c = ctx.config;
  ManifestWriter mw(c, "grid-experiment", {"train", "eval"});
  const corpus::Corpus train_corpus = load_corpus(mw, c.path("train_corpus"));
  const corpus::Corpus test = load_corpus(mw, c.path("test_corpus"));
  const toymt::ToyModel base = load_model(mw, c.path("base_model"));

  const fs::path dir = c.path("grid_dir");
  const fs::path stats = dir / "grid_stats.csv";
  const Manifest grid_manifest = mw.consume(stats);
  prefbuild::GridResult grid;
  for (const auto& cj : grid_manifest.info.at("cells")) {
    prefbuild::GridCell cell;
    cell.chosen = {prefbuild::parse_level(cj.at("chosen").get<std::string>()),
                   prefbuild::Role::kChosen, cj.at("chosen_offset").get<int>()};
    cell.rejected = {prefbuild::parse_level(cj.at("rejected").get<std::string>()),
                     prefbuild::Role::kRejected, cj.at("rejected_offset").get<int>()};
    if (cj.at("pairs").get<std::size_t>() > 0) {
      const fs::path p = grid_cell_path(dir, cell.chosen.level, cell.rejected.level);
      mw.consume(p);
      cell.result.dataset.pairs = corpus::read_jsonl<corpus::PreferencePair>(p);
    }
    grid.cells.push_back(std::move(cell));
  }

  const auto scorer = scorer_for(c, c.at("metrics.alignment").get<std::string>());
  eval::GridExperimentConfig gc;
  gc.train = c.train_config("train");
  gc.max_chars = c.at("eval.max_chars").get<int>();
  gc.workers = ctx.workers;
  gc.pivot = c.pivot();
  const eval::GridExperimentResult r =
      eval::run_quality_grid_experiment(base, grid, train_corpus, test, *scorer, gc);

  const fs::path reports = c.path("reports");
  write_text(reports / "grid_matrix.csv", r.matrix_csv());
  const auto [bc, br] = r.best_cell();
  nlohmann::ordered_json j;
  j["metric"] = r.metric;
  j["base_score"] = r.base_score;
  j["best_chosen"] = prefbuild::to_string(bc);
  j["best_rejected"] = prefbuild::to_string(br);
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (auto cl : prefbuild::kAllLevels) {
    for (auto rl : prefbuild::kAllLevels) {
      const double v = r.score[static_cast<std::size_t>(cl)][static_cast<std::size_t>(rl)];
      nlohmann::ordered_json e;
      e["chosen"] = prefbuild::to_string(cl);
      e["rejected"] = prefbuild::to_string(rl);
      e["score"] = std::isnan(v) ? nlohmann::ordered_json() : nlohmann::ordered_json(v);
      cells.push_back(e);
    }
  }
  j["cells"] = cells;
  write_text(reports / "grid_experiment.json", j.dump(2) + "\n");
  mw.produce(reports / "grid_experiment.json");
  mw.produce(reports / "grid_matrix.csv");
  mw.write();
  std::cout << "base " << r.metric << " " << r.base_score << "\n" << r.matrix_csv();
}

// -- report -------------------------------------------------------------------

void report_cmd(Context& ctx, const std::string& dataset_arg, const std::string& which) {
  const RunConfig& c = ctx.config;
  ManifestWriter mw(c, "report", {});
  const corpus::Corpus corpus = load_corpus(mw, corpus_path(c, which));
  const fs::path ds = dataset_arg.empty() ? c.path("dataset") : fs::path(dataset_arg);
  mw.consume(ds);
  corpus::PreferenceDataset dataset;
  dataset.pairs = corpus::read_jsonl<corpus::PreferencePair>(ds);
  const std::string csv = corpus::stats_to_csv(corpus::dataset_stats(dataset, corpus));
  const fs::path out = c.path("reports") / (ds.stem().string() + "_stats.csv");
  write_text(out, csv);
  mw.produce(out);
  mw.write();
  std::cout << csv;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"prefalign: preference data construction and alignment on a toy translation task"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file;
  std::vector<std::string> overrides;
  std::size_t workers = 1;
  std::optional<std::int64_t> seed;
  app.add_option("--config", config_file, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--set", overrides, "override one config key, e.g. --set train.beta=0.2");
  app.add_option("--workers", workers, "worker threads (1 = bitwise deterministic)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "override the config seed")->check(CLI::NonNegativeNumber);

  std::function<void(Context&)> action;

  app.add_subcommand("gen-corpus", "generate pretraining, training and test corpora")
      ->callback([&] { action = gen_corpus; });

  TrainArgs ta;
  auto* train_sc = app.add_subcommand("train", "train a model with sft or cpo");
  train_sc->add_option("--section", ta.section, "config section with the hyperparameters")
      ->check(CLI::IsMember({"train", "pretrain"}));
  train_sc->add_option("--objective", ta.objective, "override the objective")
      ->check(CLI::IsMember({"sft", "cpo"}));
  train_sc->add_option("--data", ta.data, "training targets")
      ->check(CLI::IsMember({"dataset", "references", "greedy"}));
  train_sc->add_option("--corpus", ta.corpus, "source corpus")
      ->check(CLI::IsMember({"pretrain", "train"}));
  train_sc->add_option("--init", ta.init, "initial checkpoint (default paths.base_model)");
  train_sc->add_flag("--from-scratch", ta.from_scratch, "start from a seeded initialization");
  train_sc->add_option("--dataset", ta.dataset, "preference dataset (default paths.dataset)");
  train_sc->add_option("--out", ta.out, "output checkpoint (default paths.model)");
  train_sc->callback([&] { action = [&](Context& ctx) { train_cmd(ctx, ta); }; });

  std::string cand_model;
  std::string cand_corpus = "train";
  auto* cand_sc = app.add_subcommand("gen-candidates", "greedy base output plus K samples per segment");
  cand_sc->add_option("--model", cand_model, "checkpoint (default paths.base_model)");
  cand_sc->add_option("--corpus", cand_corpus)->check(CLI::IsMember({"pretrain", "train", "test"}));
  cand_sc->callback([&] {
    action = [&](Context& ctx) { gen_candidates(ctx, cand_model, cand_corpus); };
  });

  std::string score_corpus = "train";
  auto* score_sc = app.add_subcommand("score", "score candidates with metrics.alignment");
  score_sc->add_option("--corpus", score_corpus)->check(CLI::IsMember({"pretrain", "train", "test"}));
  score_sc->callback([&] { action = [&](Context& ctx) { score_cmd(ctx, score_corpus); }; });

  std::string build_corpus = "train";
  std::string build_out;
  auto* build_sc = app.add_subcommand("build-prefs", "build a preference dataset (build.regime)");
  build_sc->add_option("--corpus", build_corpus)->check(CLI::IsMember({"pretrain", "train", "test"}));
  build_sc->add_option("--out", build_out, "output dataset (default paths.dataset)");
  build_sc->callback([&] {
    action = [&](Context& ctx) { build_prefs(ctx, build_corpus, build_out); };
  });

  std::string cal_corpus = "train";
  auto* cal_sc = app.add_subcommand("calibrate", "search offsets matching target score averages");
  cal_sc->add_option("--corpus", cal_corpus)->check(CLI::IsMember({"pretrain", "train", "test"}));
  cal_sc->callback([&] { action = [&](Context& ctx) { calibrate_cmd(ctx, cal_corpus); }; });

  EvaluateArgs ea;
  auto* eval_sc = app.add_subcommand("evaluate", "translate and score a corpus");
  eval_sc->add_option("--model", ea.model, "checkpoint (default paths.model)");
  eval_sc->add_option("--label", ea.label, "report name (default: checkpoint stem)");
  eval_sc->add_flag("--use-references", ea.use_references, "score the references themselves");
  eval_sc->add_option("--corpus", ea.corpus)->check(CLI::IsMember({"pretrain", "train", "test"}));
  eval_sc->callback([&] { action = [&](Context& ctx) { evaluate_cmd(ctx, ea); }; });

  std::string cmp_a;
  std::string cmp_b;
  auto* cmp_sc = app.add_subcommand("compare", "paired comparison of two evaluation reports");
  cmp_sc->add_option("--a", cmp_a, "baseline report label")->required();
  cmp_sc->add_option("--b", cmp_b, "candidate report label")->required();
  cmp_sc->callback([&] { action = [&](Context& ctx) { compare_cmd(ctx, cmp_a, cmp_b); }; });

  app.add_subcommand("grid-experiment", "train and score one CPO model per quality-grid cell")
      ->callback([&] { action = grid_experiment_cmd; });

  std::string rep_dataset;
  std::string rep_corpus = "train";
  auto* rep_sc = app.add_subcommand("report", "preference dataset statistics");
  rep_sc->add_option("--dataset", rep_dataset, "dataset (default paths.dataset)");
  rep_sc->add_option("--corpus", rep_corpus)->check(CLI::IsMember({"pretrain", "train", "test"}));
  rep_sc->callback([&] {
    action = [&](Context& ctx) { report_cmd(ctx, rep_dataset, rep_corpus); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Context ctx;
    ctx.workers = workers;
    if (!config_file.empty()) ctx.config.merge_file(config_file);
    for (const auto& o : overrides) ctx.config.apply_override(o);
    if (seed) ctx.config.apply_override("seed=" + std::to_string(*seed));
    ctx.config.validate();
    action(ctx);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("prefalign");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace prefalign::cli
