// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "prefalign/corpus/jsonl.hpp"
#include "prefalign/corpus/stats.hpp"
#include "prefalign/corpus/synthetic.hpp"
#include "prefalign/corpus/types.hpp"
#include "prefalign/error.hpp"

namespace prefalign::corpus {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("prefalign_corpus_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path file(const std::string& name) const { return dir_ / name; }
  void write_raw(const fs::path& p, const std::string& text) const {
    std::ofstream(p, std::ios::binary) << text;
  }
  fs::path dir_;
};

std::string random_text(std::mt19937_64& gen, std::size_t min_len) {
  static const std::vector<std::string> pieces = {"a", "b", " ", "\"", "\\", "\n", "\t",
                                                  "\xc3\xa9", "\xe2\x82\xac", "{", "}"};
  std::uniform_int_distribution<std::size_t> len(min_len, 12), pick(0, pieces.size() - 1);
  std::string s;
  for (std::size_t i = len(gen); i > 0; --i) s += pieces[pick(gen)];
  return s;
}

PreferencePair pair(const std::string& id, double rejected, double chosen) {
  PreferencePair p;
  p.segment_id = id;
  p.chosen = {SystemId::sampled(1), "good"};
  p.rejected = {SystemId::sampled(2), "bad"};
  p.chosen_score = chosen;
  p.rejected_score = rejected;
  p.metric = "edit_sim";
  p.builder = "test";
  return p;
}

TEST(SystemIdTest, ParseAndPrintRoundTrip) {
  for (const std::string s : {"base", "ref", "ext:gpt", "sample:1", "sample:20"}) {
    EXPECT_EQ(SystemId::parse(s).str(), s);
  }
  for (const std::string s : {"", "Base", "ext:", "sample:0", "sample:x", "sample:-1", "sample:"}) {
    EXPECT_THROW(SystemId::parse(s), ParseError) << s;
  }
  EXPECT_EQ(SystemId(), SystemId::base());
}

TEST(LangPairTest, DirectionAgainstPivot) {
  EXPECT_EQ((LangPair{"de", "en"}).direction("en"), Direction::kIntoPivot);
  EXPECT_EQ((LangPair{"en", "de"}).direction("en"), Direction::kOutOfPivot);
  EXPECT_THROW((LangPair{"de", "fr"}).direction("en"), ValidationError);
}

TEST(CandidateSetTest, Invariants) {
  CandidateSet ok{"s1", {{SystemId::base(), "x"}, {SystemId::sampled(1), ""}, {SystemId::sampled(2), "y"}}};
  EXPECT_NO_THROW(ok.validate());
  ASSERT_NE(ok.find(SystemId::sampled(2)), nullptr);
  EXPECT_EQ(ok.find(SystemId::sampled(2))->text, "y");
  EXPECT_EQ(ok.find(SystemId::reference()), nullptr);

  CandidateSet one{"s1", {{SystemId::base(), "x"}}};
  EXPECT_THROW(one.validate(), ValidationError);
  CandidateSet dup{"s1", {{SystemId::base(), "x"}, {SystemId::base(), "y"}}};
  EXPECT_THROW(dup.validate(), ValidationError);
  CandidateSet empty_base{"s1", {{SystemId::base(), ""}, {SystemId::sampled(1), "y"}}};
  EXPECT_THROW(empty_base.validate(), ValidationError);
  CandidateSet bad_index{"s1", {{SystemId::base(), "x"}, {SystemId::sampled(3), "y"}}};
  EXPECT_THROW(bad_index.validate(), ValidationError);
}

TEST(PreferencePairTest, StrictOrder) {
  EXPECT_NO_THROW(pair("s", 1.0, 2.0).validate());
  EXPECT_THROW(pair("s", 2.0, 2.0).validate(), ValidationError);
  EXPECT_THROW(pair("s", 3.0, 2.0).validate(), ValidationError);
  EXPECT_THROW(pair("s", 1.0, std::nan("")).validate(), ValidationError);
  PreferenceDataset empty;
  EXPECT_THROW(empty.validate(), ValidationError);
  EXPECT_NO_THROW(empty.validate(false));
}

TEST_F(TempDir, RoundTripPropertyForEveryRecordType) {
  std::mt19937_64 gen(17);
  for (int round = 0; round < 20; ++round) {
    std::vector<Segment> segs;
    std::vector<CandidateSet> sets;
    std::vector<PreferencePair> pairs;
    std::vector<CandidateScores> scores;
    for (int i = 0; i < 8; ++i) {
      const std::string id = "seg-" + std::to_string(i);
      Segment s{id, {"en", "xx"}, random_text(gen, 1), std::nullopt};
      if (i % 3) s.reference = random_text(gen, 0);
      segs.push_back(s);
      CandidateSet cs{id, {{SystemId::base(), random_text(gen, 1)}, {SystemId::sampled(1), random_text(gen, 0)},
                           {SystemId::external("sys"), random_text(gen, 1)}}};
      sets.push_back(cs);
      PreferencePair p = pair(id, -1.5 * i, 0.1 + i);
      p.chosen.text = random_text(gen, 0);
      pairs.push_back(p);
      scores.push_back({id, "chrf", {0.1 * i, 1.0 / 3.0, 1e-17}});
    }
    write_jsonl(file("a.jsonl"), segs);
    EXPECT_EQ(read_jsonl<Segment>(file("a.jsonl")), segs);
    write_jsonl(file("b.jsonl"), sets);
    EXPECT_EQ(read_jsonl<CandidateSet>(file("b.jsonl")), sets);
    write_jsonl(file("c.jsonl"), pairs);
    EXPECT_EQ(read_jsonl<PreferencePair>(file("c.jsonl")), pairs);
    write_jsonl(file("d.jsonl"), scores);
    EXPECT_EQ(read_jsonl<CandidateScores>(file("d.jsonl")), scores);
  }
}

TEST_F(TempDir, EmptyFileIsAnEmptyCorpus) {
  write_raw(file("e.jsonl"), "");
  EXPECT_TRUE(read_jsonl<Segment>(file("e.jsonl")).empty());
  EXPECT_THROW(read_jsonl<Segment>(file("missing.jsonl")), InputError);
}

TEST_F(TempDir, ErrorsNameTheLine) {
  const std::vector<PreferencePair> good = {pair("s1", 1, 2), pair("s2", 3, 4)};
  write_jsonl(file("p.jsonl"), good);
  std::ifstream in(file("p.jsonl"));
  std::string l1, l2;
  std::getline(in, l1);
  std::getline(in, l2);
  in.close();

  std::string bad_line = to_json_line(pair("s3", 5, 6));
  bad_line.replace(bad_line.find("\"rejected_score\":5"), 18, "\"rejected_score\":6");
  write_raw(file("tie.jsonl"), l1 + "\n" + l2 + "\n" + bad_line + "\n");
  try {
    read_jsonl<PreferencePair>(file("tie.jsonl"));
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.record_id(), "s3");
  }

  write_raw(file("bad.jsonl"), l1 + "\n{not json\n");
  try {
    read_jsonl<PreferencePair>(file("bad.jsonl"));
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }

  write_raw(file("extra.jsonl"),
            R"({"id":"a","src_lang":"en","tgt_lang":"xx","source":"q","reference":null,"typo":1})"
            "\n");
  EXPECT_THROW(read_jsonl<Segment>(file("extra.jsonl")), ParseError);
  write_raw(file("same.jsonl"),
            R"({"id":"a","src_lang":"en","tgt_lang":"en","source":"q","reference":null})"
            "\n");
  EXPECT_THROW(read_jsonl<Segment>(file("same.jsonl")), ValidationError);
}

TEST(Synthetic, NoiseFreeReferencesAreTheTransform) {
  const Corpus c = generate_synthetic_corpus(SyntheticTask::kCipher, 1, 0.0, 7);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(*c[0].reference, substitution_cipher(c[0].source));
  EXPECT_EQ(apply_task(SyntheticTask::kReverse, "abc"), "cba");
  const Corpus r = generate_synthetic_corpus(SyntheticTask::kReverse, 5, 0.0, 7);
  for (const auto& s : r) EXPECT_EQ(*s.reference, std::string(s.source.rbegin(), s.source.rend()));
}

TEST(Synthetic, CipherIsABijectionOnLetters) {
  std::set<char> images;
  for (char ch = 'a'; ch <= 'z'; ++ch) images.insert(substitution_cipher(std::string(1, ch))[0]);
  EXPECT_EQ(images.size(), 26u);
  EXPECT_EQ(substitution_cipher(" "), " ");
}

TEST(Synthetic, NoiseFractionNearRate) {
  const Corpus c = generate_synthetic_corpus(SyntheticTask::kCipher, 100, 0.2, 7);
  std::size_t changed = 0, total = 0;
  for (const auto& s : c) {
    const std::string clean = substitution_cipher(s.source);
    ASSERT_EQ(clean.size(), s.reference->size());
    for (std::size_t i = 0; i < clean.size(); ++i) changed += clean[i] != (*s.reference)[i];
    total += clean.size();
  }
  EXPECT_NEAR(static_cast<double>(changed) / static_cast<double>(total), 0.2, 0.05);
}

TEST(Synthetic, ConfusionSwapsOnlyTheConfusableLetters) {
  SyntheticOptions o;
  o.confusable_letters = 8;
  o.confusion_rate = 0.5;
  const Corpus c = generate_synthetic_corpus(SyntheticTask::kCipher, 2000, 0.0, 3, o);
  std::size_t eligible = 0, swapped = 0;
  for (const auto& s : c) {
    const std::string clean = substitution_cipher(s.source);
    for (std::size_t i = 0; i < clean.size(); ++i) {
      const char got = (*s.reference)[i];
      if (clean[i] == ' ' || clean[i] - 'a' >= 8) {
        ASSERT_EQ(got, clean[i]);
        continue;
      }
      ++eligible;
      if (got != clean[i]) {
        ASSERT_EQ(got, 'a' + (clean[i] - 'a' + 13) % 26);
        ++swapped;
      }
    }
  }
  const double rate = static_cast<double>(swapped) / static_cast<double>(eligible);
  EXPECT_NEAR(rate, 0.5, 5 * std::sqrt(0.25 / static_cast<double>(eligible)));
}

TEST(Synthetic, DeterministicShapeAndErrors) {
  const Corpus a = generate_synthetic_corpus(SyntheticTask::kCipher, 50, 0.1, 99);
  EXPECT_EQ(a, generate_synthetic_corpus(SyntheticTask::kCipher, 50, 0.1, 99));
  EXPECT_NE(a, generate_synthetic_corpus(SyntheticTask::kCipher, 50, 0.1, 100));
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].lang_pair.direction("en"), i % 2 ? Direction::kIntoPivot : Direction::kOutOfPivot);
    EXPECT_GE(a[i].source.size(), 4u);
    EXPECT_LE(a[i].source.size(), 10u);
    EXPECT_NE(a[i].source.front(), ' ');
    EXPECT_NE(a[i].source.back(), ' ');
  }
  EXPECT_NO_THROW(index_by_id(a));
  EXPECT_THROW(generate_synthetic_corpus(SyntheticTask::kCipher, 5, 1.5, 1), ParameterError);
  EXPECT_THROW(generate_synthetic_corpus(SyntheticTask::kCipher, 5, -0.1, 1), ParameterError);
  EXPECT_THROW(parse_task("copy"), ParameterError);
  std::string bad = "A";
  util::Rng rng(1);
  EXPECT_THROW(corrupt_in_place(bad, 1.0, rng), InputError);
}

TEST(Stats, AveragesAndBreakdowns) {
  Corpus corpus = {{"s1", {"en", "xx"}, "a", "b"}, {"s2", {"xx", "en"}, "c", "d"}};
  PreferenceDataset ds;
  ds.pairs = {pair("s1", 80, 90), pair("s2", 90, 100)};
  ds.pairs[1].chosen.system = SystemId::reference();
  const DatasetStats st = dataset_stats(ds, corpus);
  EXPECT_EQ(st.n_pairs, 2u);
  EXPECT_DOUBLE_EQ(st.avg_rejected, 85.0);
  EXPECT_DOUBLE_EQ(st.avg_chosen, 95.0);
  EXPECT_EQ(st.per_lang_pair.at("en-xx"), 1u);
  EXPECT_EQ(st.per_chosen_system.at("ref"), 1u);
  EXPECT_EQ(st.per_chosen_system.at("sample"), 1u);
  EXPECT_DOUBLE_EQ(st.percent(1), 50.0);

  PreferenceDataset single;
  single.pairs = {pair("s1", 12.5, 70)};
  const DatasetStats one = dataset_stats(single, corpus);
  EXPECT_DOUBLE_EQ(one.avg_rejected, 12.5);
  EXPECT_DOUBLE_EQ(one.avg_chosen, 70.0);
  EXPECT_THROW(dataset_stats(PreferenceDataset{}, corpus), InputError);
  EXPECT_NE(stats_to_csv(st).find("lang_pair:xx-en,1,50.00"), std::string::npos);
}

TEST(Corpus, DuplicateIdsRejected) {
  Corpus c = {{"s1", {"en", "xx"}, "a", "b"}, {"s1", {"en", "xx"}, "c", "d"}};
  EXPECT_THROW(index_by_id(c), ValidationError);
}

}  // namespace
}  // namespace prefalign::corpus
