#include <gtest/gtest.h>
#include <fmt/format.h>

#include "fixtures.hpp"
#include "sensemt/curation.hpp"
#include "sensemt/io.hpp"
#include "sensemt/prompt.hpp"

#include <filesystem>
#include <set>

#include <json.hpp>
#include <omp.h>

using namespace sensemt;
using namespace sensemt::testing;

namespace {

ScoredSentence scored(std::string id, std::uint32_t degree, std::uint64_t freq) {
  return {std::move(id), AmbiguityScore{degree, freq}};
}

}  // namespace

TEST(ScoreSentence, C0Values) {
  const auto c0 = c0_corpus();
  const auto index = build_index(c0, "c0");
  EXPECT_EQ(score_sentence(c0[0].source, index), (AmbiguityScore{2, 2}));
  EXPECT_EQ(score_sentence(c0[1].source, index), (AmbiguityScore{2, 1}));
  EXPECT_EQ(score_sentence(c0[3].source, index), (AmbiguityScore{1, 1}));
  EXPECT_FALSE(score_sentence(annotate("x", "no senses"), index));
}

TEST(ScoreSentence, MaxDegreeAndMinFrequencyAcrossTokens) {
  const auto c0 = c0_corpus();
  const auto index = build_index(c0, "c0");
  // bank:R gives (2, 2); bass:M gives (1, 1).
  const auto s = annotate("x", "bank bass", {{"bank", "R"}, {"bass", "M"}});
  EXPECT_EQ(score_sentence(s, index), (AmbiguityScore{2, 1}));
}

TEST(RankAndInterleave, C0WithTwo) {
  const auto c0 = c0_corpus();
  const auto index = build_index(c0, "c0");
  const auto r = rank_and_interleave(c0, index, 2);
  EXPECT_EQ(r.by_degree, (std::vector<std::string>{"s2", "s1", "s3", "s4"}));
  EXPECT_EQ(r.by_rarity, (std::vector<std::string>{"s2", "s4", "s1", "s3"}));
  // s2 tops both lists; the rarity turn backfills with its next entry.
  EXPECT_EQ(r.selected, (std::vector<std::string>{"s2", "s4"}));
}

TEST(RankAndInterleave, SaturatesAtScoreableCount) {
  const auto c0 = c0_corpus();
  const auto index = build_index(c0, "c0");
  auto corpus = c0;
  corpus.push_back(make_pair("s5", "no senses here", "t"));
  const auto r = rank_and_interleave(corpus, index, 100);
  EXPECT_EQ(r.selected.size(), 4u);
  EXPECT_EQ(std::set<std::string>(r.selected.begin(), r.selected.end()),
            (std::set<std::string>{"s1", "s2", "s3", "s4"}));
}

TEST(RankAndInterleave, DisjointRankingsAlternate) {
  // High-degree sentences are common, rare sentences have low degree.
  std::vector<ScoredSentence> s{scored("d1", 9, 50), scored("d2", 8, 60), scored("d3", 7, 70),
                                scored("r1", 1, 1),  scored("r2", 1, 2),  scored("r3", 1, 3)};
  const auto r = rank_and_interleave(s, 4);
  EXPECT_EQ(r.selected, (std::vector<std::string>{"d1", "r1", "d2", "r2"}));
  const auto odd = rank_and_interleave(s, 5);
  EXPECT_EQ(odd.selected, (std::vector<std::string>{"d1", "r1", "d2", "r2", "d3"}));
}

TEST(RankAndInterleave, SharedTopBackfillsFromRarity) {
  std::vector<ScoredSentence> s{scored("top", 5, 1), scored("deg", 4, 9), scored("rare", 1, 2)};
  EXPECT_EQ(rank_and_interleave(s, 2).selected, (std::vector<std::string>{"top", "rare"}));
}

TEST(RankAndInterleave, EmptyInput) {
  EXPECT_TRUE(rank_and_interleave(std::vector<ScoredSentence>{}, 10).selected.empty());
}

TEST(RankAndInterleave, SerialAndParallelScoringAgree) {
  omp_set_num_threads(4);
  Rng rng(31);
  for (int round = 0; round < 10; ++round) {
    const auto corpus = random_corpus(rng, 300);
    const auto index = build_index(corpus, "r");
    const auto a = score_corpus(corpus, index, Exec::serial);
    const auto b = score_corpus(corpus, index, Exec::parallel);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].id, b[i].id);
      EXPECT_EQ(a[i].score, b[i].score);
    }
  }
}

TEST(SplitValidation, SizesAndDeterminism) {
  std::vector<std::string> ids;
  for (int i = 0; i < 1000; ++i) ids.push_back(fmt::format("id{:04}", i));
  const auto a = split_validation(ids, 500, 7);
  EXPECT_EQ(a.train.size(), 500u);
  EXPECT_EQ(a.valid.size(), 500u);
  const auto b = split_validation(ids, 500, 7);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.valid, b.valid);
  std::set<std::string> all(a.train.begin(), a.train.end());
  all.insert(a.valid.begin(), a.valid.end());
  EXPECT_EQ(all.size(), 1000u);
  EXPECT_NE(split_validation(ids, 500, 8).valid, a.valid);
}

TEST(SplitValidation, EdgeCases) {
  const std::vector<std::string> ids{"a", "b", "c"};
  const auto none = split_validation(ids, 0, 1);
  EXPECT_EQ(none.train, ids);
  EXPECT_TRUE(none.valid.empty());
  EXPECT_THROW(split_validation(ids, 3, 1), Error);
}

TEST(EmitDataset, WritesRecordsAndManifest) {
  const auto dir = std::filesystem::temp_directory_path() / "sensemt_emit_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  Rng rng(3);
  std::vector<ParallelPair> corpus;
  std::vector<std::string> train;
  std::vector<std::string> valid;
  for (int i = 0; i < 12; ++i) {
    corpus.push_back(make_pair(fmt::format("p{}", i), fmt::format("sentence {}", i), fmt::format("frase {}", i)));
    (i < 10 ? train : valid).push_back(corpus.back().id());
  }
  const CorpusView view(corpus);
  Provenance prov{"cid", "abc", 9, 2, 12};
  const auto out = emit_finetune_dataset(train, valid, view, dir, prov);
  EXPECT_EQ(out.train_records, 10u);
  EXPECT_EQ(io::split_lines(io::read_file(out.train_path)).size(), 10u);
  EXPECT_EQ(io::split_lines(io::read_file(out.valid_path)).size(), 2u);
  const auto first = parse_alpaca(io::split_lines(io::read_file(out.train_path)).front());
  EXPECT_EQ(first, render_alpaca_record(corpus[0]));
  const auto m = nlohmann::json::parse(io::read_file(out.manifest_path));
  EXPECT_EQ(m["training"]["learning_rate"].get<double>(), 3e-4);
  EXPECT_EQ(m["provenance"]["corpus_id"], "cid");
  EXPECT_EQ(m["provenance"]["index_checksum"], "abc");
  std::filesystem::remove_all(dir);
}

TEST(EmitDataset, MissingIdAndEmptyTrainRejected) {
  const auto c0 = c0_corpus();
  const CorpusView view(c0);
  const auto dir = std::filesystem::temp_directory_path();
  try {
    emit_finetune_dataset({"s1", "ghost"}, {}, view, dir, {});
    FAIL() << "expected Error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
  EXPECT_THROW(emit_finetune_dataset({}, {"s1"}, view, dir, {}), Error);
}
