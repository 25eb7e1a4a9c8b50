#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "sensemt/corpus.hpp"
#include "sensemt/io.hpp"

#include <sstream>

using namespace sensemt;
using namespace sensemt::testing;

namespace {

std::string fixture(const std::string& name) { return io::read_file(std::string(SENSEMT_TEST_DATA) + "/fixtures/" + name); }

const char* kGoodLine =
    R"({"id":"a","text":"the Bank","tokens":[{"surface":"the","lemma":"the","start":0,"end":3},)"
    R"({"surface":"Bank","lemma":"Bank","sense":"R","start":4,"end":8}],"target":"la orilla","src_lang":"en","tgt_lang":"es"})";

}  // namespace

TEST(SenseId, RejectsEmptyAndWhitespace) {
  EXPECT_THROW(SenseId(""), Error);
  EXPECT_THROW(SenseId("bn 1"), Error);
  EXPECT_EQ(SenseId("bn:00008364n").str(), "bn:00008364n");
}

TEST(CorpusParse, CommittedC0MatchesBuilder) {
  const auto parsed = parse_annotated_corpus(fixture("c0.jsonl"));
  EXPECT_TRUE(parsed.diagnostics.empty());
  EXPECT_EQ(parsed.records, c0_corpus());
}

TEST(CorpusParse, LowercasesLemmas) {
  const auto parsed = parse_annotated_corpus(std::string(kGoodLine));
  ASSERT_EQ(parsed.records.size(), 1u);
  EXPECT_EQ(parsed.records[0].source.tokens[1].lemma, "bank");
  EXPECT_EQ(parsed.records[0].source.tokens[1].surface, "Bank");
}

TEST(CorpusParse, MalformedLinesBecomeDiagnostics) {
  std::string contents = std::string(kGoodLine) + "\n{not json\n\n" +
                         R"({"id":"b","text":"x","tokens":[{"surface":"y","start":0,"end":1}],"target":"t","src_lang":"en","tgt_lang":"es"})" +
                         "\n";
  const auto parsed = parse_annotated_corpus(contents);
  EXPECT_EQ(parsed.records.size(), 1u);
  ASSERT_EQ(parsed.diagnostics.size(), 2u);
  EXPECT_EQ(parsed.diagnostics[0].line, 2u);
  EXPECT_EQ(parsed.diagnostics[1].line, 4u);
  EXPECT_NE(parsed.diagnostics[1].message.find("surface"), std::string::npos);
}

TEST(CorpusParse, DuplicateIdKeepsFirst) {
  auto second = std::string(kGoodLine);
  second.replace(second.find("la orilla"), 9, "el banco");
  const auto parsed = parse_annotated_corpus(std::string(kGoodLine) + "\n" + second + "\n");
  ASSERT_EQ(parsed.records.size(), 1u);
  EXPECT_EQ(parsed.records[0].target, "la orilla");
  ASSERT_EQ(parsed.diagnostics.size(), 1u);
  EXPECT_EQ(parsed.diagnostics[0].line, 2u);
}

TEST(CorpusParse, SpanChecks) {
  auto s = annotate("x", "the bank", {{"bank", "R"}});
  EXPECT_FALSE(check_sentence(s));
  auto bad = s;
  bad.tokens[1].end = 20;
  EXPECT_TRUE(check_sentence(bad));
  bad = s;
  bad.tokens[1].start = 2;
  EXPECT_TRUE(check_sentence(bad));
  bad = s;
  bad.tokens[1].start = bad.tokens[1].end;
  EXPECT_TRUE(check_sentence(bad));
}

TEST(CorpusParse, SameLanguageRejected) {
  auto line = std::string(kGoodLine);
  line.replace(line.find("\"es\""), 4, "\"en\"");
  const auto parsed = parse_annotated_corpus(line);
  EXPECT_TRUE(parsed.records.empty());
  EXPECT_EQ(parsed.diagnostics.size(), 1u);
}

TEST(CorpusParse, StreamAndStringAgree) {
  std::istringstream in(fixture("c0.jsonl"));
  EXPECT_EQ(parse_annotated_corpus(in).records, parse_annotated_corpus(fixture("c0.jsonl")).records);
}

TEST(CorpusParse, RoundTripIsIdentity) {
  const auto c0 = c0_corpus();
  const auto text = serialize_corpus(c0);
  EXPECT_EQ(parse_annotated_corpus(text).records, c0);
  EXPECT_EQ(serialize_corpus(parse_annotated_corpus(text).records), text);
}

TEST(CorpusStats, C0Counts) {
  const auto stats = validate_corpus(c0_corpus());
  EXPECT_EQ(stats.sentences, 4u);
  EXPECT_EQ(stats.sense_tokens, 4u);
  EXPECT_EQ(stats.distinct_sense_lemmas, 2u);
  EXPECT_EQ(stats.distinct_senses, 3u);
  EXPECT_EQ(stats.tokens, 5u + 5u + 4u + 3u);
}

TEST(EvalSet, BlazeItemParses) {
  const auto parsed = parse_eval_set(fixture("blaze_eval.jsonl"));
  ASSERT_TRUE(parsed.diagnostics.empty());
  ASSERT_EQ(parsed.records.size(), 1u);
  const auto& item = parsed.records[0];
  EXPECT_EQ(item.ambiguous_token().lemma, "blaze");
  EXPECT_EQ(item.good.front(), "白线");
  EXPECT_EQ(item.bad.front(), "火焰");
  EXPECT_EQ(item.tgt_lang, "zh");
}

TEST(EvalSet, OverlappingGoodBadRejectedCaseFolded) {
  EvalItem item;
  item.source = annotate("e1", "the bank", {{"bank", "R"}});
  item.id = "e1";
  item.good = {"Orilla"};
  item.bad = {"orilla"};
  const auto parsed = parse_eval_set(serialize_eval_item(item));
  EXPECT_TRUE(parsed.records.empty());
  ASSERT_EQ(parsed.diagnostics.size(), 1u);
  EXPECT_NE(parsed.diagnostics[0].message.find("both good and bad"), std::string::npos);
}

TEST(EvalSet, RequiresExactlyOneSenseToken) {
  EvalItem item;
  item.source = annotate("e1", "bank bank", {{"bank", "R"}});
  item.id = "e1";
  item.good = {"orilla"};
  item.bad = {"banco"};
  EXPECT_EQ(parse_eval_set(serialize_eval_item(item)).diagnostics.size(), 1u);
  item.source = annotate("e1", "the shore");
  EXPECT_EQ(parse_eval_set(serialize_eval_item(item)).diagnostics.size(), 1u);
}

TEST(CorpusView, FindById) {
  const auto c0 = c0_corpus();
  const CorpusView view(c0);
  ASSERT_NE(view.find("s3"), nullptr);
  EXPECT_EQ(view.find("s3")->target, "la orilla estaba embarrada");
  EXPECT_EQ(view.find("nope"), nullptr);
}

TEST(CorpusParse, SerialAndParallelAgree) {
  Rng rng(5);
  const auto corpus = random_corpus(rng, 400);
  const auto text = serialize_corpus(corpus) + "garbage\n" + serialize_corpus(corpus);
  const auto a = parse_annotated_corpus(text, Exec::serial);
  const auto b = parse_annotated_corpus(text, Exec::parallel);
  EXPECT_EQ(a.records, b.records);
  EXPECT_EQ(a.diagnostics, b.diagnostics);
}
