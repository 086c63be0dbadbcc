// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors

#include <gtest/gtest.h>

#include <filesystem>

#include "opinion/tokenize.hpp"

using namespace opinion;
namespace fs = std::filesystem;

namespace {

std::string mock_tokenizer_command() {
  // The script sits next to this source file; CMake runs tests from the
  // build tree, so locate it via the source dir compiled in.
  fs::path script = fs::path(OPINION_TEST_DIR) / "mock_tokenizer.py";
  return "python3 " + script.string();
}

}  // namespace

TEST(BuiltinTokenizer, EmptyInput) {
  BuiltinTokenizer tok;
  EXPECT_TRUE(tok.tokenize("").empty());
}

TEST(BuiltinTokenizer, LongestMatchKeepsCompoundsWhole) {
  BuiltinTokenizer tok;
  tok.add_dictionary_entry("福島第一原発");
  tok.add_dictionary_entry("処理水");
  auto tokens = tok.tokenize("福島第一原発の処理水");
  ASSERT_EQ(tokens.size(), 3u);
  EXPECT_EQ(tokens[0].surface, "福島第一原発");
  EXPECT_EQ(tokens[0].pos, Pos::Noun);
  EXPECT_EQ(tokens[1].surface, "の");
  EXPECT_EQ(tokens[1].pos, Pos::Other);
  EXPECT_EQ(tokens[2].surface, "処理水");
  EXPECT_EQ(tokens[2].pos, Pos::Noun);
}

TEST(BuiltinTokenizer, PrefersLongerDictionaryEntry) {
  BuiltinTokenizer tok;
  tok.add_dictionary_entry("原発");
  tok.add_dictionary_entry("福島第一原発");
  auto tokens = tok.tokenize("福島第一原発");
  ASSERT_EQ(tokens.size(), 1u);
  EXPECT_EQ(tokens[0].surface, "福島第一原発");
}

TEST(BuiltinTokenizer, ScriptSegmentation) {
  BuiltinTokenizer tok;
  auto tokens = tok.tokenize("abc 原発");
  ASSERT_EQ(tokens.size(), 2u);
  EXPECT_EQ(tokens[0].surface, "abc");
  EXPECT_EQ(tokens[0].pos, Pos::Other);
  EXPECT_EQ(tokens[1].surface, "原発");
  EXPECT_EQ(tokens[1].pos, Pos::Noun);

  // Mixed-script text splits at script boundaries; katakana runs are nouns.
  auto mixed = tok.tokenize("トリチウムは安全");
  ASSERT_EQ(mixed.size(), 3u);
  EXPECT_EQ(mixed[0].surface, "トリチウム");
  EXPECT_EQ(mixed[0].pos, Pos::Noun);
  EXPECT_EQ(mixed[1].surface, "は");
  EXPECT_EQ(mixed[2].surface, "安全");
}

TEST(BuiltinTokenizer, NormalizesLatinAndWidth) {
  BuiltinTokenizer tok;
  auto tokens = tok.tokenize("ＡＢＣ");
  ASSERT_EQ(tokens.size(), 1u);
  EXPECT_EQ(tokens[0].normalized, "abc");
}

TEST(BuiltinTokenizer, DictionaryNormalizedForm) {
  BuiltinTokenizer tok;
  tok.add_dictionary_entry("福一", "福島第一原発");
  auto tokens = tok.tokenize("福一");
  ASSERT_EQ(tokens.size(), 1u);
  EXPECT_EQ(tokens[0].surface, "福一");
  EXPECT_EQ(tokens[0].normalized, "福島第一原発");
}

TEST(SubprocessTokenizer, SpeaksLineJsonProtocol) {
  SubprocessTokenizer tok(mock_tokenizer_command());
  auto tokens = tok.tokenize("Alpha beta/x 原発");
  ASSERT_EQ(tokens.size(), 3u);
  EXPECT_EQ(tokens[0].surface, "Alpha");
  EXPECT_EQ(tokens[0].normalized, "alpha");
  EXPECT_EQ(tokens[0].pos, Pos::Noun);
  EXPECT_EQ(tokens[1].surface, "beta");
  EXPECT_EQ(tokens[1].pos, Pos::Other);
  EXPECT_EQ(tokens[2].surface, "原発");

  // The handle is reusable across calls.
  auto again = tok.tokenize("one two");
  EXPECT_EQ(again.size(), 2u);
}

TEST(SubprocessTokenizer, FailureIsFatalWithStderr) {
  SubprocessTokenizer tok("echo 'dying on purpose' >&2; exit 3");
  try {
    tok.tokenize("anything");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("dying on purpose"), std::string::npos);
  }
}

// ---------------------------------------------------------------------------
// build_bow

namespace {

std::vector<std::pair<std::string, std::string>> one_doc(const std::string& text) {
  return {{"d0", text}};
}

}  // namespace

TEST(BuildBow, DirectCounts) {
  BuiltinTokenizer tok;
  auto corpus = build_bow(one_doc("原発 停止 原発"), tok);
  EXPECT_EQ(corpus.vocab.size(), 2);
  EXPECT_EQ(*corpus.vocab.id_of("原発"), 0);
  EXPECT_EQ(*corpus.vocab.id_of("停止"), 1);
  ASSERT_EQ(corpus.docs.size(), 1u);
  EXPECT_EQ(corpus.docs[0].counts,
            (std::vector<std::pair<int32_t, int32_t>>{{0, 2}, {1, 1}}));
  EXPECT_EQ(corpus.docs[0].total_tokens, 3);
}

TEST(BuildBow, Stopwords) {
  BuiltinTokenizer tok;
  BowOptions options;
  options.stopwords = {"停止"};
  auto corpus = build_bow(one_doc("原発 停止 原発"), tok, options);
  EXPECT_EQ(corpus.vocab.size(), 1);
  EXPECT_EQ(corpus.docs[0].counts,
            (std::vector<std::pair<int32_t, int32_t>>{{0, 2}}));
}

TEST(BuildBow, DisjointDocs) {
  BuiltinTokenizer tok;
  std::vector<std::pair<std::string, std::string>> docs = {{"a", "処理水 海洋"},
                                                           {"b", "地震 津波 震度"}};
  auto corpus = build_bow(docs, tok);
  EXPECT_EQ(corpus.vocab.size(), 5);
  for (int32_t id = 0; id < corpus.vocab.size(); ++id) EXPECT_EQ(corpus.vocab.doc_freq(id), 1);
}

TEST(BuildBow, MinCorpusCountPrunesAndReindexes) {
  BuiltinTokenizer tok;
  std::vector<std::pair<std::string, std::string>> docs = {{"a", "常連 常連 稀少"},
                                                           {"b", "常連 別語 別語"}};
  BowOptions options;
  options.min_corpus_count = 2;
  auto corpus = build_bow(docs, tok, options);
  EXPECT_EQ(corpus.vocab.size(), 2);
  EXPECT_EQ(*corpus.vocab.id_of("常連"), 0);
  EXPECT_EQ(*corpus.vocab.id_of("別語"), 1);
  EXPECT_FALSE(corpus.vocab.id_of("稀少").has_value());
}

TEST(BuildBow, EmptyDocsRetainedAndReported) {
  BuiltinTokenizer tok;
  std::vector<std::pair<std::string, std::string>> docs = {{"a", "原発"}, {"b", "the noun-free"}};
  auto corpus = build_bow(docs, tok);
  ASSERT_EQ(corpus.docs.size(), 2u);
  EXPECT_TRUE(corpus.docs[1].counts.empty());
  EXPECT_EQ(corpus.empty_doc_ids, (std::vector<std::string>{"b"}));
}

TEST(BuildBow, AllEmptyIsFatal) {
  BuiltinTokenizer tok;
  EXPECT_THROW(build_bow(one_doc("english only text"), tok), ConfigError);
}

TEST(BuildBow, VocabularyBijectionAndFreqConservation) {
  SynthOptions opts{.seed = 11, .videos_per_topic = 8};
  BuiltinTokenizer tok;
  std::vector<std::pair<std::string, std::string>> docs;
  for (int i = 0; i < 16; ++i) {
    std::string text;
    std::mt19937_64 rng(static_cast<uint64_t>(i) + 100);
    const std::vector<std::string> vocab = {"処理水", "海洋", "放出", "地震", "津波"};
    for (int t = 0; t < 1 + static_cast<int>(rng() % 20); ++t) {
      if (t) text += ' ';
      text += vocab[rng() % vocab.size()];
    }
    docs.emplace_back("d" + std::to_string(i), text);
  }
  auto corpus = build_bow(docs, tok);

  // id(term(i)) == i both ways.
  for (int32_t id = 0; id < corpus.vocab.size(); ++id)
    EXPECT_EQ(*corpus.vocab.id_of(corpus.vocab.term_of(id)), id);

  // Sum of per-doc counts equals recorded corpus frequency.
  std::vector<int64_t> totals(static_cast<size_t>(corpus.vocab.size()), 0);
  for (const auto& d : corpus.docs)
    for (auto [id, n] : d.counts) totals[static_cast<size_t>(id)] += n;
  for (int32_t id = 0; id < corpus.vocab.size(); ++id)
    EXPECT_EQ(totals[static_cast<size_t>(id)], corpus.vocab.corpus_freq(id));
  (void)opts;
}

TEST(BuildBow, DeterministicAcrossRuns) {
  BuiltinTokenizer tok;
  std::vector<std::pair<std::string, std::string>> docs = {{"a", "処理水 海洋 処理水"},
                                                           {"b", "海洋 地震"}};
  auto c1 = build_bow(docs, tok);
  auto c2 = build_bow(docs, tok);
  EXPECT_EQ(vocab_to_tsv(c1.vocab), vocab_to_tsv(c2.vocab));
  EXPECT_EQ(bow_to_jsonl(c1.docs), bow_to_jsonl(c2.docs));
}

TEST(BowArtifacts, RoundTrip) {
  BuiltinTokenizer tok;
  auto corpus = build_bow({{"a", "処理水 海洋 処理水"}, {"b", "海洋 地震"}}, tok);
  Vocabulary vocab2 = vocab_from_tsv(vocab_to_tsv(corpus.vocab));
  EXPECT_EQ(vocab_to_tsv(vocab2), vocab_to_tsv(corpus.vocab));
  auto docs2 = bow_from_jsonl(bow_to_jsonl(corpus.docs), vocab2.size());
  EXPECT_EQ(bow_to_jsonl(docs2), bow_to_jsonl(corpus.docs));
}

TEST(BowArtifacts, FreqCsvSortedByFrequency) {
  BuiltinTokenizer tok;
  auto corpus = build_bow({{"a", "海洋 処理水 海洋 海洋 地震 処理水"}}, tok);
  std::string csv = freq_to_csv(corpus.vocab);
  size_t kaiyo = csv.find("海洋");
  size_t shorisui = csv.find("処理水");
  size_t jishin = csv.find("地震");
  EXPECT_LT(kaiyo, shorisui);
  EXPECT_LT(shorisui, jishin);
}
