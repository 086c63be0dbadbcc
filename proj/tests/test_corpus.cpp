// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "opinion/corpus.hpp"
#include "opinion/synthetic.hpp"

using namespace opinion;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static int counter = 0;
  fs::path dir = fs::temp_directory_path() /
                 ("opinion-corpus-test-" + std::to_string(::getpid()) + "-" +
                  std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(CleanText, EmptyInput) { EXPECT_EQ(clean_text(""), ""); }

TEST(CleanText, RemovesUrls) {
  EXPECT_EQ(clean_text("見て https://t.co/xyz 最新"), "見て 最新");
  EXPECT_EQ(clean_text("http://a.example/x?q=1"), "");
  EXPECT_EQ(clean_text("前 HTTPS://EXAMPLE.COM 後"), "前 後");
}

TEST(CleanText, RemovesHashtagsWithAttachedWord) {
  EXPECT_EQ(clean_text("#原発 ニュース"), "ニュース");
  EXPECT_EQ(clean_text("＃処理水タグ と本文"), "と本文");
  EXPECT_EQ(clean_text("本文#中の井桁は残る"), "本文#中の井桁は残る");
}

TEST(CleanText, NfkcAndWhitespace) {
  // Full-width alphanumerics fold to ASCII; runs of whitespace collapse.
  EXPECT_EQ(clean_text("ＡＢＣ　１２３"), "ABC 123");
  EXPECT_EQ(clean_text("  a \t\n b  "), "a b");
}

TEST(CleanText, Idempotent) {
  std::mt19937_64 rng(99);
  const std::vector<std::string> pieces = {"原発",  "処理水", "#tag", "＃全角",   "abc",
                                           "ＡＢ",  " ",      "　",   "\n",       "。",
                                           "https://x.io/p", "http://", "#",      "１２３",
                                           "コメント",        "!?",    "ｶﾞｷﾞ"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string s;
    int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) s += pieces[rng() % pieces.size()];
    std::string once = clean_text(s);
    EXPECT_EQ(clean_text(once), once) << "not idempotent for: " << s;
  }
}

TEST(LoadVideos, EmptyFile) {
  fs::path dir = temp_dir();
  write_file(dir / "videos.jsonl", "");
  auto result = load_videos(dir / "videos.jsonl");
  EXPECT_TRUE(result.records.empty());
  EXPECT_EQ(result.skipped, 0u);
}

TEST(LoadVideos, ValidLinesInOrder) {
  fs::path dir = temp_dir();
  std::string lines;
  for (int i = 0; i < 3; ++i) {
    VideoDoc v{"v" + std::to_string(i), "ch", "t", "d", "", 1700000000 + i};
    lines += video_to_json(v).dump() + "\n";
  }
  write_file(dir / "videos.jsonl", lines);
  auto result = load_videos(dir / "videos.jsonl");
  ASSERT_EQ(result.records.size(), 3u);
  EXPECT_EQ(result.skipped, 0u);
  EXPECT_EQ(result.records[0].video_id, "v0");
  EXPECT_EQ(result.records[2].video_id, "v2");
}

TEST(LoadVideos, SkipsMalformedLinesWithCount) {
  fs::path dir = temp_dir();
  VideoDoc a{"a", "ch", "t", "d", "", 1700000000};
  VideoDoc b{"b", "ch", "t", "d", "", 1700000001};
  std::string lines = video_to_json(a).dump() + "\n" +
                      "{\"channel\": \"no id here\"}\n" +
                      video_to_json(b).dump() + "\n";
  write_file(dir / "videos.jsonl", lines);
  auto result = load_videos(dir / "videos.jsonl");
  EXPECT_EQ(result.records.size(), 2u);
  EXPECT_EQ(result.skipped, 1u);
}

TEST(LoadVideos, RejectsBadTimestamp) {
  fs::path dir = temp_dir();
  write_file(dir / "videos.jsonl",
             "{\"video_id\":\"a\",\"channel\":\"c\",\"title\":\"t\",\"description\":\"d\","
             "\"transcript\":\"\",\"published_at\":\"2023-13-40T99:00:00Z\"}\n");
  auto result = load_videos(dir / "videos.jsonl");
  EXPECT_TRUE(result.records.empty());
  EXPECT_EQ(result.skipped, 1u);
}

TEST(LoadVideos, MissingFileIsFatal) {
  EXPECT_THROW(load_videos("/nonexistent/path/videos.jsonl"), IoError);
}

TEST(Corpus, SaveLoadRoundTripIsByteIdentical) {
  fs::path dir = temp_dir();
  SynthCorpus synth = generate_synthetic_corpus({.seed = 3, .videos_per_topic = 5});
  save_videos(dir / "v1.jsonl", synth.videos);
  auto loaded = load_videos(dir / "v1.jsonl");
  EXPECT_EQ(loaded.skipped, 0u);
  save_videos(dir / "v2.jsonl", loaded.records);
  EXPECT_EQ(read_file(dir / "v1.jsonl"), read_file(dir / "v2.jsonl"));

  save_comments(dir / "c1.jsonl", synth.comments);
  auto comments = load_comments(dir / "c1.jsonl");
  save_comments(dir / "c2.jsonl", comments.records);
  EXPECT_EQ(read_file(dir / "c1.jsonl"), read_file(dir / "c2.jsonl"));
}

TEST(FilterVideos, RequiredKeywordKeeps) {
  FilterRules rules{{"原発", "原子力"}, {"北朝鮮", "ロシア"}};
  VideoDoc v{"v1", "ch", "原発再稼働", "", "", 0};
  auto result = filter_videos({v}, rules);
  ASSERT_EQ(result.kept.size(), 1u);
  EXPECT_TRUE(result.dropped.empty());
}

TEST(FilterVideos, MissingRequiredDrops) {
  FilterRules rules{{"原発", "原子力"}, {}};
  VideoDoc v{"v1", "ch", "エネルギー政策", "再エネの話題", "", 0};
  auto result = filter_videos({v}, rules);
  EXPECT_TRUE(result.kept.empty());
  ASSERT_EQ(result.dropped.size(), 1u);
  EXPECT_EQ(result.dropped[0].reason, "missing-required");
}

TEST(FilterVideos, ExcludedKeywordDropsWithName) {
  FilterRules rules{{"原発", "原子力"}, {"ロシア"}};
  VideoDoc v{"v1", "ch", "原子力とロシア", "", "", 0};
  auto result = filter_videos({v}, rules);
  EXPECT_TRUE(result.kept.empty());
  ASSERT_EQ(result.dropped.size(), 1u);
  EXPECT_EQ(result.dropped[0].reason, "excluded-keyword:ロシア");
}

TEST(FilterVideos, MatchingIsNfkcAndCaseInsensitive) {
  FilterRules rules{{"genpatsu"}, {"ＮＧワード"}};
  VideoDoc match{"v1", "ch", "GENPATSU news", "", "", 0};
  VideoDoc excl{"v2", "ch", "genpatsu ngワード", "", "", 0};
  auto result = filter_videos({match, excl}, rules);
  ASSERT_EQ(result.kept.size(), 1u);
  EXPECT_EQ(result.kept[0].video_id, "v1");
  ASSERT_EQ(result.dropped.size(), 1u);
}

TEST(FilterVideos, EmptyRequiredIsConfigError) {
  EXPECT_THROW(filter_videos({}, FilterRules{{}, {}}), ConfigError);
}

TEST(FilterVideos, PartitionIsExhaustive) {
  SynthCorpus synth = generate_synthetic_corpus({.seed = 5, .videos_per_topic = 10});
  FilterRules rules{{"原発", "原子力"}, {"北朝鮮", "ロシア"}};
  auto result = filter_videos(synth.videos, rules);
  EXPECT_EQ(result.kept.size() + result.dropped.size(), synth.videos.size());
  std::set<std::string> seen;
  for (const auto& v : result.kept) EXPECT_TRUE(seen.insert(v.video_id).second);
  for (const auto& d : result.dropped) EXPECT_TRUE(seen.insert(d.video_id).second);
}

TEST(LanguageFilter, DefaultHeuristic) {
  ScriptRatioClassifier classifier;
  EXPECT_EQ(classifier.classify("これはすごいですね"), LanguageClass::Japanese);
  EXPECT_EQ(classifier.classify("This is great news"), LanguageClass::NotJapanese);
  // "GJ! よくやった": 5 Japanese letters out of 7 -> ratio 5/7 >= 0.3.
  EXPECT_EQ(classifier.classify("GJ! よくやった"), LanguageClass::Japanese);
  // No letters at all: kept.
  EXPECT_EQ(classifier.classify("!!!???"), LanguageClass::Japanese);
}

TEST(LanguageFilter, PartitionSizesSum) {
  SynthCorpus synth = generate_synthetic_corpus({.seed = 8, .videos_per_topic = 6});
  ScriptRatioClassifier classifier;
  auto result = filter_language(synth.comments, classifier);
  EXPECT_EQ(result.kept.size() + result.removed.size(), synth.comments.size());
  bool english_removed = false;
  for (const auto& c : result.removed) english_removed |= c.comment_id == "c-english";
  EXPECT_TRUE(english_removed);
}

TEST(LanguageFilter, ClassifierFailureKeepsAndFlags) {
  struct Throwing : LanguageClassifier {
    LanguageClass classify(std::string_view text) const override {
      if (text.find("boom") != std::string_view::npos) throw std::runtime_error("boom");
      return LanguageClass::Japanese;
    }
  };
  std::vector<Comment> comments = {{"c1", "v", "ok", 0, false}, {"c2", "v", "boom", 0, false}};
  auto result = filter_language(comments, Throwing{});
  EXPECT_EQ(result.kept.size(), 2u);
  EXPECT_EQ(result.classifier_failures, 1u);
}

TEST(LinkComments, FlagsOrphans) {
  std::vector<VideoDoc> videos = {{"v1", "ch", "t", "d", "", 0}};
  std::vector<Comment> comments = {{"c1", "v1", "x", 0, false}, {"c2", "vX", "y", 0, false}};
  size_t orphans = link_comments(videos, comments);
  EXPECT_EQ(orphans, 1u);
  EXPECT_FALSE(comments[0].orphaned);
  EXPECT_TRUE(comments[1].orphaned);
}

TEST(FilterRulesFile, TomlAndJson) {
  fs::path dir = temp_dir();
  write_file(dir / "rules.toml",
             "required_any = [\"原発\"]\nexcluded_any = [\"ロシア\"]\n");
  FilterRules toml_rules = load_filter_rules(dir / "rules.toml");
  EXPECT_EQ(toml_rules.required_any, (std::vector<std::string>{"原発"}));
  EXPECT_EQ(toml_rules.excluded_any, (std::vector<std::string>{"ロシア"}));

  write_file(dir / "rules.json",
             "{\"required_any\": [\"原子力\"], \"excluded_any\": []}");
  FilterRules json_rules = load_filter_rules(dir / "rules.json");
  EXPECT_EQ(json_rules.required_any, (std::vector<std::string>{"原子力"}));

  write_file(dir / "bad.toml", "excluded_any = [\"x\"]\n");
  EXPECT_THROW(load_filter_rules(dir / "bad.toml"), ConfigError);
}
