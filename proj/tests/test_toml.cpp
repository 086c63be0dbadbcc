// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors

#include <gtest/gtest.h>

#include "opinion/config.hpp"
#include "opinion/toml.hpp"

using namespace opinion;

TEST(Toml, ScalarsAndTables) {
  auto t = toml::parse(
      "# comment\n"
      "title = \"hello\"\n"
      "n = 42\n"
      "x = 1.5\n"
      "flag = true\n"
      "[section]\n"
      "key = \"値\"  # trailing comment\n"
      "[a.b]\n"
      "deep = -7\n");
  EXPECT_EQ(toml::get<std::string>(t, "title"), "hello");
  EXPECT_EQ(toml::get<int64_t>(t, "n"), 42);
  EXPECT_DOUBLE_EQ(*toml::get<double>(t, "x"), 1.5);
  EXPECT_EQ(toml::get<bool>(t, "flag"), true);
  EXPECT_EQ(toml::get<std::string>(t, "section.key"), "値");
  EXPECT_EQ(toml::get<int64_t>(t, "a.b.deep"), -7);
}

TEST(Toml, Arrays) {
  auto t = toml::parse(
      "words = [\"原発\", \"原子力\"]\n"
      "empty = []\n"
      "multi = [\n  \"a\",\n  \"b\",\n]\n"
      "ints = [1, 2, 3]\n");
  auto words = toml::get<std::vector<std::string>>(t, "words");
  ASSERT_TRUE(words.has_value());
  EXPECT_EQ(*words, (std::vector<std::string>{"原発", "原子力"}));
  EXPECT_TRUE(toml::get<std::vector<std::string>>(t, "empty")->empty());
  EXPECT_EQ(toml::get<std::vector<std::string>>(t, "multi")->size(), 2u);
  EXPECT_EQ(*toml::get<std::vector<int64_t>>(t, "ints"), (std::vector<int64_t>{1, 2, 3}));
}

TEST(Toml, StringEscapes) {
  auto t = toml::parse("s = \"a\\n\\t\\\"b\\\\\"\nu = \"\\u539f\\u767a\"\n");
  EXPECT_EQ(toml::get<std::string>(t, "s"), "a\n\t\"b\\");
  EXPECT_EQ(toml::get<std::string>(t, "u"), "原発");
}

TEST(Toml, Errors) {
  EXPECT_THROW(toml::parse("key"), ConfigError);
  EXPECT_THROW(toml::parse("key = "), ConfigError);
  EXPECT_THROW(toml::parse("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(toml::parse("x = \"unterminated"), ConfigError);
  EXPECT_THROW(toml::parse("x = 1 y = 2"), ConfigError);
}

TEST(Toml, IntWhereDoubleExpected) {
  auto t = toml::parse("alpha = 2\n");
  EXPECT_DOUBLE_EQ(*toml::get<double>(t, "alpha"), 2.0);
}

TEST(Config, RoundTrip) {
  PipelineConfig c;
  c.videos = "v.jsonl";
  c.rules.required_any = {"原発", "原子力"};
  c.rules.excluded_any = {"ロシア"};
  c.lda.topics = 16;
  c.lda.alpha = 3.125;
  c.lda.seed = 12345;
  c.sweep_k_min = 2;
  c.sweep_k_max = 20;
  c.coherence.epsilon = 1e-12;
  c.llm_endpoint = "http://127.0.0.1:9999";
  c.node_min_freq = 3;
  c.aggregate_all_comments = false;

  PipelineConfig parsed = parse_config(serialize_config(c));
  EXPECT_EQ(parsed, c);
  // Serialization is a fixed point.
  EXPECT_EQ(serialize_config(parsed), serialize_config(c));
}

TEST(Config, DefaultsSurviveRoundTrip) {
  PipelineConfig c;
  EXPECT_EQ(parse_config(serialize_config(c)), c);
}
