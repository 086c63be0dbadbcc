// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opinion/config.hpp"
#include "opinion/corpus.hpp"
#include "opinion/sentiment.hpp"
#include "opinion/timeutil.hpp"

namespace opinion {

struct SynthOptions {
  uint64_t seed = 7;
  int videos_per_topic = 50;
  int tokens_per_doc = 40;
  int comments_per_video = 3;
};

struct SynthCorpus {
  std::vector<VideoDoc> videos;
  std::vector<Comment> comments;
  std::vector<std::pair<std::string, std::string>> gold;  // comment_id -> label name
  std::vector<int> video_topic;                           // generating topic per video
};

namespace detail {

inline int64_t synth_timestamp(int month_index, int day, int hour) {
  // Months cycle over 2022-01 .. 2023-12.
  int year = 2022 + (month_index / 12) % 2;
  int month = month_index % 12 + 1;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:00:00Z", year, month, day, hour);
  return *parse_utc(buf);
}

}  // namespace detail

/// Seeded two-topic generative corpus standing in for the unavailable
/// production data. Topic A is treated-water vocabulary, topic B is
/// earthquake vocabulary; comments are templated around known sentiment
/// words so both the LDA recovery and sentiment oracles have ground truth.
inline SynthCorpus generate_synthetic_corpus(const SynthOptions& options = {}) {
  static const std::vector<std::string> vocab_a = {"処理水", "海洋", "放出", "漁業", "風評被害"};
  static const std::vector<std::string> vocab_b = {"地震", "津波", "避難", "震度", "原子炉"};

  std::mt19937_64 rng(options.seed);
  auto pick = [&rng](const std::vector<std::string>& v) -> const std::string& {
    return v[static_cast<size_t>((static_cast<__uint128_t>(rng()) * v.size()) >> 64)];
  };

  SynthCorpus out;
  const int total_videos = options.videos_per_topic * 2;
  for (int i = 0; i < total_videos; ++i) {
    const int topic = i % 2;
    const auto& vocab = topic == 0 ? vocab_a : vocab_b;
    VideoDoc v;
    v.video_id = "v" + std::to_string(i);
    v.channel = "ch" + std::to_string(i % 3);
    v.title = "原発ニュース 第" + std::to_string(i) + "回";
    v.description = topic == 0 ? "処理水 に関する報道" : "地震 に関する報道";
    std::string body;
    for (int t = 0; t < options.tokens_per_doc; ++t) {
      if (t) body += ' ';
      body += pick(vocab);
    }
    v.transcript = body;
    v.published_at = detail::synth_timestamp(i % 24, 1 + i % 27, i % 24);
    out.videos.push_back(std::move(v));
    out.video_topic.push_back(topic);
  }

  // A handful of videos the rule filter must drop.
  {
    VideoDoc miss;
    miss.video_id = "v-miss";
    miss.channel = "ch0";
    miss.title = "エネルギー政策の最新動向";
    miss.description = "再生可能エネルギー の特集";
    miss.transcript = "電力 需要";
    miss.published_at = detail::synth_timestamp(3, 5, 9);
    out.videos.push_back(miss);
    out.video_topic.push_back(-1);

    VideoDoc excluded;
    excluded.video_id = "v-excl";
    excluded.channel = "ch1";
    excluded.title = "原発とロシアの動向";
    excluded.description = "国際政治 の話題";
    excluded.transcript = "外交 問題";
    excluded.published_at = detail::synth_timestamp(4, 6, 10);
    out.videos.push_back(excluded);
    out.video_topic.push_back(-1);
  }

  struct Template {
    const char* text;
    SentimentLabel label;
  };
  static const Template templates[] = {
      {"%sは安全だと思う。安心しました", SentimentLabel::Positive},
      {"説明が丁寧で良好。賛成です", SentimentLabel::Positive},
      {"%sは危険すぎる。不安しかない", SentimentLabel::Negative},
      {"対応は最悪。反対です", SentimentLabel::Negative},
      {"%sのニュースを見ました。続報を待ちます", SentimentLabel::Neutral},
      {"安全なのか危険なのか、まだわからない", SentimentLabel::Neutral},
  };

  int comment_idx = 0;
  for (int i = 0; i < total_videos; ++i) {
    const std::string theme = out.video_topic[static_cast<size_t>(i)] == 0 ? "処理水" : "地震";
    for (int c = 0; c < options.comments_per_video; ++c) {
      const Template& tpl = templates[static_cast<size_t>(comment_idx) % std::size(templates)];
      Comment cm;
      cm.comment_id = "c" + std::to_string(comment_idx);
      cm.video_id = "v" + std::to_string(i);
      char buf[256];
      std::snprintf(buf, sizeof buf, tpl.text, theme.c_str());
      cm.text = buf;
      cm.published_at = detail::synth_timestamp(i % 24, 2 + comment_idx % 25, comment_idx % 24);
      out.gold.emplace_back(cm.comment_id, label_name(tpl.label));
      out.comments.push_back(std::move(cm));
      ++comment_idx;
    }
  }

  // Edge-case comments: non-Japanese, URL/hashtag noise, pre-floor, orphan.
  {
    Comment en;
    en.comment_id = "c-english";
    en.video_id = "v0";
    en.text = "This is great news, thanks for sharing!";
    en.published_at = detail::synth_timestamp(13, 3, 8);
    out.comments.push_back(en);

    Comment noisy;
    noisy.comment_id = "c-noisy";
    noisy.video_id = "v1";
    noisy.text = "詳細はこちら https://example.com/x #原発 安全だと思う。安心です";
    noisy.published_at = detail::synth_timestamp(14, 4, 9);
    out.gold.emplace_back(noisy.comment_id, label_name(SentimentLabel::Positive));
    out.comments.push_back(noisy);

    Comment old;
    old.comment_id = "c-old";
    old.video_id = "v2";
    old.text = "昔の動画ですが安心しました";
    old.published_at = *parse_utc("2019-06-01T00:00:00Z");
    out.gold.emplace_back(old.comment_id, label_name(SentimentLabel::Positive));
    out.comments.push_back(old);

    Comment orphan;
    orphan.comment_id = "c-orphan";
    orphan.video_id = "v-gone";
    orphan.text = "この動画は消えたようです";
    orphan.published_at = detail::synth_timestamp(15, 5, 10);
    out.gold.emplace_back(orphan.comment_id, label_name(SentimentLabel::Neutral));
    out.comments.push_back(orphan);
  }
  return out;
}

inline std::string synth_lexicon_tsv() {
  return
      "# polarity lexicon for the bundled synthetic corpus\n"
      "安全\t+1\n"
      "安心\t+1\n"
      "良好\t+1\n"
      "賛成\t+1\n"
      "危険\t-1\n"
      "不安\t-1\n"
      "最悪\t-1\n"
      "反対\t-1\n";
}

inline std::string synth_gold_jsonl(const SynthCorpus& corpus) {
  std::string out;
  for (const auto& [id, label] : corpus.gold) {
    nlohmann::json j = {{"comment_id", id}, {"label", label}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

/// Writes the full fixture: corpus, lexicon, gold labels, rules and a
/// ready-to-run pipeline config.
inline void write_synthetic_fixture(const std::filesystem::path& dir,
                                    const SynthOptions& options = {}) {
  std::filesystem::create_directories(dir);
  SynthCorpus corpus = generate_synthetic_corpus(options);
  save_videos(dir / "videos.jsonl", corpus.videos);
  save_comments(dir / "comments.jsonl", corpus.comments);
  write_file(dir / "lexicon.tsv", synth_lexicon_tsv());
  write_file(dir / "gold.jsonl", synth_gold_jsonl(corpus));
  write_file(dir / "rules.toml",
             "required_any = [\"原発\", \"原子力\"]\n"
             "excluded_any = [\"北朝鮮\", \"ロシア\"]\n");

  PipelineConfig config;
  config.videos = "videos.jsonl";
  config.comments = "comments.jsonl";
  config.lexicon = "lexicon.tsv";
  config.output_dir = "out";
  config.rules_file = "rules.toml";
  config.lda.topics = 2;
  config.lda.iterations = 500;
  config.lda.burn_in = 100;
  config.lda.seed = options.seed;
  config.sweep_k_min = 2;
  config.sweep_k_max = 20;
  config.node_min_freq = 2;
  write_file(dir / "config.toml", serialize_config(config));
}

}  // namespace opinion
