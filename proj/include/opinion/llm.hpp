// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors

#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "opinion/common.hpp"
#include "opinion/hash.hpp"
#include "opinion/sentiment.hpp"
#include "opinion/unicode.hpp"

namespace opinion {

enum class PromptMode : uint8_t { ZeroShot, FewShot };

inline const char* prompt_mode_name(PromptMode m) {
  return m == PromptMode::ZeroShot ? "zero_shot" : "few_shot";
}

// Japanese class labels the model is instructed to answer with.
inline constexpr std::string_view kLabelPositiveJa = "ポジティブ";
inline constexpr std::string_view kLabelNeutralJa = "中立・判断不可能";
inline constexpr std::string_view kLabelNegativeJa = "ネガティブ";

/// Zero-shot system instruction, byte-for-byte fixed: downstream caching and
/// the stored template hash depend on it never changing.
inline constexpr std::string_view kZeroShotSystemPrompt =
    "次に提供されるYouTubeのコメントの全体的な感情を分類してください。"
    "感情の分類は、以下の3つの選択肢から1つを選んでください："
    "ポジティブ、中立・判断不可能、ネガティブ。選択肢のみを出力してください。";

struct FewShotExample {
  std::string text;
  SentimentLabel label = SentimentLabel::Neutral;
};

/// Six defaults, two per class. The first positive example is the published
/// one; the rest are replaceable configuration data.
inline std::vector<FewShotExample> default_few_shot_examples() {
  return {
      {"しっかり勉強するのは良い事です自分を学び治す為にも", SentimentLabel::Positive},
      {"処理水の説明が分かりやすかった。安心しました", SentimentLabel::Positive},
      {"この動画は何分から本題ですか？", SentimentLabel::Neutral},
      {"ニュースで見たのと同じ内容ですね", SentimentLabel::Neutral},
      {"政府の対応は遅すぎる。全く信用できない", SentimentLabel::Negative},
      {"また同じことの繰り返しで呆れる", SentimentLabel::Negative},
  };
}

inline std::string_view label_name_ja(SentimentLabel l) {
  switch (l) {
    case SentimentLabel::Positive: return kLabelPositiveJa;
    case SentimentLabel::Neutral: return kLabelNeutralJa;
    case SentimentLabel::Negative: return kLabelNegativeJa;
  }
  return kLabelNeutralJa;
}

inline void validate_few_shot_examples(const std::vector<FewShotExample>& examples) {
  if (examples.size() != 6)
    throw ConfigError("few-shot prompt requires exactly six examples");
  std::array<int, 3> per_class{};
  for (const auto& e : examples) ++per_class[static_cast<size_t>(e.label)];
  if (per_class[0] != 2 || per_class[1] != 2 || per_class[2] != 2)
    throw ConfigError("few-shot prompt requires exactly two examples per sentiment class");
}

struct Prompt {
  std::string system_text;
  std::string user_text;
};

/// Zero-shot emits the fixed template; few-shot appends the six configured
/// examples in order. The user turn carries only the comment.
inline Prompt build_prompt(std::string_view comment, PromptMode mode,
                           const std::vector<FewShotExample>& examples = default_few_shot_examples()) {
  Prompt p;
  p.user_text = std::string(comment);
  p.system_text = std::string(kZeroShotSystemPrompt);
  if (mode == PromptMode::FewShot) {
    validate_few_shot_examples(examples);
    p.system_text += "\n\n例:";
    for (const auto& e : examples) {
      p.system_text += "\n\nコメント: ";
      p.system_text += e.text;
      p.system_text += '\n';
      p.system_text += label_name_ja(e.label);
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Response parsing

namespace detail {

inline const std::vector<CodePoint>& response_trim_set() {
  // Whitespace plus sentence punctuation; deliberately excludes '・', which
  // is interior to the neutral label.
  static const std::vector<CodePoint> set = {
      U' ',    U'\t',   U'\n',  U'\r',  0x3000, U'。', U'、', U'．', U'，', U'!',
      U'！',   U'?',    U'？',  U'.',   U',',   U':',  U'：', U';',  U'；', U'"',
      U'\'',   U'「',   U'」',  U'『',  U'』',  U'(',  U')',  U'（', U'）', U'…',
  };
  return set;
}

inline std::string trim_response(std::string_view text) {
  std::vector<CodePoint> cps = utf8_decode(text);
  const auto& trim = response_trim_set();
  auto is_trim = [&](CodePoint c) {
    for (CodePoint t : trim)
      if (t == c) return true;
    return false;
  };
  size_t begin = 0, end = cps.size();
  while (begin < end && is_trim(cps[begin])) ++begin;
  while (end > begin && is_trim(cps[end - 1])) --end;
  return utf8_encode(std::vector<CodePoint>(cps.begin() + static_cast<ptrdiff_t>(begin),
                                            cps.begin() + static_cast<ptrdiff_t>(end)));
}

}  // namespace detail

/// Exact match against the three Japanese labels after trimming whitespace
/// and edge punctuation, plus any configured aliases. No fuzzy matching.
inline SentimentLabel parse_llm_response(
    std::string_view text, const std::map<std::string, SentimentLabel>& aliases = {}) {
  std::string trimmed = detail::trim_response(text);
  if (trimmed == kLabelPositiveJa) return SentimentLabel::Positive;
  if (trimmed == kLabelNeutralJa) return SentimentLabel::Neutral;
  if (trimmed == kLabelNegativeJa) return SentimentLabel::Negative;
  if (auto it = aliases.find(trimmed); it != aliases.end()) return it->second;
  throw ParseError("LLM response is not a sentiment label", std::string(text));
}

// ---------------------------------------------------------------------------
// Chat-completion client

struct LlmBackendConfig {
  std::string endpoint = "http://127.0.0.1:8080";  // scheme://host[:port][/prefix]
  std::string model = "gpt-4o-2024-08-06";
  PromptMode prompt_mode = PromptMode::FewShot;
  double temperature = 0.0;  // must remain exactly 0
  int64_t seed = 42;
  int max_in_flight = 4;
  std::filesystem::path cache_dir;  // empty disables caching
  std::string api_key;
  std::vector<FewShotExample> examples = default_few_shot_examples();
  std::map<std::string, SentimentLabel> aliases;
  int max_attempts = 3;
  int backoff_initial_ms = 200;
  int timeout_s = 60;

  void validate() const {
    if (temperature != 0.0) throw ConfigError("llm: temperature must be exactly 0");
    if (max_in_flight < 1) throw ConfigError("llm: max_in_flight must be >= 1");
    if (max_attempts < 1) throw ConfigError("llm: max_attempts must be >= 1");
    if (prompt_mode == PromptMode::FewShot) validate_few_shot_examples(examples);
  }
};

struct FailedClassification {
  std::string comment_id;
  std::string reason;
};

struct LlmClassifyResult {
  std::vector<LabeledComment> labeled;  // input order, failures excluded
  std::vector<FailedClassification> failed;
  size_t http_requests = 0;
  size_t cache_hits = 0;
  size_t empty_comments = 0;
};

namespace detail {

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path_prefix;
};

inline ParsedUrl parse_endpoint(const std::string& endpoint) {
  size_t scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("llm: endpoint must start with http:// or https://");
  size_t path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {endpoint, ""};
  std::string prefix = endpoint.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {endpoint.substr(0, path_start), prefix};
}

inline std::string llm_cache_key(const LlmBackendConfig& config, const Prompt& prompt,
                                 std::string_view comment) {
  std::string material = config.model;
  material += '\n';
  material += prompt_mode_name(config.prompt_mode);
  material += '\n';
  material += sha256_hex(prompt.system_text);
  material += '\n';
  material += sha256_hex(comment);
  return sha256_hex(material);
}

}  // namespace detail

/// Classifies comments through a chat-completion endpoint with temperature 0
/// and a fixed seed. Responses are cached on disk by (model, prompt mode,
/// template, comment); warm reruns issue no HTTP requests. Output order
/// equals input order regardless of completion order.
inline LlmClassifyResult llm_classify(const std::vector<std::pair<std::string, std::string>>& comments,
                                      const LlmBackendConfig& config) {
  config.validate();
  detail::ParsedUrl url = detail::parse_endpoint(config.endpoint);
  const std::string completions_path = url.path_prefix + "/v1/chat/completions";

  struct Slot {
    bool done = false;
    bool failed = false;
    bool empty = false;
    std::string reason;
    SentimentLabel label = SentimentLabel::Neutral;
  };
  std::vector<Slot> slots(comments.size());
  std::atomic<size_t> http_requests{0};
  std::atomic<size_t> cache_hits{0};
  std::atomic<size_t> next{0};
  std::mutex cache_mutex;

  if (!config.cache_dir.empty()) std::filesystem::create_directories(config.cache_dir);

  auto classify_one = [&](size_t i, httplib::Client& client) {
    const auto& [comment_id, text] = comments[i];
    Slot& slot = slots[i];
    slot.done = true;
    if (text.empty()) {
      slot.empty = true;
      slot.label = SentimentLabel::Neutral;
      return;
    }
    Prompt prompt = build_prompt(text, config.prompt_mode, config.examples);

    std::filesystem::path cache_file;
    if (!config.cache_dir.empty()) {
      cache_file = config.cache_dir / (detail::llm_cache_key(config, prompt, text) + ".json");
      std::error_code ec;
      if (std::filesystem::exists(cache_file, ec)) {
        try {
          nlohmann::json cached = nlohmann::json::parse(read_file(cache_file));
          slot.label = parse_llm_response(cached.at("content").get<std::string>(), config.aliases);
          cache_hits.fetch_add(1);
          return;
        } catch (const std::exception& e) {
          warn("llm cache entry unreadable (%s); refetching", e.what());
        }
      }
    }

    nlohmann::json request = {
        {"model", config.model},
        {"temperature", config.temperature},
        {"seed", config.seed},
        {"messages",
         {{{"role", "system"}, {"content", prompt.system_text}},
          {{"role", "user"}, {"content", prompt.user_text}}}}};
    const std::string body = request.dump();

    std::string content;
    bool got_response = false;
    for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(config.backoff_initial_ms << (attempt - 1)));
      }
      http_requests.fetch_add(1);
      httplib::Headers headers;
      if (!config.api_key.empty()) headers.emplace("Authorization", "Bearer " + config.api_key);
      auto res = client.Post(completions_path, headers, body, "application/json");
      if (!res) {
        slot.reason = "connection error";
        continue;
      }
      if (res->status != 200) {
        slot.reason = "HTTP " + std::to_string(res->status);
        continue;
      }
      nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
      if (j.is_discarded() || !j.contains("choices") || j["choices"].empty()) {
        slot.reason = "malformed completion payload";
        continue;
      }
      try {
        content = j["choices"][0].at("message").at("content").get<std::string>();
        got_response = true;
        break;
      } catch (const std::exception&) {
        slot.reason = "completion missing message content";
      }
    }
    if (!got_response) {
      slot.failed = true;
      return;
    }
    try {
      slot.label = parse_llm_response(content, config.aliases);
    } catch (const ParseError& e) {
      slot.failed = true;
      slot.reason = std::string("unparseable label: ") + e.raw();
      return;
    }
    if (!cache_file.empty()) {
      nlohmann::json cached = {{"content", content}};
      std::scoped_lock lock(cache_mutex);
      write_file_atomic(cache_file, cached.dump());
    }
  };

  auto worker = [&]() {
    httplib::Client client(url.base);
    client.set_connection_timeout(config.timeout_s, 0);
    client.set_read_timeout(config.timeout_s, 0);
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= comments.size()) return;
      classify_one(i, client);
    }
  };

  size_t nthreads = std::min<size_t>(static_cast<size_t>(config.max_in_flight), comments.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  LlmClassifyResult result;
  result.http_requests = http_requests.load();
  result.cache_hits = cache_hits.load();
  for (size_t i = 0; i < comments.size(); ++i) {
    const Slot& slot = slots[i];
    if (slot.failed) {
      result.failed.push_back({comments[i].first, slot.reason});
      warn("llm classification failed for %s: %s", comments[i].first.c_str(),
           slot.reason.c_str());
      continue;
    }
    LabeledComment lc;
    lc.comment_id = comments[i].first;
    lc.label = slot.label;
    lc.method = LabelMethod::Llm;
    lc.model_tag = config.model;
    if (slot.empty) {
      lc.flag = "empty";
      ++result.empty_comments;
    }
    result.labeled.push_back(std::move(lc));
  }
  return result;
}

}  // namespace opinion
