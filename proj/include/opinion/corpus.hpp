// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "opinion/common.hpp"
#include "opinion/timeutil.hpp"
#include "opinion/unicode.hpp"

namespace opinion {

struct VideoDoc {
  std::string video_id;
  std::string channel;
  std::string title;
  std::string description;
  std::string transcript;  // may be empty
  int64_t published_at = 0;

  bool operator==(const VideoDoc&) const = default;

  /// The per-video text unit used for topic modeling: title, description
  /// and subtitles together.
  std::string corpus_text() const {
    std::string out = title;
    if (!description.empty()) {
      if (!out.empty()) out += '\n';
      out += description;
    }
    if (!transcript.empty()) {
      if (!out.empty()) out += '\n';
      out += transcript;
    }
    return out;
  }
};

struct Comment {
  std::string comment_id;
  std::string video_id;
  std::string text;
  int64_t published_at = 0;
  bool orphaned = false;  // video_id not present in the loaded video set

  bool operator==(const Comment&) const = default;
};

struct FilterRules {
  std::vector<std::string> required_any;  // match in title or description
  std::vector<std::string> excluded_any;  // match anywhere in title or description
};

// ---------------------------------------------------------------------------
// Text cleaning

namespace detail {

inline bool imatch_at(std::string_view s, size_t i, std::string_view lower_pattern) {
  if (i + lower_pattern.size() > s.size()) return false;
  for (size_t k = 0; k < lower_pattern.size(); ++k) {
    char c = s[i + k];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != lower_pattern[k]) return false;
  }
  return true;
}

inline bool starts_with_url(std::string_view s, size_t i) {
  return imatch_at(s, i, "http://") || imatch_at(s, i, "https://");
}

}  // namespace detail

/// Removes URLs and hashtags (each with its attached word), NFKC-normalizes,
/// and collapses whitespace. Total and idempotent.
inline std::string clean_text(std::string_view raw) {
  if (raw.empty()) return {};
  std::string text = nfkc(raw);

  // Strip http(s)://... up to the next whitespace.
  std::string no_urls;
  no_urls.reserve(text.size());
  {
    size_t i = 0;
    while (i < text.size()) {
      if ((text[i] == 'h' || text[i] == 'H') && detail::starts_with_url(text, i)) {
        size_t j = i;
        while (j < text.size()) {
          size_t k = j;
          CodePoint cp = utf8_next(text, k);
          if (is_space(cp)) break;
          j = k;
        }
        i = j;
        continue;
      }
      no_urls += text[i++];
    }
  }

  // Strip tokens beginning with # or ＃ together with the attached word.
  // NFKC has already turned ＃ into #, but accept both for raw callers.
  std::string no_tags;
  no_tags.reserve(no_urls.size());
  {
    size_t i = 0;
    bool at_token_start = true;
    while (i < no_urls.size()) {
      size_t k = i;
      CodePoint cp = utf8_next(no_urls, k);
      if (at_token_start && (cp == U'#' || cp == 0xFF03)) {
        size_t j = k;
        while (j < no_urls.size()) {
          size_t k2 = j;
          CodePoint c2 = utf8_next(no_urls, k2);
          if (is_space(c2)) break;
          j = k2;
        }
        i = j;
        at_token_start = true;
        continue;
      }
      at_token_start = is_space(cp);
      no_tags.append(no_urls, i, k - i);
      i = k;
    }
  }

  // Collapse whitespace runs to a single space and trim.
  std::string out;
  out.reserve(no_tags.size());
  {
    size_t i = 0;
    bool pending_space = false;
    while (i < no_tags.size()) {
      size_t k = i;
      CodePoint cp = utf8_next(no_tags, k);
      if (is_space(cp)) {
        pending_space = !out.empty();
      } else {
        if (pending_space) out += ' ';
        pending_space = false;
        out.append(no_tags, i, k - i);
      }
      i = k;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSONL loading / saving

template <typename T>
struct LoadResult {
  std::vector<T> records;
  size_t skipped = 0;
};

namespace detail {

inline std::optional<std::string> json_string_field(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

template <typename T, typename ParseFn>
LoadResult<T> load_jsonl(const std::filesystem::path& path, const char* what, ParseFn parse) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(std::string("cannot open ") + what + " file: " + path.string());
  LoadResult<T> result;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      warn("%s:%zu: blank line skipped", path.string().c_str(), line_no);
      ++result.skipped;
      continue;
    }
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      warn("%s:%zu: malformed JSON skipped", path.string().c_str(), line_no);
      ++result.skipped;
      continue;
    }
    std::optional<T> rec = parse(j);
    if (!rec) {
      warn("%s:%zu: missing or invalid required field, line skipped", path.string().c_str(),
           line_no);
      ++result.skipped;
      continue;
    }
    result.records.push_back(std::move(*rec));
  }
  if (in.bad()) throw IoError(std::string("error while reading ") + path.string());
  return result;
}

}  // namespace detail

inline std::optional<VideoDoc> video_from_json(const nlohmann::json& j) {
  VideoDoc v;
  auto id = detail::json_string_field(j, "video_id");
  auto channel = detail::json_string_field(j, "channel");
  auto title = detail::json_string_field(j, "title");
  auto description = detail::json_string_field(j, "description");
  auto published = detail::json_string_field(j, "published_at");
  if (!id || id->empty() || !channel || !title || !description || !published) return std::nullopt;
  auto ts = parse_utc(*published);
  if (!ts) return std::nullopt;
  v.video_id = *id;
  v.channel = *channel;
  v.title = *title;
  v.description = *description;
  v.transcript = detail::json_string_field(j, "transcript").value_or("");
  v.published_at = *ts;
  return v;
}

inline nlohmann::json video_to_json(const VideoDoc& v) {
  return {{"video_id", v.video_id},       {"channel", v.channel},
          {"title", v.title},             {"description", v.description},
          {"transcript", v.transcript},   {"published_at", format_utc(v.published_at)}};
}

inline std::optional<Comment> comment_from_json(const nlohmann::json& j) {
  Comment c;
  auto id = detail::json_string_field(j, "comment_id");
  auto vid = detail::json_string_field(j, "video_id");
  auto text = detail::json_string_field(j, "text");
  auto published = detail::json_string_field(j, "published_at");
  if (!id || id->empty() || !vid || !text || !published) return std::nullopt;
  auto ts = parse_utc(*published);
  if (!ts) return std::nullopt;
  c.comment_id = *id;
  c.video_id = *vid;
  c.text = *text;
  c.published_at = *ts;
  return c;
}

inline nlohmann::json comment_to_json(const Comment& c) {
  nlohmann::json j = {{"comment_id", c.comment_id},
                      {"video_id", c.video_id},
                      {"text", c.text},
                      {"published_at", format_utc(c.published_at)}};
  if (c.orphaned) j["orphaned"] = true;
  return j;
}

inline LoadResult<VideoDoc> load_videos(const std::filesystem::path& path) {
  return detail::load_jsonl<VideoDoc>(path, "videos", video_from_json);
}

inline LoadResult<Comment> load_comments(const std::filesystem::path& path) {
  auto result = detail::load_jsonl<Comment>(path, "comments", comment_from_json);
  std::unordered_set<std::string> seen;
  for (const auto& c : result.records) {
    if (!seen.insert(c.comment_id).second) warn("duplicate comment_id: %s", c.comment_id.c_str());
  }
  return result;
}

inline void save_videos(const std::filesystem::path& path, const std::vector<VideoDoc>& videos) {
  std::string out;
  for (const auto& v : videos) {
    out += video_to_json(v).dump();
    out += '\n';
  }
  write_file(path, out);
}

inline void save_comments(const std::filesystem::path& path, const std::vector<Comment>& comments) {
  std::string out;
  for (const auto& c : comments) {
    out += comment_to_json(c).dump();
    out += '\n';
  }
  write_file(path, out);
}

/// Flags comments whose video_id is not in `videos`. Orphans are kept, not
/// dropped; sentiment aggregation that needs the video join skips them.
inline size_t link_comments(const std::vector<VideoDoc>& videos, std::vector<Comment>& comments) {
  std::unordered_set<std::string_view> ids;
  ids.reserve(videos.size());
  for (const auto& v : videos) ids.insert(v.video_id);
  size_t orphans = 0;
  for (auto& c : comments) {
    c.orphaned = !ids.contains(c.video_id);
    if (c.orphaned) ++orphans;
  }
  return orphans;
}

// ---------------------------------------------------------------------------
// Rule-based video filter

struct DropRecord {
  std::string video_id;
  std::string reason;  // "missing-required" or "excluded-keyword:<kw>"
};

struct VideoFilterResult {
  std::vector<VideoDoc> kept;
  std::vector<DropRecord> dropped;
};

/// Keeps a video iff some required keyword occurs in title or description
/// and no excluded keyword does. Matching is substring over NFKC-normalized
/// text, case-insensitive for Latin letters.
inline VideoFilterResult filter_videos(const std::vector<VideoDoc>& videos,
                                       const FilterRules& rules) {
  if (rules.required_any.empty())
    throw ConfigError("filter rules: required_any must not be empty");
  std::vector<std::string> required, excluded;
  for (const auto& k : rules.required_any) required.push_back(fold_latin(nfkc(k)));
  for (const auto& k : rules.excluded_any) excluded.push_back(fold_latin(nfkc(k)));

  VideoFilterResult result;
  for (const auto& v : videos) {
    std::string haystack = fold_latin(nfkc(v.title + "\n" + v.description));
    bool has_required = std::any_of(required.begin(), required.end(), [&](const std::string& k) {
      return haystack.find(k) != std::string::npos;
    });
    if (!has_required) {
      result.dropped.push_back({v.video_id, "missing-required"});
      continue;
    }
    const std::string* hit = nullptr;
    for (size_t i = 0; i < excluded.size(); ++i) {
      if (haystack.find(excluded[i]) != std::string::npos) {
        hit = &rules.excluded_any[i];
        break;
      }
    }
    if (hit) {
      result.dropped.push_back({v.video_id, "excluded-keyword:" + *hit});
      continue;
    }
    result.kept.push_back(v);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Language filter

enum class LanguageClass { Japanese, NotJapanese };

class LanguageClassifier {
public:
  virtual ~LanguageClassifier() = default;
  virtual LanguageClass classify(std::string_view text) const = 0;
};

/// Default stand-in for the paper's fine-tuned language-ID model: Japanese
/// iff the fraction of kana/CJK letters among all letters is >= threshold.
/// Texts with no letters at all are kept (nothing to decide on).
class ScriptRatioClassifier : public LanguageClassifier {
public:
  explicit ScriptRatioClassifier(double threshold = 0.3) : threshold_(threshold) {}

  LanguageClass classify(std::string_view text) const override {
    size_t letters = 0, japanese = 0;
    size_t i = 0;
    while (i < text.size()) {
      CodePoint cp = utf8_next(text, i);
      if (is_letter(cp)) {
        ++letters;
        if (is_japanese_letter(cp)) ++japanese;
      }
    }
    if (letters == 0) return LanguageClass::Japanese;
    double ratio = static_cast<double>(japanese) / static_cast<double>(letters);
    return ratio >= threshold_ ? LanguageClass::Japanese : LanguageClass::NotJapanese;
  }

private:
  double threshold_;
};

struct LanguageFilterResult {
  std::vector<Comment> kept;
  std::vector<Comment> removed;
  size_t classifier_failures = 0;  // kept conservatively and flagged
};

inline LanguageFilterResult filter_language(const std::vector<Comment>& comments,
                                            const LanguageClassifier& classifier) {
  LanguageFilterResult result;
  for (const auto& c : comments) {
    LanguageClass cls;
    try {
      cls = classifier.classify(c.text);
    } catch (const std::exception& e) {
      warn("language classifier failed on %s (%s); comment kept", c.comment_id.c_str(), e.what());
      ++result.classifier_failures;
      result.kept.push_back(c);
      continue;
    }
    if (cls == LanguageClass::Japanese)
      result.kept.push_back(c);
    else
      result.removed.push_back(c);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Filter rules file (TOML or JSON)

inline FilterRules load_filter_rules(const std::filesystem::path& path);

}  // namespace opinion

#include "opinion/toml.hpp"

namespace opinion {

inline FilterRules load_filter_rules(const std::filesystem::path& path) {
  std::string text = read_file(path);
  FilterRules rules;
  size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("rules file is not valid JSON: " + path.string());
    for (const auto& k : j.value("required_any", nlohmann::json::array()))
      rules.required_any.push_back(k.get<std::string>());
    for (const auto& k : j.value("excluded_any", nlohmann::json::array()))
      rules.excluded_any.push_back(k.get<std::string>());
  } else {
    auto table = toml::parse(text);
    rules.required_any =
        toml::get_or<std::vector<std::string>>(table, "required_any", {});
    rules.excluded_any =
        toml::get_or<std::vector<std::string>>(table, "excluded_any", {});
    if (rules.required_any.empty())
      rules.required_any = toml::get_or<std::vector<std::string>>(table, "filter.required_any", {});
    if (rules.excluded_any.empty())
      rules.excluded_any = toml::get_or<std::vector<std::string>>(table, "filter.excluded_any", {});
  }
  if (rules.required_any.empty())
    throw ConfigError("rules file must define a nonempty required_any: " + path.string());
  return rules;
}

}  // namespace opinion
