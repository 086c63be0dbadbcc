// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "opinion/common.hpp"
#include "opinion/csv.hpp"
#include "opinion/unicode.hpp"

namespace opinion {

enum class SentimentLabel : uint8_t { Positive = 0, Neutral = 1, Negative = 2 };

inline constexpr std::array<SentimentLabel, 3> kAllLabels = {
    SentimentLabel::Positive, SentimentLabel::Neutral, SentimentLabel::Negative};

inline const char* label_name(SentimentLabel l) {
  switch (l) {
    case SentimentLabel::Positive: return "positive";
    case SentimentLabel::Neutral: return "neutral";
    case SentimentLabel::Negative: return "negative";
  }
  return "neutral";
}

inline std::optional<SentimentLabel> label_from_name(std::string_view name) {
  if (name == "positive") return SentimentLabel::Positive;
  if (name == "neutral") return SentimentLabel::Neutral;
  if (name == "negative") return SentimentLabel::Negative;
  return std::nullopt;
}

enum class LabelMethod : uint8_t { Lexicon, Llm };

inline const char* method_name(LabelMethod m) { return m == LabelMethod::Lexicon ? "lexicon" : "llm"; }

struct LabeledComment {
  std::string comment_id;
  SentimentLabel label = SentimentLabel::Neutral;
  std::optional<double> score;  // lexicon path only; absent when unscored
  LabelMethod method = LabelMethod::Lexicon;
  std::string model_tag;
  std::string flag;  // "", "empty", "unscored"
};

// ---------------------------------------------------------------------------
// Polarity lexicon

class PolarityLexicon {
public:
  /// Adds one entry. Conflicting polarities for a term drop the term
  /// entirely; the conflict is recorded and logged.
  void add(std::string_view term, int polarity, std::string_view source) {
    if (polarity != 1 && polarity != -1)
      throw ConfigError("lexicon polarity must be +1 or -1 for term: " + std::string(term));
    std::string key = nfkc(term);
    if (key.empty()) return;
    if (dropped_.contains(key)) return;
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      if (it->second.polarity != polarity) {
        warn("lexicon conflict for '%s' (%s vs %s); term dropped", key.c_str(),
             it->second.source.c_str(), std::string(source).c_str());
        conflicts_.push_back(key);
        dropped_.insert(key);
        entries_.erase(it);
      }
      return;
    }
    entries_[key] = {polarity, std::string(source)};
  }

  /// TSV: term<TAB>polarity, polarity in {+1, 1, -1}. '#' lines are comments.
  void load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open lexicon: " + path.string());
    std::string source = path.filename().string();
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      size_t tab = line.find('\t');
      if (tab == std::string::npos) {
        warn("%s:%zu: missing tab, line skipped", path.string().c_str(), line_no);
        continue;
      }
      std::string term = line.substr(0, tab);
      std::string pol = line.substr(tab + 1);
      int p = 0;
      if (pol == "1" || pol == "+1")
        p = 1;
      else if (pol == "-1")
        p = -1;
      else {
        warn("%s:%zu: polarity must be +1 or -1, line skipped", path.string().c_str(), line_no);
        continue;
      }
      add(term, p, source);
    }
  }

  std::optional<int> polarity(const std::string& normalized_term) const {
    auto it = entries_.find(normalized_term);
    if (it == entries_.end()) return std::nullopt;
    return it->second.polarity;
  }

  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<std::string>& conflicts() const { return conflicts_; }

private:
  struct Entry {
    int polarity;
    std::string source;
  };
  std::unordered_map<std::string, Entry> entries_;
  std::unordered_set<std::string> dropped_;
  std::vector<std::string> conflicts_;
};

// ---------------------------------------------------------------------------
// Lexicon scoring

struct LexiconScore {
  std::optional<double> score;  // nullopt = no sentiment-bearing token
  int64_t pos_count = 0;
  int64_t neg_count = 0;
};

/// (# positive - # negative) / (# positive + # negative); unscored when the
/// comment carries no sentiment-bearing token.
inline LexiconScore lexicon_score(const std::vector<std::string>& normalized_tokens,
                                  const PolarityLexicon& lexicon) {
  LexiconScore result;
  for (const auto& tok : normalized_tokens) {
    if (auto p = lexicon.polarity(tok)) {
      if (*p > 0)
        ++result.pos_count;
      else
        ++result.neg_count;
    }
  }
  int64_t hits = result.pos_count + result.neg_count;
  if (hits > 0)
    result.score = static_cast<double>(result.pos_count - result.neg_count) /
                   static_cast<double>(hits);
  return result;
}

/// Neutral iff -0.33 <= score <= 0.33 (inclusive) or unscored. Note that
/// 1/3 lies strictly above the 0.33 boundary and maps to positive.
inline SentimentLabel classify_from_score(std::optional<double> score) {
  if (!score) return SentimentLabel::Neutral;
  if (*score > 0.33) return SentimentLabel::Positive;
  if (*score < -0.33) return SentimentLabel::Negative;
  return SentimentLabel::Neutral;
}

// ---------------------------------------------------------------------------
// Evaluation

/// Rows = gold, columns = predicted; label order positive, neutral, negative.
struct ConfusionMatrix {
  std::array<std::array<int64_t, 3>, 3> m{};

  void add(SentimentLabel gold, SentimentLabel pred, int64_t n = 1) {
    m[static_cast<size_t>(gold)][static_cast<size_t>(pred)] += n;
  }
  int64_t total() const {
    int64_t t = 0;
    for (const auto& row : m)
      for (int64_t v : row) t += v;
    return t;
  }
  int64_t trace() const { return m[0][0] + m[1][1] + m[2][2]; }
  int64_t row_sum(size_t c) const { return m[c][0] + m[c][1] + m[c][2]; }
  int64_t col_sum(size_t c) const { return m[0][c] + m[1][c] + m[2][c]; }
};

struct EvalMetrics {
  double accuracy = 0.0;
  double precision = 0.0;  // weighted
  double recall = 0.0;     // weighted
  double f1 = 0.0;         // weighted
  std::array<double, 3> class_precision{};
  std::array<double, 3> class_recall{};
  std::array<double, 3> class_f1{};
};

/// Weighted metrics over the 3-way matrix; empty denominators contribute 0
/// (the usual convention for classes with no predictions or no support).
inline EvalMetrics compute_metrics(const ConfusionMatrix& cm) {
  EvalMetrics out;
  const double total = static_cast<double>(cm.total());
  if (total == 0.0) throw ConfigError("evaluate: empty confusion matrix");
  out.accuracy = static_cast<double>(cm.trace()) / total;
  for (size_t c = 0; c < 3; ++c) {
    const double tp = static_cast<double>(cm.m[c][c]);
    const double col = static_cast<double>(cm.col_sum(c));
    const double row = static_cast<double>(cm.row_sum(c));
    const double p = col > 0 ? tp / col : 0.0;
    const double r = row > 0 ? tp / row : 0.0;
    const double f = (p + r) > 0 ? 2 * p * r / (p + r) : 0.0;
    out.class_precision[c] = p;
    out.class_recall[c] = r;
    out.class_f1[c] = f;
    const double weight = row / total;
    out.precision += weight * p;
    out.recall += weight * r;
    out.f1 += weight * f;
  }
  return out;
}

/// Joins predictions with gold by comment id; any id mismatch is fatal.
inline std::pair<ConfusionMatrix, EvalMetrics> evaluate(
    const std::map<std::string, SentimentLabel>& predictions,
    const std::map<std::string, SentimentLabel>& gold) {
  if (predictions.size() != gold.size())
    throw ConfigError("evaluate: prediction and gold id sets differ in size");
  ConfusionMatrix cm;
  auto pit = predictions.begin();
  auto git = gold.begin();
  for (; git != gold.end(); ++git, ++pit) {
    if (pit->first != git->first)
      throw ConfigError("evaluate: id mismatch between predictions and gold: " + pit->first +
                        " vs " + git->first);
    cm.add(git->second, pit->second);
  }
  return {cm, compute_metrics(cm)};
}

// ---------------------------------------------------------------------------
// Artifact formats

inline nlohmann::json labeled_comment_to_json(const LabeledComment& c) {
  nlohmann::json j = {{"comment_id", c.comment_id},
                      {"label", label_name(c.label)},
                      {"method", method_name(c.method)}};
  if (c.score) j["score"] = *c.score;
  if (!c.model_tag.empty()) j["model"] = c.model_tag;
  if (!c.flag.empty()) j["flag"] = c.flag;
  return j;
}

inline std::string labels_to_jsonl(const std::vector<LabeledComment>& labels) {
  std::string out;
  for (const auto& l : labels) {
    out += labeled_comment_to_json(l).dump();
    out += '\n';
  }
  return out;
}

inline std::vector<LabeledComment> labels_from_jsonl(const std::string& text) {
  std::vector<LabeledComment> out;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw ParseError("malformed labels.jsonl line " + std::to_string(line_no), line);
    LabeledComment c;
    c.comment_id = j.at("comment_id").get<std::string>();
    auto label = label_from_name(j.at("label").get<std::string>());
    if (!label) throw ParseError("unknown label in labels.jsonl", line);
    c.label = *label;
    c.method = j.value("method", "lexicon") == "llm" ? LabelMethod::Llm : LabelMethod::Lexicon;
    if (j.contains("score")) c.score = j["score"].get<double>();
    c.model_tag = j.value("model", "");
    c.flag = j.value("flag", "");
    out.push_back(std::move(c));
  }
  return out;
}

/// benchmark.csv rows in the familiar method/accuracy/precision/recall/f1
/// layout, all weighted.
inline std::string benchmark_to_csv(
    const std::vector<std::pair<std::string, EvalMetrics>>& rows) {
  CsvWriter csv;
  csv.row({"method", "accuracy", "precision", "recall", "f1"});
  for (const auto& [method, m] : rows)
    csv.row({method, format_double(m.accuracy, "%.4f"), format_double(m.precision, "%.4f"),
             format_double(m.recall, "%.4f"), format_double(m.f1, "%.4f")});
  return csv.str();
}

inline std::string confusion_to_csv(const ConfusionMatrix& cm) {
  CsvWriter csv;
  csv.row({"gold\\pred", "positive", "neutral", "negative"});
  for (size_t g = 0; g < 3; ++g)
    csv.row({label_name(static_cast<SentimentLabel>(g)), std::to_string(cm.m[g][0]),
             std::to_string(cm.m[g][1]), std::to_string(cm.m[g][2])});
  return csv.str();
}

}  // namespace opinion
