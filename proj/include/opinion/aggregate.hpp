// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opinion/common.hpp"
#include "opinion/csv.hpp"
#include "opinion/sentiment.hpp"
#include "opinion/timeutil.hpp"

namespace opinion {

struct TimedLabel {
  std::string comment_id;
  SentimentLabel label = SentimentLabel::Neutral;
  int64_t published_at = 0;
};

struct MonthBucket {
  int64_t n_pos = 0;
  int64_t n_neu = 0;
  int64_t n_neg = 0;
  std::optional<double> score;  // null for empty months, never 0

  int64_t total() const { return n_pos + n_neu + n_neg; }
};

struct MonthlySeries {
  std::map<YearMonth, MonthBucket> buckets;  // contiguous months, gaps included
};

/// Buckets by UTC calendar month with positive/neutral/negative scored
/// +1/0/-1, normalized by the month's comment count. Comments before
/// date_floor are excluded. Months between the first and last populated
/// bucket are emitted explicitly with a null score.
inline MonthlySeries monthly_scores(const std::vector<TimedLabel>& items, int64_t date_floor) {
  MonthlySeries series;
  for (const auto& item : items) {
    if (item.published_at < date_floor) continue;
    MonthBucket& b = series.buckets[year_month_of(item.published_at)];
    switch (item.label) {
      case SentimentLabel::Positive: ++b.n_pos; break;
      case SentimentLabel::Neutral: ++b.n_neu; break;
      case SentimentLabel::Negative: ++b.n_neg; break;
    }
  }
  if (!series.buckets.empty()) {
    // Fill calendar gaps so zero-comment months are visible as nulls.
    YearMonth first = series.buckets.begin()->first;
    YearMonth last = series.buckets.rbegin()->first;
    for (YearMonth ym = first; ym < last; ym = ym.next()) series.buckets.try_emplace(ym);
  }
  for (auto& [ym, b] : series.buckets) {
    if (b.total() > 0)
      b.score = static_cast<double>(b.n_pos - b.n_neg) / static_cast<double>(b.total());
  }
  return series;
}

inline std::string monthly_to_csv(const MonthlySeries& series) {
  CsvWriter csv;
  csv.row({"month", "n_pos", "n_neu", "n_neg", "score"});
  for (const auto& [ym, b] : series.buckets) {
    csv.row({ym.str(), std::to_string(b.n_pos), std::to_string(b.n_neu), std::to_string(b.n_neg),
             b.score ? format_double(*b.score) : ""});
  }
  return csv.str();
}

// ---------------------------------------------------------------------------
// Per-topic sentiment shares

struct TopicShares {
  int64_t n_pos = 0;
  int64_t n_neu = 0;
  int64_t n_neg = 0;

  int64_t total() const { return n_pos + n_neu + n_neg; }
  std::optional<double> share_pos() const { return share(n_pos); }
  std::optional<double> share_neu() const { return share(n_neu); }
  std::optional<double> share_neg() const { return share(n_neg); }

private:
  std::optional<double> share(int64_t n) const {
    if (total() == 0) return std::nullopt;
    return static_cast<double>(n) / static_cast<double>(total());
  }
};

struct TopicSentimentTable {
  std::map<int32_t, TopicShares> topics;  // every topic id 0..K-1 has a row
  int64_t unassigned = 0;                 // comments without a main topic
};

struct TopicLabel {
  SentimentLabel label = SentimentLabel::Neutral;
  std::optional<int32_t> topic;  // main topic of the comment's video
};

/// Shares per topic over comments whose video has that main topic; comments
/// without one are reported separately, never silently dropped.
inline TopicSentimentTable topic_sentiment(const std::vector<TopicLabel>& items,
                                           int32_t topic_count) {
  TopicSentimentTable table;
  for (int32_t k = 0; k < topic_count; ++k) table.topics[k];
  for (const auto& item : items) {
    if (!item.topic) {
      ++table.unassigned;
      continue;
    }
    TopicShares& shares = table.topics[*item.topic];
    switch (item.label) {
      case SentimentLabel::Positive: ++shares.n_pos; break;
      case SentimentLabel::Neutral: ++shares.n_neu; break;
      case SentimentLabel::Negative: ++shares.n_neg; break;
    }
  }
  return table;
}

inline std::string topic_sentiment_to_csv(const TopicSentimentTable& table) {
  CsvWriter csv;
  csv.row({"topic", "share_pos", "share_neu", "share_neg", "n"});
  for (const auto& [topic, s] : table.topics) {
    csv.row({std::to_string(topic), s.share_pos() ? format_double(*s.share_pos()) : "",
             s.share_neu() ? format_double(*s.share_neu()) : "",
             s.share_neg() ? format_double(*s.share_neg()) : "", std::to_string(s.total())});
  }
  csv.row({"unassigned", "", "", "", std::to_string(table.unassigned)});
  return csv.str();
}

// ---------------------------------------------------------------------------
// Topic time series

struct TimedTopic {
  std::optional<int32_t> topic;
  int64_t published_at = 0;
};

struct TopicTimeseries {
  std::map<std::pair<int32_t, YearMonth>, int64_t> counts;
  int64_t skipped_no_topic = 0;
};

/// Monthly published-video counts per main topic; videos without a main
/// topic are excluded and counted in diagnostics.
inline TopicTimeseries topic_timeseries(const std::vector<TimedTopic>& videos) {
  TopicTimeseries out;
  for (const auto& v : videos) {
    if (!v.topic) {
      ++out.skipped_no_topic;
      continue;
    }
    ++out.counts[{*v.topic, year_month_of(v.published_at)}];
  }
  return out;
}

inline std::string topic_timeseries_to_csv(const TopicTimeseries& ts) {
  CsvWriter csv;
  csv.row({"topic", "month", "n_videos"});
  for (const auto& [key, n] : ts.counts)
    csv.row({std::to_string(key.first), key.second.str(), std::to_string(n)});
  return csv.str();
}

}  // namespace opinion
