// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors

#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>

namespace opinion {

/// UTC calendar month, the bucketing unit for all time series.
struct YearMonth {
  int year = 0;
  int month = 0;  // 1..12

  auto operator<=>(const YearMonth&) const = default;

  YearMonth next() const {
    return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1};
  }

  std::string str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
  }
};

/// Parses strict "YYYY-MM-DDThh:mm:ssZ" into Unix seconds.
inline std::optional<int64_t> parse_utc(std::string_view text) {
  if (text.size() != 20) return std::nullopt;
  int y, mo, d, h, mi, s;
  char t, z;
  std::string buf(text);
  if (std::sscanf(buf.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d%c", &y, &mo, &d, &t, &h, &mi, &s, &z) != 8)
    return std::nullopt;
  if (t != 'T' || z != 'Z') return std::nullopt;
  if (h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60) return std::nullopt;
  using namespace std::chrono;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  sys_days days{ymd};
  return days.time_since_epoch().count() * int64_t{86400} + h * 3600 + mi * 60 + s;
}

inline std::string format_utc(int64_t epoch_seconds) {
  using namespace std::chrono;
  int64_t day_count = epoch_seconds / 86400;
  int64_t rem = epoch_seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --day_count;
  }
  year_month_day ymd{sys_days{days{day_count}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()), int(rem / 3600), int((rem / 60) % 60),
                int(rem % 60));
  return buf;
}

inline YearMonth year_month_of(int64_t epoch_seconds) {
  using namespace std::chrono;
  int64_t day_count = epoch_seconds / 86400;
  if (epoch_seconds % 86400 < 0) --day_count;
  year_month_day ymd{sys_days{days{day_count}}};
  return {int(ymd.year()), int(unsigned(ymd.month()))};
}

/// Parses "YYYY-MM-DD" into Unix seconds at midnight UTC.
inline std::optional<int64_t> parse_utc_date(std::string_view text) {
  if (text.size() != 10) return std::nullopt;
  std::string full(text);
  full += "T00:00:00Z";
  return parse_utc(full);
}

/// Parses "YYYY-MM".
inline std::optional<YearMonth> parse_year_month(std::string_view text) {
  if (text.size() != 7 || text[4] != '-') return std::nullopt;
  int y, m;
  std::string buf(text);
  if (std::sscanf(buf.c_str(), "%4d-%2d", &y, &m) != 2) return std::nullopt;
  if (m < 1 || m > 12) return std::nullopt;
  return YearMonth{y, m};
}

}  // namespace opinion
