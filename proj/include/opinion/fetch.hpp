// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors

#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "opinion/common.hpp"
#include "opinion/corpus.hpp"

namespace opinion {

struct FetchOptions {
  int max_attempts = 3;
  int backoff_initial_ms = 200;
  int timeout_s = 30;
};

/// Minimal paged video-listing client: GET with query params q, key and
/// pageToken, following nextPageToken up to max_pages. Items missing
/// required fields are skipped with a warning. Non-200 responses retry with
/// exponential backoff before becoming fatal.
inline std::vector<VideoDoc> fetch_videos(const std::string& endpoint, const std::string& query,
                                          const std::string& api_key, int max_pages,
                                          const FetchOptions& options = {}) {
  std::vector<VideoDoc> videos;
  if (max_pages <= 0) return videos;
  if (api_key.empty()) throw ConfigError("fetch: api key must not be empty");

  size_t scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("fetch: endpoint must start with http:// or https://");
  size_t path_start = endpoint.find('/', scheme_end + 3);
  std::string base = path_start == std::string::npos ? endpoint : endpoint.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : endpoint.substr(path_start);

  httplib::Client client(base);
  client.set_connection_timeout(options.timeout_s, 0);
  client.set_read_timeout(options.timeout_s, 0);

  std::string page_token;
  for (int page = 0; page < max_pages; ++page) {
    httplib::Params params{{"q", query}, {"key", api_key}};
    if (!page_token.empty()) params.emplace("pageToken", page_token);

    httplib::Result res;
    for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
      if (attempt > 0)
        std::this_thread::sleep_for(
            std::chrono::milliseconds(options.backoff_initial_ms << (attempt - 1)));
      res = client.Get(path, params, httplib::Headers{});
      if (res && res->status == 200) break;
    }
    if (!res) throw IoError("fetch: connection to " + endpoint + " failed after retries");
    if (res->status != 200)
      throw IoError("fetch: HTTP " + std::to_string(res->status) + " from " + endpoint +
                    " after retries");

    nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("items") || !j["items"].is_array())
      throw IoError("fetch: response is not a paged item list");
    for (const auto& item : j["items"]) {
      auto video = video_from_json(item);
      if (!video) {
        warn("fetch: item missing required fields, skipped");
        continue;
      }
      videos.push_back(std::move(*video));
    }
    if (!j.contains("nextPageToken") || !j["nextPageToken"].is_string()) break;
    page_token = j["nextPageToken"].get<std::string>();
    if (page_token.empty()) break;
  }
  return videos;
}

}  // namespace opinion
