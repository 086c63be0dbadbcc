// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace opinion {

inline constexpr const char* kVersion = "0.1.0";

/// Fatal I/O failure (unreadable file, broken pipe, HTTP exhaustion).
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration (bad rules file, out-of-range parameter).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Unparseable payload; carries the raw text that failed to parse.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::string raw)
      : std::runtime_error(what), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

private:
  std::string raw_;
};

namespace detail {
inline bool& warnings_enabled() {
  static bool enabled = true;
  return enabled;
}
}  // namespace detail

inline void set_warnings_enabled(bool on) { detail::warnings_enabled() = on; }

inline void warn(const char* msg) {
  if (!detail::warnings_enabled()) return;
  std::fprintf(stderr, "warning: %s\n", msg);
}

template <typename Arg0, typename... Args>
void warn(const char* fmt, Arg0&& arg0, Args&&... args) {
  if (!detail::warnings_enabled()) return;
  std::fprintf(stderr, "warning: ");
  std::fprintf(stderr, fmt, std::forward<Arg0>(arg0), std::forward<Args>(args)...);
  std::fprintf(stderr, "\n");
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) throw IoError("error while reading: " + path.string());
  return out.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open file for writing: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("error while writing: " + path.string());
}

/// Write-then-rename so concurrent writers of the same key never interleave.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  write_file(tmp, content);
  std::filesystem::rename(tmp, path);
}

inline std::string format_double(double v, const char* fmt = "%.9g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace opinion
