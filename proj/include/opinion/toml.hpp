// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "opinion/common.hpp"

namespace opinion::toml {

// Small TOML-subset reader, enough for pipeline config files: [tables],
// dotted keys, strings, ints, floats, bools, and (possibly multiline)
// arrays of scalars. Keys are flattened to "table.key" form.

using Value = std::variant<std::string, int64_t, double, bool, std::vector<std::string>,
                           std::vector<int64_t>, std::vector<double>>;
using Table = std::map<std::string, Value>;

namespace detail {

struct Cursor {
  std::string_view text;
  size_t pos = 0;
  int line = 1;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char take() {
    char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }
  void skip_ws_inline() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos;
  }
  void skip_comment() {
    if (!eof() && peek() == '#')
      while (!eof() && peek() != '\n') ++pos;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("TOML parse error at line " + std::to_string(line) + ": " + msg);
  }
};

inline bool is_bare_key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '-';
}

inline std::string parse_key(Cursor& c) {
  std::string key;
  while (true) {
    c.skip_ws_inline();
    std::string part;
    if (!c.eof() && c.peek() == '"') {
      c.take();
      while (!c.eof() && c.peek() != '"') part += c.take();
      if (c.eof()) c.fail("unterminated quoted key");
      c.take();
    } else {
      while (!c.eof() && is_bare_key_char(c.peek())) part += c.take();
    }
    if (part.empty()) c.fail("empty key");
    if (!key.empty()) key += '.';
    key += part;
    c.skip_ws_inline();
    if (!c.eof() && c.peek() == '.') {
      c.take();
      continue;
    }
    return key;
  }
}

inline std::string parse_basic_string(Cursor& c) {
  // Opening quote already consumed.
  std::string out;
  while (true) {
    if (c.eof()) c.fail("unterminated string");
    char ch = c.take();
    if (ch == '"') return out;
    if (ch == '\n') c.fail("newline in basic string");
    if (ch != '\\') {
      out += ch;
      continue;
    }
    if (c.eof()) c.fail("dangling escape");
    char esc = c.take();
    switch (esc) {
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case 'r': out += '\r'; break;
      case '"': out += '"'; break;
      case '\\': out += '\\'; break;
      case 'u':
      case 'U': {
        int n = esc == 'u' ? 4 : 8;
        uint32_t cp = 0;
        for (int i = 0; i < n; ++i) {
          if (c.eof()) c.fail("truncated unicode escape");
          char h = c.take();
          cp <<= 4;
          if (h >= '0' && h <= '9')
            cp |= static_cast<uint32_t>(h - '0');
          else if (h >= 'a' && h <= 'f')
            cp |= static_cast<uint32_t>(h - 'a' + 10);
          else if (h >= 'A' && h <= 'F')
            cp |= static_cast<uint32_t>(h - 'A' + 10);
          else
            c.fail("bad unicode escape digit");
        }
        // Inline UTF-8 encoding; avoids pulling unicode.hpp in here.
        if (cp < 0x80) {
          out += static_cast<char>(cp);
        } else if (cp < 0x800) {
          out += static_cast<char>(0xC0 | (cp >> 6));
          out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
          out += static_cast<char>(0xE0 | (cp >> 12));
          out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
          out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
          out += static_cast<char>(0xF0 | (cp >> 18));
          out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
          out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
          out += static_cast<char>(0x80 | (cp & 0x3F));
        }
        break;
      }
      default: c.fail("unsupported escape");
    }
  }
}

inline std::string parse_literal_string(Cursor& c) {
  std::string out;
  while (true) {
    if (c.eof()) c.fail("unterminated literal string");
    char ch = c.take();
    if (ch == '\'') return out;
    out += ch;
  }
}

struct Scalar {
  Value v;
};

inline Scalar parse_scalar(Cursor& c) {
  c.skip_ws_inline();
  if (c.eof()) c.fail("expected value");
  char ch = c.peek();
  if (ch == '"') {
    c.take();
    return {parse_basic_string(c)};
  }
  if (ch == '\'') {
    c.take();
    return {parse_literal_string(c)};
  }
  std::string tok;
  while (!c.eof()) {
    char p = c.peek();
    if (p == ',' || p == ']' || p == '\n' || p == '#' || p == ' ' || p == '\t' || p == '\r') break;
    tok += c.take();
  }
  if (tok == "true") return {true};
  if (tok == "false") return {false};
  if (tok.empty()) c.fail("empty value");
  bool looks_float = tok.find_first_of(".eE") != std::string::npos &&
                     tok.find_first_not_of("+-0123456789.eE_") == std::string::npos;
  std::string digits;
  for (char d : tok)
    if (d != '_') digits += d;
  try {
    if (looks_float) return {std::stod(digits)};
    size_t used = 0;
    int64_t i = std::stoll(digits, &used);
    if (used != digits.size()) c.fail("bad number: " + tok);
    return {i};
  } catch (const std::exception&) {
    c.fail("bad value: " + tok);
  }
}

inline Value parse_array(Cursor& c) {
  // Opening bracket already consumed. Homogeneous arrays only.
  std::vector<Scalar> items;
  while (true) {
    c.skip_ws_inline();
    c.skip_comment();
    if (c.eof()) c.fail("unterminated array");
    char ch = c.peek();
    if (ch == '\n' || ch == '\r') {
      c.take();
      continue;
    }
    if (ch == ']') {
      c.take();
      break;
    }
    if (ch == ',') {
      c.take();
      continue;
    }
    items.push_back(parse_scalar(c));
  }
  if (items.empty()) return std::vector<std::string>{};
  if (std::holds_alternative<std::string>(items[0].v)) {
    std::vector<std::string> out;
    for (auto& s : items) {
      if (!std::holds_alternative<std::string>(s.v)) c.fail("mixed array types");
      out.push_back(std::get<std::string>(s.v));
    }
    return out;
  }
  if (std::holds_alternative<int64_t>(items[0].v)) {
    bool any_double = false;
    for (auto& s : items)
      if (std::holds_alternative<double>(s.v)) any_double = true;
    if (!any_double) {
      std::vector<int64_t> out;
      for (auto& s : items) {
        if (!std::holds_alternative<int64_t>(s.v)) c.fail("mixed array types");
        out.push_back(std::get<int64_t>(s.v));
      }
      return out;
    }
  }
  std::vector<double> out;
  for (auto& s : items) {
    if (std::holds_alternative<double>(s.v))
      out.push_back(std::get<double>(s.v));
    else if (std::holds_alternative<int64_t>(s.v))
      out.push_back(static_cast<double>(std::get<int64_t>(s.v)));
    else
      c.fail("mixed array types");
  }
  return out;
}

}  // namespace detail

inline Table parse(std::string_view text) {
  detail::Cursor c{text};
  Table table;
  std::string prefix;
  while (!c.eof()) {
    c.skip_ws_inline();
    c.skip_comment();
    if (c.eof()) break;
    char ch = c.peek();
    if (ch == '\n' || ch == '\r') {
      c.take();
      continue;
    }
    if (ch == '[') {
      c.take();
      if (!c.eof() && c.peek() == '[') c.fail("array-of-tables not supported");
      prefix = detail::parse_key(c);
      c.skip_ws_inline();
      if (c.eof() || c.take() != ']') c.fail("expected ']'");
      continue;
    }
    std::string key = detail::parse_key(c);
    c.skip_ws_inline();
    if (c.eof() || c.take() != '=') c.fail("expected '=' after key " + key);
    c.skip_ws_inline();
    Value v;
    if (!c.eof() && c.peek() == '[') {
      c.take();
      v = detail::parse_array(c);
    } else {
      v = detail::parse_scalar(c).v;
    }
    std::string full = prefix.empty() ? key : prefix + "." + key;
    if (table.count(full)) c.fail("duplicate key: " + full);
    table[full] = std::move(v);
    c.skip_ws_inline();
    c.skip_comment();
    if (!c.eof() && c.peek() != '\n' && c.peek() != '\r') c.fail("trailing content after value");
  }
  return table;
}

inline std::string escape(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += ch;
    }
  }
  out += '"';
  return out;
}

template <typename T>
std::optional<T> get(const Table& t, const std::string& key) {
  auto it = t.find(key);
  if (it == t.end()) return std::nullopt;
  if (const T* p = std::get_if<T>(&it->second)) return *p;
  // Permit int where double expected.
  if constexpr (std::is_same_v<T, double>) {
    if (const int64_t* p = std::get_if<int64_t>(&it->second)) return static_cast<double>(*p);
  }
  throw ConfigError("TOML key has unexpected type: " + key);
}

template <typename T>
T get_or(const Table& t, const std::string& key, T fallback) {
  auto v = get<T>(t, key);
  return v ? *v : fallback;
}

}  // namespace opinion::toml
