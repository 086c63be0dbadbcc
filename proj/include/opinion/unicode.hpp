// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <unicode/unorm2.h>
#include <unicode/ustring.h>
#include <unicode/utypes.h>

#include "opinion/common.hpp"

namespace opinion {

using CodePoint = char32_t;

inline constexpr CodePoint kReplacementChar = 0xFFFD;

/// Decodes one UTF-8 code point at `i`, advancing `i`. Invalid bytes decode
/// to U+FFFD and advance by one byte.
inline CodePoint utf8_next(std::string_view s, size_t& i) {
  const auto byte = [&](size_t k) { return static_cast<unsigned char>(s[k]); };
  unsigned char b0 = byte(i);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  size_t len = 0;
  CodePoint cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return kReplacementChar;
  }
  if (i + len > s.size()) {
    ++i;
    return kReplacementChar;
  }
  for (size_t k = 1; k < len; ++k) {
    unsigned char b = byte(i + k);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return kReplacementChar;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += len;
  // Reject overlong encodings and surrogates.
  if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
      (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
    return kReplacementChar;
  }
  return cp;
}

inline void utf8_append(std::string& out, CodePoint cp) {
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
}

inline std::vector<CodePoint> utf8_decode(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) out.push_back(utf8_next(s, i));
  return out;
}

inline std::string utf8_encode(const std::vector<CodePoint>& cps) {
  std::string out;
  out.reserve(cps.size() * 3);
  for (CodePoint cp : cps) utf8_append(out, cp);
  return out;
}

/// NFKC normalization (ICU). Unifies full/half-width forms so keyword
/// matching over YouTube text behaves the same for ＡＢＣ and ABC.
inline std::string nfkc(std::string_view text) {
  if (text.empty()) return {};
  UErrorCode ec = U_ZERO_ERROR;
  const UNormalizer2* norm = unorm2_getNFKCInstance(&ec);
  if (U_FAILURE(ec) || norm == nullptr) throw IoError("ICU NFKC unavailable");

  // UTF-8 -> UTF-16
  std::vector<UChar> u16(text.size() + 1);
  int32_t u16len = 0;
  ec = U_ZERO_ERROR;
  u_strFromUTF8(u16.data(), static_cast<int32_t>(u16.size()), &u16len, text.data(),
                static_cast<int32_t>(text.size()), &ec);
  if (U_FAILURE(ec)) {
    // Re-encode lossily (invalid bytes become U+FFFD) and retry once.
    std::string repaired = utf8_encode(utf8_decode(text));
    ec = U_ZERO_ERROR;
    u16.assign(repaired.size() + 1, 0);
    u_strFromUTF8(u16.data(), static_cast<int32_t>(u16.size()), &u16len, repaired.data(),
                  static_cast<int32_t>(repaired.size()), &ec);
    if (U_FAILURE(ec)) throw IoError("UTF-8 to UTF-16 conversion failed");
  }

  std::vector<UChar> out16(static_cast<size_t>(u16len) * 3 + 16);
  ec = U_ZERO_ERROR;
  int32_t outlen = unorm2_normalize(norm, u16.data(), u16len, out16.data(),
                                    static_cast<int32_t>(out16.size()), &ec);
  if (ec == U_BUFFER_OVERFLOW_ERROR) {
    out16.assign(static_cast<size_t>(outlen) + 1, 0);
    ec = U_ZERO_ERROR;
    outlen = unorm2_normalize(norm, u16.data(), u16len, out16.data(),
                              static_cast<int32_t>(out16.size()), &ec);
  }
  if (U_FAILURE(ec)) throw IoError("NFKC normalization failed");

  std::string out(static_cast<size_t>(outlen) * 3 + 16, '\0');
  int32_t u8len = 0;
  ec = U_ZERO_ERROR;
  u_strToUTF8(out.data(), static_cast<int32_t>(out.size()), &u8len, out16.data(), outlen, &ec);
  if (ec == U_BUFFER_OVERFLOW_ERROR) {
    out.assign(static_cast<size_t>(u8len), '\0');
    ec = U_ZERO_ERROR;
    u_strToUTF8(out.data(), static_cast<int32_t>(out.size()), &u8len, out16.data(), outlen, &ec);
  }
  if (U_FAILURE(ec)) throw IoError("UTF-16 to UTF-8 conversion failed");
  out.resize(static_cast<size_t>(u8len));
  return out;
}

enum class Script : uint8_t {
  Hiragana,
  Katakana,
  Han,
  Latin,
  Digit,
  OtherLetter,
  Space,
  Other,
};

inline Script script_of(CodePoint c) {
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' || c == 0x3000)
    return Script::Space;
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return Script::Latin;
  if (c >= '0' && c <= '9') return Script::Digit;
  if (c >= 0x3041 && c <= 0x309F) return Script::Hiragana;
  // U+30FC (prolonged sound mark) binds to katakana words like エネルギー.
  if ((c >= 0x30A0 && c <= 0x30FF) || (c >= 0x31F0 && c <= 0x31FF) || (c >= 0xFF66 && c <= 0xFF9F))
    return Script::Katakana;
  if ((c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF) ||
      (c >= 0xF900 && c <= 0xFAFF) || (c >= 0x20000 && c <= 0x2A6DF) || c == 0x3005 || c == 0x3007)
    return Script::Han;
  // Letters of other scripts, counted as letters by the language heuristic.
  if ((c >= 0x00C0 && c <= 0x024F) || (c >= 0x0370 && c <= 0x03FF) ||
      (c >= 0x0400 && c <= 0x04FF) || (c >= 0x0530 && c <= 0x058F) ||
      (c >= 0x0590 && c <= 0x05FF) || (c >= 0x0600 && c <= 0x06FF) ||
      (c >= 0x0900 && c <= 0x0DFF) || (c >= 0x0E00 && c <= 0x0E7F) ||
      (c >= 0x1100 && c <= 0x11FF) || (c >= 0x3130 && c <= 0x318F) ||
      (c >= 0xAC00 && c <= 0xD7AF) || (c >= 0xFF21 && c <= 0xFF3A) ||
      (c >= 0xFF41 && c <= 0xFF5A))
    return Script::OtherLetter;
  return Script::Other;
}

inline bool is_letter(CodePoint c) {
  switch (script_of(c)) {
    case Script::Hiragana:
    case Script::Katakana:
    case Script::Han:
    case Script::Latin:
    case Script::OtherLetter:
      return true;
    default:
      return false;
  }
}

inline bool is_japanese_letter(CodePoint c) {
  Script s = script_of(c);
  return s == Script::Hiragana || s == Script::Katakana || s == Script::Han;
}

inline bool is_space(CodePoint c) { return script_of(c) == Script::Space; }

/// ASCII-lowercases Latin letters; other code points pass through.
/// Applied on top of NFKC for case-insensitive keyword matching.
inline std::string fold_latin(std::string_view s) {
  std::string out(s);
  for (char& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

}  // namespace opinion
