// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors

#pragma once

#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace opinion {

/// Minimal RFC-4180-style CSV emitter with deterministic formatting.
class CsvWriter {
public:
  void row(std::initializer_list<std::string_view> fields) {
    row(std::vector<std::string_view>(fields));
  }

  void row(const std::vector<std::string_view>& fields) {
    bool first = true;
    for (auto f : fields) {
      if (!first) out_ += ',';
      first = false;
      append_field(f);
    }
    out_ += '\n';
  }

  const std::string& str() const { return out_; }

private:
  void append_field(std::string_view f) {
    bool needs_quote = f.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quote) {
      out_ += f;
      return;
    }
    out_ += '"';
    for (char c : f) {
      if (c == '"') out_ += '"';
      out_ += c;
    }
    out_ += '"';
  }

  std::string out_;
};

}  // namespace opinion
