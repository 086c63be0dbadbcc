// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "opinion/common.hpp"
#include "opinion/corpus.hpp"
#include "opinion/sentiment.hpp"
#include "opinion/timeutil.hpp"
#include "opinion/tokenize.hpp"

namespace opinion {

/// Splits cleaned text on Japanese and ASCII sentence delimiters plus
/// newlines; empty and whitespace-only segments are dropped.
inline std::vector<std::string> split_sentences(std::string_view text) {
  static const std::set<CodePoint> delims = {U'。', U'！', U'？', U'．', U'!', U'?', U'\n', U'\r'};
  std::vector<std::string> sentences;
  std::string current;
  size_t i = 0;
  while (i < text.size()) {
    size_t k = i;
    CodePoint cp = utf8_next(text, k);
    if (delims.contains(cp)) {
      if (!current.empty()) sentences.push_back(std::move(current));
      current.clear();
    } else {
      current.append(text, i, k - i);
    }
    i = k;
  }
  if (!current.empty()) sentences.push_back(std::move(current));
  // Drop whitespace-only segments.
  std::vector<std::string> out;
  for (auto& s : sentences) {
    bool blank = true;
    size_t p = 0;
    while (p < s.size()) {
      if (!is_space(utf8_next(s, p))) {
        blank = false;
        break;
      }
    }
    if (!blank) out.push_back(std::move(s));
  }
  return out;
}

struct CooccurrenceGraph {
  // Node frequency counts sentences containing the term, consistent with
  // edge semantics (a pair counts once per sentence).
  std::map<std::string, int64_t> nodes;
  std::map<std::pair<std::string, std::string>, int64_t> edges;  // canonical a < b
  std::string filter_description;
  int64_t node_min_freq = 1;
  int64_t sentence_count = 0;

  int64_t edge_count(std::string_view a, std::string_view b) const {
    auto key = a < b ? std::make_pair(std::string(a), std::string(b))
                     : std::make_pair(std::string(b), std::string(a));
    auto it = edges.find(key);
    return it == edges.end() ? 0 : it->second;
  }
};

/// Sentence-level co-occurrence counting with set semantics: each distinct
/// noun pair counts once per sentence however often it repeats. Nodes below
/// node_min_freq are removed after counting, along with incident edges.
inline CooccurrenceGraph build_graph(const std::vector<std::string>& texts,
                                     const TokenizerPlugin& tokenizer, int64_t node_min_freq,
                                     const std::set<Pos>& keep_pos = {Pos::Noun}) {
  if (node_min_freq < 1) throw ConfigError("cooccur: node_min_freq must be >= 1");
  CooccurrenceGraph graph;
  graph.node_min_freq = node_min_freq;
  for (const auto& text : texts) {
    for (const auto& sentence : split_sentences(text)) {
      std::set<std::string> terms;
      for (const Token& t : tokenizer.tokenize(sentence)) {
        if (keep_pos.contains(t.pos) && !t.normalized.empty()) terms.insert(t.normalized);
      }
      if (terms.empty()) continue;
      ++graph.sentence_count;
      for (auto it = terms.begin(); it != terms.end(); ++it) {
        ++graph.nodes[*it];
        for (auto jt = std::next(it); jt != terms.end(); ++jt) ++graph.edges[{*it, *jt}];
      }
    }
  }
  // Threshold prune.
  for (auto it = graph.nodes.begin(); it != graph.nodes.end();) {
    if (it->second < node_min_freq)
      it = graph.nodes.erase(it);
    else
      ++it;
  }
  for (auto it = graph.edges.begin(); it != graph.edges.end();) {
    if (!graph.nodes.contains(it->first.first) || !graph.nodes.contains(it->first.second))
      it = graph.edges.erase(it);
    else
      ++it;
  }
  return graph;
}

// ---------------------------------------------------------------------------
// Export

enum class GraphFormat { GraphML, Dot, Json };

inline std::optional<GraphFormat> graph_format_from_name(std::string_view name) {
  if (name == "graphml") return GraphFormat::GraphML;
  if (name == "dot") return GraphFormat::Dot;
  if (name == "json") return GraphFormat::Json;
  return std::nullopt;
}

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

/// Optional display names (e.g. Japanese -> English) applied as a label
/// attribute; node identity stays the original term.
using DisplayNames = std::map<std::string, std::string>;

inline std::string graph_to_graphml(const CooccurrenceGraph& g, const DisplayNames& names = {}) {
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\"\n";
  out += "         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\"\n";
  out +=
      "         xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns "
      "http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n";
  out += "  <key id=\"freq\" for=\"node\" attr.name=\"freq\" attr.type=\"long\"/>\n";
  out += "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n";
  out += "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n";
  out += "  <graph id=\"cooccurrence\" edgedefault=\"undirected\">\n";
  for (const auto& [term, freq] : g.nodes) {
    out += "    <node id=\"" + detail::xml_escape(term) + "\">\n";
    out += "      <data key=\"freq\">" + std::to_string(freq) + "</data>\n";
    if (auto it = names.find(term); it != names.end())
      out += "      <data key=\"label\">" + detail::xml_escape(it->second) + "</data>\n";
    out += "    </node>\n";
  }
  size_t edge_id = 0;
  for (const auto& [pair, weight] : g.edges) {
    out += "    <edge id=\"e" + std::to_string(edge_id++) + "\" source=\"" +
           detail::xml_escape(pair.first) + "\" target=\"" + detail::xml_escape(pair.second) +
           "\">\n";
    out += "      <data key=\"weight\">" + std::to_string(weight) + "</data>\n";
    out += "    </edge>\n";
  }
  out += "  </graph>\n";
  out += "</graphml>\n";
  return out;
}

inline std::string graph_to_dot(const CooccurrenceGraph& g, const DisplayNames& names = {}) {
  std::string out = "graph cooccurrence {\n";
  for (const auto& [term, freq] : g.nodes) {
    out += "  \"" + detail::dot_escape(term) + "\" [freq=" + std::to_string(freq);
    if (auto it = names.find(term); it != names.end())
      out += ", label=\"" + detail::dot_escape(it->second) + "\"";
    out += "];\n";
  }
  for (const auto& [pair, weight] : g.edges) {
    out += "  \"" + detail::dot_escape(pair.first) + "\" -- \"" + detail::dot_escape(pair.second) +
           "\" [weight=" + std::to_string(weight) + ", penwidth=" + std::to_string(weight) +
           "];\n";
  }
  out += "}\n";
  return out;
}

inline nlohmann::json graph_to_json(const CooccurrenceGraph& g, const DisplayNames& names = {}) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& [term, freq] : g.nodes) {
    nlohmann::json n = {{"term", term}, {"freq", freq}};
    if (auto it = names.find(term); it != names.end()) n["label"] = it->second;
    nodes.push_back(std::move(n));
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [pair, weight] : g.edges)
    edges.push_back({{"source", pair.first}, {"target", pair.second}, {"weight", weight}});
  return {{"nodes", nodes},
          {"edges", edges},
          {"metadata",
           {{"filter", g.filter_description},
            {"node_min_freq", g.node_min_freq},
            {"sentences", g.sentence_count}}}};
}

inline CooccurrenceGraph graph_from_json(const nlohmann::json& j) {
  CooccurrenceGraph g;
  for (const auto& n : j.at("nodes"))
    g.nodes[n.at("term").get<std::string>()] = n.at("freq").get<int64_t>();
  for (const auto& e : j.at("edges")) {
    std::string a = e.at("source").get<std::string>();
    std::string b = e.at("target").get<std::string>();
    if (b < a) std::swap(a, b);
    g.edges[{a, b}] = e.at("weight").get<int64_t>();
  }
  if (j.contains("metadata")) {
    const auto& meta = j["metadata"];
    g.filter_description = meta.value("filter", "");
    g.node_min_freq = meta.value("node_min_freq", int64_t{1});
    g.sentence_count = meta.value("sentences", int64_t{0});
  }
  return g;
}

inline std::string export_graph(const CooccurrenceGraph& g, GraphFormat format,
                                const DisplayNames& names = {}) {
  switch (format) {
    case GraphFormat::GraphML: return graph_to_graphml(g, names);
    case GraphFormat::Dot: return graph_to_dot(g, names);
    case GraphFormat::Json: return graph_to_json(g, names).dump(2) + "\n";
  }
  throw ConfigError("unsupported graph format");
}

// ---------------------------------------------------------------------------
// Comment slicing

struct SliceSpec {
  std::optional<SentimentLabel> label;
  std::optional<YearMonth> from;
  std::optional<YearMonth> to;
  std::optional<int32_t> topic;

  std::string describe() const {
    std::string out = "label=";
    out += label ? label_name(*label) : "any";
    out += " from=" + (from ? from->str() : std::string("*"));
    out += " to=" + (to ? to->str() : std::string("*"));
    out += " topic=" + (topic ? std::to_string(*topic) : std::string("any"));
    return out;
  }
};

struct SliceItem {
  const Comment* comment = nullptr;
  SentimentLabel label = SentimentLabel::Neutral;
  std::optional<int32_t> topic;
};

/// Filters labeled comments by sentiment, UTC month window and main topic of
/// the comment's video. Empty results are allowed (and reported by callers).
inline std::vector<const Comment*> sentiment_slice(const std::vector<SliceItem>& items,
                                                   const SliceSpec& spec) {
  std::vector<const Comment*> out;
  for (const auto& item : items) {
    if (spec.label && item.label != *spec.label) continue;
    YearMonth ym = year_month_of(item.comment->published_at);
    if (spec.from && ym < *spec.from) continue;
    if (spec.to && *spec.to < ym) continue;
    if (spec.topic && (!item.topic || *item.topic != *spec.topic)) continue;
    out.push_back(item.comment);
  }
  return out;
}

}  // namespace opinion
