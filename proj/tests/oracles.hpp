// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors
//
// Test-only oracles: independent brute-force implementations used to check
// the library's optimized paths. These deliberately share no code with the
// implementations they verify.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "opinion/lda.hpp"
#include "opinion/tokenize.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// Synthetic two-topic corpus: docs 0..D-1 draw only from terms 0..T-1,
// docs D..2D-1 only from terms T..2T-1.

struct TwoTopicCorpus {
  opinion::BowCorpus bow;
  std::vector<int> labels;  // generating topic per doc (0 or 1)
};

inline TwoTopicCorpus make_two_topic_corpus(uint64_t seed, int docs_per_topic = 50,
                                            int terms_per_topic = 5, int tokens_per_doc = 30) {
  TwoTopicCorpus out;
  for (int t = 0; t < 2 * terms_per_topic; ++t)
    out.bow.vocab.add((t < terms_per_topic ? "a" : "b") + std::to_string(t % terms_per_topic));
  std::mt19937_64 rng(seed);
  for (int d = 0; d < 2 * docs_per_topic; ++d) {
    const int label = d < docs_per_topic ? 0 : 1;
    out.labels.push_back(label);
    std::map<int32_t, int32_t> counts;
    for (int t = 0; t < tokens_per_doc; ++t) {
      int32_t term = static_cast<int32_t>(label * terms_per_topic +
                                          static_cast<int>(rng() % terms_per_topic));
      ++counts[term];
    }
    opinion::BowDoc doc;
    doc.doc_id = "doc" + std::to_string(d);
    for (auto [id, n] : counts) {
      doc.counts.emplace_back(id, n);
      doc.total_tokens += n;
    }
    out.bow.docs.push_back(std::move(doc));
  }
  for (int32_t id = 0; id < out.bow.vocab.size(); ++id) {
    int64_t cf = 0, df = 0;
    for (const auto& d : out.bow.docs) {
      for (auto [term, n] : d.counts)
        if (term == id) {
          cf += n;
          ++df;
        }
    }
    out.bow.vocab.set_freqs(id, df, cf);
  }
  return out;
}

/// Fraction of documents whose main topic matches the generating label under
/// the better of the two topic<->label matchings (K = 2).
inline double two_topic_purity(const opinion::LdaModel& model, const std::vector<int>& labels) {
  size_t direct = 0, swapped = 0, counted = 0;
  for (size_t d = 0; d < labels.size(); ++d) {
    int32_t k = opinion::main_topic(model, d);
    if (k == opinion::kNoMainTopic) continue;
    ++counted;
    if (k == labels[d]) ++direct;
    if ((1 - k) == labels[d]) ++swapped;
  }
  if (counted == 0) return 0.0;
  return static_cast<double>(std::max(direct, swapped)) / static_cast<double>(counted);
}

// ---------------------------------------------------------------------------
// Brute-force UMass: direct document-set enumeration.

inline double umass_topic(const std::vector<int32_t>& topic_words,
                          const std::vector<std::vector<int32_t>>& docs) {
  auto doc_count = [&](int32_t w) {
    int64_t n = 0;
    for (const auto& d : docs)
      if (std::find(d.begin(), d.end(), w) != d.end()) ++n;
    return n;
  };
  auto pair_count = [&](int32_t a, int32_t b) {
    int64_t n = 0;
    for (const auto& d : docs) {
      bool has_a = std::find(d.begin(), d.end(), a) != d.end();
      bool has_b = std::find(d.begin(), d.end(), b) != d.end();
      if (has_a && has_b) ++n;
    }
    return n;
  };
  std::vector<int32_t> present;
  for (int32_t w : topic_words)
    if (doc_count(w) > 0) present.push_back(w);
  double sum = 0.0;
  int64_t pairs = 0;
  for (size_t i = 1; i < present.size(); ++i)
    for (size_t j = 0; j < i; ++j) {
      sum += std::log(
          (static_cast<double>(pair_count(present[i], present[j])) + 1.0) /
          static_cast<double>(doc_count(present[j])));
      ++pairs;
    }
  return pairs == 0 ? 0.0 : sum / static_cast<double>(pairs);
}

// ---------------------------------------------------------------------------
// Brute-force C_v: explicit window materialization.

inline std::vector<std::set<int32_t>> enumerate_windows(
    const std::vector<std::vector<int32_t>>& docs, int window) {
  std::vector<std::set<int32_t>> out;
  for (const auto& doc : docs) {
    if (doc.empty()) continue;
    size_t wsize = std::min<size_t>(static_cast<size_t>(window), doc.size());
    for (size_t start = 0; start + wsize <= doc.size(); ++start)
      out.emplace_back(doc.begin() + static_cast<ptrdiff_t>(start),
                       doc.begin() + static_cast<ptrdiff_t>(start + wsize));
  }
  return out;
}

inline double cv_topic(const std::vector<int32_t>& topic_words,
                       const std::vector<std::vector<int32_t>>& docs, int window,
                       double epsilon) {
  auto windows = enumerate_windows(docs, window);
  const double W = static_cast<double>(windows.size());
  auto p = [&](int32_t w) {
    double n = 0;
    for (const auto& win : windows)
      if (win.count(w)) ++n;
    return n / W;
  };
  auto p2 = [&](int32_t a, int32_t b) {
    double n = 0;
    for (const auto& win : windows)
      if (win.count(a) && win.count(b)) ++n;
    return n / W;
  };
  auto npmi = [&](int32_t a, int32_t b) {
    double pa = p(a), pb = p(b), pab = p2(a, b);
    if (pa <= 0.0 || pb <= 0.0) return 0.0;
    if (pab >= 1.0) return 1.0;
    return std::log((pab + epsilon) / (pa * pb)) / (-std::log(pab + epsilon));
  };
  const size_t n = topic_words.size();
  std::vector<std::vector<double>> vec(n, std::vector<double>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) vec[i][j] = npmi(topic_words[i], topic_words[j]);
  std::vector<double> sum(n, 0.0);
  for (const auto& v : vec)
    for (size_t j = 0; j < n; ++j) sum[j] += v[j];
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double dot = 0, nu = 0, nv = 0;
    for (size_t j = 0; j < n; ++j) {
      dot += vec[i][j] * sum[j];
      nu += vec[i][j] * vec[i][j];
      nv += sum[j] * sum[j];
    }
    acc += (nu == 0 || nv == 0) ? 0.0 : dot / (std::sqrt(nu) * std::sqrt(nv));
  }
  return acc / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Brute-force sentence pair counting for co-occurrence graphs.

inline std::map<std::pair<std::string, std::string>, int64_t> pair_counts(
    const std::vector<std::set<std::string>>& sentences) {
  std::map<std::pair<std::string, std::string>, int64_t> out;
  for (const auto& s : sentences) {
    std::vector<std::string> terms(s.begin(), s.end());
    for (size_t i = 0; i < terms.size(); ++i)
      for (size_t j = i + 1; j < terms.size(); ++j) {
        auto key = terms[i] < terms[j] ? std::make_pair(terms[i], terms[j])
                                       : std::make_pair(terms[j], terms[i]);
        ++out[key];
      }
  }
  return out;
}

}  // namespace oracle
