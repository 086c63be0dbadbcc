// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "opinion/common.hpp"
#include "opinion/csv.hpp"

namespace opinion {

enum class CoherenceMeasure { CV, UMass };

struct CoherenceConfig {
  CoherenceMeasure measure = CoherenceMeasure::CV;
  int top_n = 10;        // words per topic
  int window = 110;      // sliding-window size for CV
  double epsilon = 1e-12;  // NPMI smoothing

  void validate() const {
    if (top_n < 2) throw ConfigError("coherence top_n must be >= 2");
    if (window < 1) throw ConfigError("coherence window must be >= 1");
    if (epsilon <= 0) throw ConfigError("coherence epsilon must be > 0");
  }
};

struct CoherenceResult {
  std::vector<double> per_topic;
  double mean = 0.0;
};

// ---------------------------------------------------------------------------
// UMass

/// Mean over ordered pairs (i > j) of log((D(wi,wj)+1)/D(wj)), where D counts
/// reference documents. Words absent from the corpus are excluded, with a
/// warning. Topics are lists of term ids ranked best-first.
inline CoherenceResult coherence_umass(const std::vector<std::vector<int32_t>>& topics,
                                       const std::vector<std::vector<int32_t>>& docs) {
  // Document frequencies restricted to the words we need.
  std::unordered_set<int32_t> needed;
  for (const auto& t : topics) needed.insert(t.begin(), t.end());

  std::unordered_map<int32_t, int64_t> doc_freq;
  std::map<std::pair<int32_t, int32_t>, int64_t> pair_freq;
  std::set<std::pair<int32_t, int32_t>> wanted_pairs;
  for (const auto& t : topics)
    for (size_t i = 1; i < t.size(); ++i)
      for (size_t j = 0; j < i; ++j)
        wanted_pairs.insert(std::minmax(t[i], t[j]));

  for (const auto& doc : docs) {
    std::vector<int32_t> present;
    for (int32_t w : doc)
      if (needed.contains(w)) present.push_back(w);
    std::sort(present.begin(), present.end());
    present.erase(std::unique(present.begin(), present.end()), present.end());
    for (int32_t w : present) ++doc_freq[w];
    for (size_t a = 0; a < present.size(); ++a)
      for (size_t b = a + 1; b < present.size(); ++b) {
        auto key = std::make_pair(present[a], present[b]);
        if (wanted_pairs.contains(key)) ++pair_freq[key];
      }
  }

  CoherenceResult result;
  for (const auto& topic : topics) {
    std::vector<int32_t> words;
    for (int32_t w : topic) {
      if (doc_freq.contains(w) && doc_freq[w] > 0)
        words.push_back(w);
      else
        warn("coherence: topic word id %d absent from reference corpus, excluded", w);
    }
    double sum = 0.0;
    int64_t pairs = 0;
    for (size_t i = 1; i < words.size(); ++i) {
      for (size_t j = 0; j < i; ++j) {
        auto key = std::minmax(words[i], words[j]);
        int64_t co = 0;
        if (auto it = pair_freq.find(key); it != pair_freq.end()) co = it->second;
        double dj = static_cast<double>(doc_freq[words[j]]);
        sum += std::log((static_cast<double>(co) + 1.0) / dj);
        ++pairs;
      }
    }
    if (pairs == 0) {
      warn("coherence: topic has fewer than two corpus words, score set to 0");
      result.per_topic.push_back(0.0);
    } else {
      result.per_topic.push_back(sum / static_cast<double>(pairs));
    }
  }
  double total = 0.0;
  for (double s : result.per_topic) total += s;
  result.mean = result.per_topic.empty() ? 0.0 : total / static_cast<double>(result.per_topic.size());
  return result;
}

// ---------------------------------------------------------------------------
// C_v

namespace detail {

/// Counts boolean sliding windows over the given token sequences, restricted
/// to the word universe. A document of length L yields max(1, L - window + 1)
/// windows; a document shorter than the window is one window.
struct WindowCounts {
  int64_t total_windows = 0;
  std::unordered_map<int32_t, int64_t> word;                 // windows containing w
  std::map<std::pair<int32_t, int32_t>, int64_t> pair;       // windows containing both (a<b)
};

inline WindowCounts count_windows(const std::vector<std::vector<int32_t>>& docs, int window,
                                  const std::unordered_set<int32_t>& universe) {
  WindowCounts wc;
  for (const auto& doc : docs) {
    if (doc.empty()) continue;
    const size_t L = doc.size();
    const size_t wsize = std::min<size_t>(static_cast<size_t>(window), L);
    const size_t n_windows = L - wsize + 1;
    // Multiplicity of universe words inside the current window.
    std::unordered_map<int32_t, int32_t> mult;
    auto add = [&](size_t idx) {
      int32_t w = doc[idx];
      if (universe.contains(w)) ++mult[w];
    };
    auto remove = [&](size_t idx) {
      int32_t w = doc[idx];
      if (auto it = mult.find(w); it != mult.end() && --it->second == 0) mult.erase(it);
    };
    for (size_t k = 0; k < wsize; ++k) add(k);
    for (size_t start = 0;; ++start) {
      ++wc.total_windows;
      std::vector<int32_t> present;
      present.reserve(mult.size());
      for (const auto& [w, _] : mult) present.push_back(w);
      std::sort(present.begin(), present.end());
      for (size_t a = 0; a < present.size(); ++a) {
        ++wc.word[present[a]];
        for (size_t b = a + 1; b < present.size(); ++b)
          ++wc.pair[{present[a], present[b]}];
      }
      if (start + 1 >= n_windows) break;
      remove(start);
      add(start + wsize);
    }
  }
  return wc;
}

/// NPMI with epsilon smoothing. Complete co-occurrence (p_ij = 1) is defined
/// as 1 to keep the [-1, 1] range meaningful at the boundary.
inline double npmi(double p_i, double p_j, double p_ij, double epsilon) {
  if (p_i <= 0.0 || p_j <= 0.0) return 0.0;
  if (p_ij >= 1.0) return 1.0;
  double num = std::log((p_ij + epsilon) / (p_i * p_j));
  double den = -std::log(p_ij + epsilon);
  return num / den;
}

inline double cosine(const std::vector<double>& u, const std::vector<double>& v) {
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) {
    warn("coherence: degenerate zero vector in C_v cosine, similarity set to 0");
    return 0.0;
  }
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

}  // namespace detail

/// Röder-style C_v: boolean sliding windows define virtual documents, each
/// top word maps to its NPMI vector against the topic's word set (diagonal
/// included), and the one-vs-all segmentation scores each word vector
/// against the sum vector by cosine similarity.
inline CoherenceResult coherence_cv(const std::vector<std::vector<int32_t>>& topics,
                                    const std::vector<std::vector<int32_t>>& docs,
                                    const CoherenceConfig& config = {}) {
  config.validate();
  std::unordered_set<int32_t> universe;
  for (const auto& t : topics) universe.insert(t.begin(), t.end());
  detail::WindowCounts wc = detail::count_windows(docs, config.window, universe);
  const double W = static_cast<double>(wc.total_windows);

  auto prob = [&](int32_t w) -> double {
    auto it = wc.word.find(w);
    return it == wc.word.end() ? 0.0 : static_cast<double>(it->second) / W;
  };
  auto pair_prob = [&](int32_t a, int32_t b) -> double {
    if (a == b) return prob(a);
    auto key = std::minmax(a, b);
    auto it = wc.pair.find(key);
    return it == wc.pair.end() ? 0.0 : static_cast<double>(it->second) / W;
  };

  CoherenceResult result;
  for (const auto& topic : topics) {
    const size_t n = topic.size();
    for (int32_t w : topic)
      if (prob(w) == 0.0)
        warn("coherence: topic word id %d never appears in any window", w);
    // NPMI context vectors, diagonal included.
    std::vector<std::vector<double>> vec(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        vec[i][j] =
            detail::npmi(prob(topic[i]), prob(topic[j]), pair_prob(topic[i], topic[j]),
                         config.epsilon);
    std::vector<double> sum(n, 0.0);
    for (const auto& v : vec)
      for (size_t j = 0; j < n; ++j) sum[j] += v[j];
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) acc += detail::cosine(vec[i], sum);
    result.per_topic.push_back(n == 0 ? 0.0 : acc / static_cast<double>(n));
  }
  double total = 0.0;
  for (double s : result.per_topic) total += s;
  result.mean = result.per_topic.empty() ? 0.0 : total / static_cast<double>(result.per_topic.size());
  return result;
}

inline CoherenceResult compute_coherence(const std::vector<std::vector<int32_t>>& topics,
                                         const std::vector<std::vector<int32_t>>& docs,
                                         const CoherenceConfig& config) {
  return config.measure == CoherenceMeasure::CV ? coherence_cv(topics, docs, config)
                                                : coherence_umass(topics, docs);
}

/// coherence.csv: topic_id, measure, score, plus an overall row per measure.
inline std::string coherence_to_csv(const CoherenceResult& cv, const CoherenceResult& umass) {
  CsvWriter csv;
  csv.row({"topic_id", "measure", "score"});
  for (size_t k = 0; k < cv.per_topic.size(); ++k)
    csv.row({std::to_string(k), "cv", format_double(cv.per_topic[k])});
  csv.row({"overall", "cv", format_double(cv.mean)});
  for (size_t k = 0; k < umass.per_topic.size(); ++k)
    csv.row({std::to_string(k), "umass", format_double(umass.per_topic[k])});
  csv.row({"overall", "umass", format_double(umass.mean)});
  return csv.str();
}

}  // namespace opinion
