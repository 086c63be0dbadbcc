// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "opinion/coherence.hpp"
#include "opinion/common.hpp"
#include "opinion/csv.hpp"
#include "opinion/tokenize.hpp"

namespace opinion {

struct LdaConfig {
  int32_t topics = 8;        // K
  double alpha = 0.0;        // symmetric document-topic prior; 0 selects 50/K
  double beta = 0.01;        // symmetric topic-word prior
  int32_t iterations = 500;  // Gibbs sweeps
  int32_t burn_in = 100;     // sweeps discarded before estimation
  int32_t sample_interval = 10;  // snapshot cadence after burn-in
  uint64_t seed = 42;

  double effective_alpha() const { return alpha > 0.0 ? alpha : 50.0 / topics; }

  void validate() const {
    if (topics < 1) throw ConfigError("lda: topics must be >= 1");
    if (alpha < 0.0) throw ConfigError("lda: alpha must be > 0 (or 0 for the 50/K default)");
    if (beta <= 0.0) throw ConfigError("lda: beta must be > 0");
    if (iterations < 1) throw ConfigError("lda: iterations must be >= 1");
    if (burn_in < 0 || burn_in >= iterations)
      throw ConfigError("lda: burn_in must satisfy 0 <= burn_in < iterations");
    if (sample_interval < 1) throw ConfigError("lda: sample_interval must be >= 1");
  }
};

inline constexpr int32_t kNoMainTopic = -1;

struct LdaModel {
  LdaConfig config;
  int32_t vocab_size = 0;
  std::vector<std::string> doc_ids;
  std::vector<std::vector<double>> phi;    // K x V topic-word probabilities
  std::vector<std::vector<double>> theta;  // D x K document-topic probabilities
  std::vector<std::vector<int32_t>> z;     // per-document token topic assignments
  std::vector<std::vector<int32_t>> n_dk;  // D x K topic counts
  std::vector<std::vector<int32_t>> n_kv;  // K x V word counts
  std::vector<int64_t> n_k;                // per-topic token totals
  std::vector<int64_t> doc_tokens;         // per-document token totals

  int32_t num_topics() const { return config.topics; }
  size_t num_docs() const { return doc_ids.size(); }
};

namespace detail {

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int32_t uniform_int(std::mt19937_64& rng, int32_t bound) {
  return static_cast<int32_t>((static_cast<__uint128_t>(rng()) *
                               static_cast<__uint128_t>(bound)) >> 64);
}

/// Token instances per document: BoW counts expanded in ascending term-id
/// order, which keeps training independent of original text order.
inline std::vector<std::vector<int32_t>> expand_tokens(const std::vector<BowDoc>& docs) {
  std::vector<std::vector<int32_t>> words(docs.size());
  for (size_t d = 0; d < docs.size(); ++d) {
    words[d].reserve(static_cast<size_t>(docs[d].total_tokens));
    for (auto [term, count] : docs[d].counts)
      for (int32_t c = 0; c < count; ++c) words[d].push_back(term);
  }
  return words;
}

}  // namespace detail

using SweepObserver = std::function<void(int32_t sweep, const LdaModel& state)>;

/// Collapsed Gibbs sampling. Bit-reproducible for a fixed seed and input
/// order. phi/theta are averages of smoothed count snapshots taken every
/// sample_interval sweeps after burn-in (the first post-burn-in sweep is
/// always a snapshot).
inline LdaModel train_lda(const BowCorpus& corpus, const LdaConfig& config,
                          const SweepObserver& observer = nullptr) {
  config.validate();
  const int32_t K = config.topics;
  const int32_t V = corpus.vocab.size();
  if (V < 1) throw ConfigError("lda: empty vocabulary");
  const double alpha = config.effective_alpha();
  const double beta = config.beta;

  int64_t total_tokens = 0;
  for (const auto& d : corpus.docs) total_tokens += d.total_tokens;
  if (total_tokens == 0) throw ConfigError("lda: no tokens to model");
  if (K > V) warn("lda: K=%d exceeds vocabulary size %d", K, V);

  LdaModel m;
  m.config = config;
  m.config.alpha = alpha;
  m.vocab_size = V;
  const size_t D = corpus.docs.size();
  m.doc_ids.reserve(D);
  for (const auto& d : corpus.docs) m.doc_ids.push_back(d.doc_id);
  std::vector<std::vector<int32_t>> words = detail::expand_tokens(corpus.docs);

  m.n_dk.assign(D, std::vector<int32_t>(static_cast<size_t>(K), 0));
  m.n_kv.assign(static_cast<size_t>(K), std::vector<int32_t>(static_cast<size_t>(V), 0));
  m.n_k.assign(static_cast<size_t>(K), 0);
  m.doc_tokens.assign(D, 0);
  m.z.resize(D);

  std::mt19937_64 rng(config.seed);
  for (size_t d = 0; d < D; ++d) {
    m.doc_tokens[d] = corpus.docs[d].total_tokens;
    m.z[d].resize(words[d].size());
    for (size_t i = 0; i < words[d].size(); ++i) {
      int32_t k = detail::uniform_int(rng, K);
      m.z[d][i] = k;
      ++m.n_dk[d][static_cast<size_t>(k)];
      ++m.n_kv[static_cast<size_t>(k)][static_cast<size_t>(words[d][i])];
      ++m.n_k[static_cast<size_t>(k)];
    }
  }

  std::vector<double> weight(static_cast<size_t>(K));
  std::vector<std::vector<double>> phi_acc(static_cast<size_t>(K),
                                           std::vector<double>(static_cast<size_t>(V), 0.0));
  std::vector<std::vector<double>> theta_acc(D, std::vector<double>(static_cast<size_t>(K), 0.0));
  int64_t snapshots = 0;
  const double v_beta = V * beta;

  for (int32_t sweep = 1; sweep <= config.iterations; ++sweep) {
    for (size_t d = 0; d < D; ++d) {
      auto& zd = m.z[d];
      auto& ndk = m.n_dk[d];
      const auto& wd = words[d];
      for (size_t i = 0; i < wd.size(); ++i) {
        const int32_t w = wd[i];
        const int32_t old_k = zd[i];
        --ndk[static_cast<size_t>(old_k)];
        --m.n_kv[static_cast<size_t>(old_k)][static_cast<size_t>(w)];
        --m.n_k[static_cast<size_t>(old_k)];

        double total = 0.0;
        for (int32_t k = 0; k < K; ++k) {
          double p = (ndk[static_cast<size_t>(k)] + alpha) *
                     (m.n_kv[static_cast<size_t>(k)][static_cast<size_t>(w)] + beta) /
                     (static_cast<double>(m.n_k[static_cast<size_t>(k)]) + v_beta);
          total += p;
          weight[static_cast<size_t>(k)] = total;
        }
        const double u = detail::uniform01(rng) * total;
        int32_t new_k = 0;
        while (new_k < K - 1 && weight[static_cast<size_t>(new_k)] <= u) ++new_k;

        zd[i] = new_k;
        ++ndk[static_cast<size_t>(new_k)];
        ++m.n_kv[static_cast<size_t>(new_k)][static_cast<size_t>(w)];
        ++m.n_k[static_cast<size_t>(new_k)];
      }
    }

    if (sweep > config.burn_in && (sweep - config.burn_in - 1) % config.sample_interval == 0) {
      ++snapshots;
      for (int32_t k = 0; k < K; ++k) {
        const double denom = static_cast<double>(m.n_k[static_cast<size_t>(k)]) + v_beta;
        auto& acc = phi_acc[static_cast<size_t>(k)];
        const auto& nk = m.n_kv[static_cast<size_t>(k)];
        for (int32_t v = 0; v < V; ++v)
          acc[static_cast<size_t>(v)] += (nk[static_cast<size_t>(v)] + beta) / denom;
      }
      for (size_t d = 0; d < D; ++d) {
        const double denom = static_cast<double>(m.doc_tokens[d]) + K * alpha;
        for (int32_t k = 0; k < K; ++k)
          theta_acc[d][static_cast<size_t>(k)] +=
              (m.n_dk[d][static_cast<size_t>(k)] + alpha) / denom;
      }
    }
    if (observer) observer(sweep, m);
  }

  m.phi.assign(static_cast<size_t>(K), std::vector<double>(static_cast<size_t>(V), 0.0));
  m.theta.assign(D, std::vector<double>(static_cast<size_t>(K), 0.0));
  for (int32_t k = 0; k < K; ++k)
    for (int32_t v = 0; v < V; ++v)
      m.phi[static_cast<size_t>(k)][static_cast<size_t>(v)] =
          phi_acc[static_cast<size_t>(k)][static_cast<size_t>(v)] / static_cast<double>(snapshots);
  for (size_t d = 0; d < D; ++d)
    for (int32_t k = 0; k < K; ++k)
      m.theta[d][static_cast<size_t>(k)] =
          theta_acc[d][static_cast<size_t>(k)] / static_cast<double>(snapshots);
  return m;
}

/// Top-n terms of topic k by phi, ties broken by ascending term id.
inline std::vector<int32_t> top_keywords(const LdaModel& model, int32_t k, int32_t n) {
  if (k < 0 || k >= model.num_topics()) throw ConfigError("top_keywords: topic id out of range");
  const auto& row = model.phi[static_cast<size_t>(k)];
  std::vector<int32_t> ids(row.size());
  for (size_t v = 0; v < row.size(); ++v) ids[v] = static_cast<int32_t>(v);
  std::stable_sort(ids.begin(), ids.end(), [&](int32_t a, int32_t b) {
    return row[static_cast<size_t>(a)] > row[static_cast<size_t>(b)];
  });
  if (n < 0) n = 0;
  if (static_cast<size_t>(n) < ids.size()) ids.resize(static_cast<size_t>(n));
  return ids;
}

/// Main topic of a document: argmax over raw assignment counts n_dk, ties to
/// the lowest topic id. Empty documents have no main topic.
inline int32_t main_topic(const LdaModel& model, size_t doc_index) {
  const auto& row = model.n_dk.at(doc_index);
  if (model.doc_tokens.at(doc_index) == 0) return kNoMainTopic;
  int32_t best = 0;
  for (int32_t k = 1; k < model.num_topics(); ++k)
    if (row[static_cast<size_t>(k)] > row[static_cast<size_t>(best)]) best = k;
  return best;
}

inline std::optional<size_t> doc_index_of(const LdaModel& model, const std::string& doc_id) {
  for (size_t d = 0; d < model.doc_ids.size(); ++d)
    if (model.doc_ids[d] == doc_id) return d;
  return std::nullopt;
}

/// exp(-(sum_d sum_w count * log sum_k theta_dk phi_kw) / N).
inline double perplexity(const LdaModel& model, const std::vector<BowDoc>& docs) {
  double log_lik = 0.0;
  int64_t tokens = 0;
  for (size_t d = 0; d < docs.size(); ++d) {
    const auto& theta_d = model.theta.at(d);
    for (auto [w, count] : docs[d].counts) {
      double p = 0.0;
      for (int32_t k = 0; k < model.num_topics(); ++k)
        p += theta_d[static_cast<size_t>(k)] *
             model.phi[static_cast<size_t>(k)][static_cast<size_t>(w)];
      if (!(p > 0.0)) throw std::logic_error("perplexity: zero token probability despite beta > 0");
      log_lik += count * std::log(p);
      tokens += count;
    }
  }
  if (tokens == 0) throw ConfigError("perplexity: no tokens");
  return std::exp(-log_lik / static_cast<double>(tokens));
}

// ---------------------------------------------------------------------------
// K sweep

struct SweepRecord {
  int32_t K = 0;
  bool failed = false;
  std::string error;
  double coherence_cv = 0.0;
  double coherence_umass = 0.0;
  double perplexity = 0.0;
  double wallclock_s = 0.0;
  std::optional<LdaModel> model;
};

/// Returns the reference corpus used for coherence: BoW documents expanded
/// to token sequences (ascending term-id order).
inline std::vector<std::vector<int32_t>> coherence_reference_docs(const std::vector<BowDoc>& docs) {
  return detail::expand_tokens(docs);
}

inline std::vector<std::vector<int32_t>> model_top_words(const LdaModel& model, int32_t top_n) {
  std::vector<std::vector<int32_t>> topics;
  for (int32_t k = 0; k < model.num_topics(); ++k) topics.push_back(top_keywords(model, k, top_n));
  return topics;
}

/// Trains one model per K (seed + K each), scoring coherence and perplexity.
/// Per-K failures are recorded and do not abort the sweep.
inline std::vector<SweepRecord> sweep_topics(const BowCorpus& corpus,
                                             const std::vector<int32_t>& k_range,
                                             const LdaConfig& base_config,
                                             const CoherenceConfig& coherence_config = {},
                                             unsigned threads = std::thread::hardware_concurrency(),
                                             bool keep_models = false) {
  if (k_range.empty()) throw ConfigError("sweep: K range must not be empty");
  auto reference = coherence_reference_docs(corpus.docs);

  auto run_one = [&](int32_t K) -> SweepRecord {
    SweepRecord rec;
    rec.K = K;
    auto start = std::chrono::steady_clock::now();
    try {
      LdaConfig cfg = base_config;
      cfg.topics = K;
      cfg.alpha = base_config.alpha;  // 0 keeps the 50/K rule per K
      cfg.seed = base_config.seed + static_cast<uint64_t>(K);
      LdaModel model = train_lda(corpus, cfg);
      auto topics = model_top_words(model, coherence_config.top_n);
      rec.coherence_cv = coherence_cv(topics, reference, coherence_config).mean;
      rec.coherence_umass = coherence_umass(topics, reference).mean;
      rec.perplexity = perplexity(model, corpus.docs);
      if (keep_models) rec.model = std::move(model);
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
      warn("sweep: K=%d failed: %s", K, e.what());
    }
    rec.wallclock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
  };

  std::vector<SweepRecord> records(k_range.size());
  if (threads <= 1 || k_range.size() == 1) {
    for (size_t i = 0; i < k_range.size(); ++i) records[i] = run_one(k_range[i]);
    return records;
  }
  size_t next = 0;
  std::mutex mu;
  auto worker = [&]() {
    while (true) {
      size_t i;
      {
        std::scoped_lock lock(mu);
        if (next >= k_range.size()) return;
        i = next++;
      }
      records[i] = run_one(k_range[i]);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<size_t>(threads, k_range.size()); ++t)
    pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return records;
}

inline std::string sweep_to_csv(const std::vector<SweepRecord>& records) {
  CsvWriter csv;
  csv.row({"K", "coherence_cv", "coherence_umass", "perplexity", "wallclock_s", "status"});
  for (const auto& r : records) {
    if (r.failed) {
      csv.row({std::to_string(r.K), "", "", "", format_double(r.wallclock_s), "failed"});
    } else {
      csv.row({std::to_string(r.K), format_double(r.coherence_cv),
               format_double(r.coherence_umass), format_double(r.perplexity),
               format_double(r.wallclock_s), "ok"});
    }
  }
  return csv.str();
}

// ---------------------------------------------------------------------------
// Model artifact

inline nlohmann::json model_to_json(const LdaModel& m, const std::string& vocab_hash) {
  nlohmann::json j;
  j["config"] = {{"topics", m.config.topics},       {"alpha", m.config.alpha},
                 {"beta", m.config.beta},           {"iterations", m.config.iterations},
                 {"burn_in", m.config.burn_in},     {"sample_interval", m.config.sample_interval},
                 {"seed", m.config.seed}};
  j["vocab_size"] = m.vocab_size;
  j["vocab_hash"] = vocab_hash;
  j["doc_ids"] = m.doc_ids;
  j["doc_tokens"] = m.doc_tokens;
  j["phi"] = m.phi;
  j["theta"] = m.theta;
  j["n_dk"] = m.n_dk;
  return j;
}

inline LdaModel model_from_json(const nlohmann::json& j) {
  LdaModel m;
  const auto& c = j.at("config");
  m.config.topics = c.at("topics").get<int32_t>();
  m.config.alpha = c.at("alpha").get<double>();
  m.config.beta = c.at("beta").get<double>();
  m.config.iterations = c.at("iterations").get<int32_t>();
  m.config.burn_in = c.at("burn_in").get<int32_t>();
  m.config.sample_interval = c.at("sample_interval").get<int32_t>();
  m.config.seed = c.at("seed").get<uint64_t>();
  m.vocab_size = j.at("vocab_size").get<int32_t>();
  m.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
  m.doc_tokens = j.at("doc_tokens").get<std::vector<int64_t>>();
  m.phi = j.at("phi").get<std::vector<std::vector<double>>>();
  m.theta = j.at("theta").get<std::vector<std::vector<double>>>();
  m.n_dk = j.at("n_dk").get<std::vector<std::vector<int32_t>>>();
  return m;
}

/// doc_topics.csv: doc_id, main_topic ('' when none), top-3 theta entries.
inline std::string doc_topics_to_csv(const LdaModel& m) {
  CsvWriter csv;
  csv.row({"doc_id", "main_topic", "top1_topic", "top1_prop", "top2_topic", "top2_prop",
           "top3_topic", "top3_prop"});
  for (size_t d = 0; d < m.num_docs(); ++d) {
    int32_t main_k = main_topic(m, d);
    std::vector<int32_t> ks(static_cast<size_t>(m.num_topics()));
    for (int32_t k = 0; k < m.num_topics(); ++k) ks[static_cast<size_t>(k)] = k;
    std::stable_sort(ks.begin(), ks.end(), [&](int32_t a, int32_t b) {
      return m.theta[d][static_cast<size_t>(a)] > m.theta[d][static_cast<size_t>(b)];
    });
    std::vector<std::string> fields;
    fields.push_back(m.doc_ids[d]);
    fields.push_back(main_k == kNoMainTopic ? "" : std::to_string(main_k));
    for (size_t r = 0; r < 3; ++r) {
      if (r < ks.size() && m.doc_tokens[d] > 0) {
        fields.push_back(std::to_string(ks[r]));
        fields.push_back(format_double(m.theta[d][static_cast<size_t>(ks[r])]));
      } else {
        fields.push_back("");
        fields.push_back("");
      }
    }
    std::vector<std::string_view> views(fields.begin(), fields.end());
    csv.row(views);
  }
  return csv.str();
}

}  // namespace opinion
