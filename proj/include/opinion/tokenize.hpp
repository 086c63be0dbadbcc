// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <csignal>
#include <cstring>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "opinion/common.hpp"
#include "opinion/csv.hpp"
#include "opinion/unicode.hpp"

namespace opinion {

enum class Pos : uint8_t { Noun, Other };

inline const char* pos_name(Pos p) { return p == Pos::Noun ? "NOUN" : "OTHER"; }

struct Token {
  std::string surface;
  std::string normalized;
  Pos pos = Pos::Other;

  bool operator==(const Token&) const = default;
};

class TokenizerPlugin {
public:
  virtual ~TokenizerPlugin() = default;
  /// Tokens in surface order; longest-match segmentation with normalized
  /// forms (compound terms kept whole when the dictionary knows them).
  virtual std::vector<Token> tokenize(std::string_view text) const = 0;
};

// ---------------------------------------------------------------------------
// Built-in baseline tokenizer
//
// Unicode-script segmentation plus a user dictionary for longest-match
// compounds. Han and katakana runs are treated as nouns; hiragana runs
// (mostly particles and inflections) and everything else are not.

class BuiltinTokenizer : public TokenizerPlugin {
public:
  BuiltinTokenizer() = default;

  void add_dictionary_entry(std::string_view surface, std::string_view normalized = {}) {
    std::u32string key = to_u32(nfkc(surface));
    if (key.empty()) return;
    std::string norm = normalized.empty() ? nfkc(surface) : nfkc(normalized);
    dict_[key] = std::move(norm);
    max_entry_len_ = std::max(max_entry_len_, key.size());
  }

  /// TSV: surface[<TAB>normalized] per line; '#' lines are comments.
  void load_dictionary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open user dictionary: " + path.string());
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      size_t tab = line.find('\t');
      if (tab == std::string::npos)
        add_dictionary_entry(line);
      else
        add_dictionary_entry(line.substr(0, tab), line.substr(tab + 1));
    }
  }

  std::vector<Token> tokenize(std::string_view text) const override {
    std::vector<Token> tokens;
    std::u32string cps = to_u32(std::string(text));
    size_t i = 0;
    const size_t n = cps.size();
    while (i < n) {
      if (is_space(cps[i])) {
        ++i;
        continue;
      }
      if (size_t len = longest_match(cps, i); len > 0) {
        std::string surface = from_u32(cps.substr(i, len));
        tokens.push_back({surface, dict_.at(cps.substr(i, len)), Pos::Noun});
        i += len;
        continue;
      }
      Script cls = run_class(cps[i]);
      size_t j = i + 1;
      while (j < n && !is_space(cps[j]) && run_class(cps[j]) == cls && longest_match(cps, j) == 0)
        ++j;
      std::string surface = from_u32(cps.substr(i, j - i));
      Pos pos = (cls == Script::Han || cls == Script::Katakana) ? Pos::Noun : Pos::Other;
      tokens.push_back({surface, fold_latin(nfkc(surface)), pos});
      i = j;
    }
    return tokens;
  }

private:
  static std::u32string to_u32(std::string_view s) {
    std::u32string out;
    size_t i = 0;
    while (i < s.size()) out += utf8_next(s, i);
    return out;
  }

  static std::string from_u32(const std::u32string& s) {
    std::string out;
    for (CodePoint cp : s) utf8_append(out, cp);
    return out;
  }

  static Script run_class(CodePoint cp) {
    Script s = script_of(cp);
    if (s == Script::Digit) return Script::Latin;  // alnum runs stay together
    return s;
  }

  size_t longest_match(const std::u32string& cps, size_t i) const {
    if (dict_.empty()) return 0;
    size_t cap = std::min(max_entry_len_, cps.size() - i);
    for (size_t len = cap; len >= 1; --len) {
      if (dict_.contains(cps.substr(i, len))) return len;
    }
    return 0;
  }

  std::map<std::u32string, std::string> dict_;
  size_t max_entry_len_ = 0;
};

// ---------------------------------------------------------------------------
// External tokenizer subprocess
//
// Line protocol: stdin {"text": str} -> stdout {"tokens":[{"surface":str,
// "normalized":str,"pos":str}]}. The child is spawned once and reused;
// access is serialized. Child stderr goes to a temp file and is surfaced
// on failure.

class SubprocessTokenizer : public TokenizerPlugin {
public:
  explicit SubprocessTokenizer(std::string command) : command_(std::move(command)) {
    std::signal(SIGPIPE, SIG_IGN);
    spawn();
  }

  SubprocessTokenizer(const SubprocessTokenizer&) = delete;
  SubprocessTokenizer& operator=(const SubprocessTokenizer&) = delete;

  ~SubprocessTokenizer() override { shutdown(); }

  std::vector<Token> tokenize(std::string_view text) const override {
    std::scoped_lock lock(mutex_);
    nlohmann::json req = {{"text", std::string(text)}};
    std::string line = req.dump();
    line += '\n';
    if (!write_all(line)) fail("tokenizer subprocess stdin closed");
    std::string response;
    if (!read_line(response)) fail("tokenizer subprocess produced no output");
    nlohmann::json j = nlohmann::json::parse(response, nullptr, false);
    if (j.is_discarded() || !j.contains("tokens") || !j["tokens"].is_array())
      fail("tokenizer subprocess emitted malformed JSON");
    std::vector<Token> tokens;
    for (const auto& t : j["tokens"]) {
      Token tok;
      tok.surface = t.value("surface", "");
      tok.normalized = t.value("normalized", tok.surface);
      tok.pos = t.value("pos", "OTHER") == "NOUN" ? Pos::Noun : Pos::Other;
      if (tok.normalized.empty()) continue;
      tokens.push_back(std::move(tok));
    }
    return tokens;
  }

private:
  void spawn() {
    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
      throw IoError("cannot create tokenizer pipes");
    stderr_path_ = std::filesystem::temp_directory_path() /
                   ("opinion-tokenizer-" + std::to_string(::getpid()) + "-" +
                    std::to_string(reinterpret_cast<uintptr_t>(this)) + ".log");
    pid_ = fork();
    if (pid_ < 0) throw IoError("fork failed for tokenizer subprocess");
    if (pid_ == 0) {
      dup2(in_pipe[0], STDIN_FILENO);
      dup2(out_pipe[1], STDOUT_FILENO);
      FILE* err = std::fopen(stderr_path_.c_str(), "w");
      if (err) dup2(fileno(err), STDERR_FILENO);
      close(in_pipe[0]);
      close(in_pipe[1]);
      close(out_pipe[0]);
      close(out_pipe[1]);
      execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    stdin_fd_ = in_pipe[1];
    stdout_fd_ = out_pipe[0];
  }

  void shutdown() {
    if (stdin_fd_ >= 0) close(stdin_fd_);
    if (stdout_fd_ >= 0) close(stdout_fd_);
    stdin_fd_ = stdout_fd_ = -1;
    if (pid_ > 0) {
      int status = 0;
      waitpid(pid_, &status, 0);
      pid_ = -1;
    }
    std::error_code ec;
    std::filesystem::remove(stderr_path_, ec);
  }

  bool write_all(std::string_view data) const {
    size_t off = 0;
    while (off < data.size()) {
      ssize_t n = ::write(stdin_fd_, data.data() + off, data.size() - off);
      if (n <= 0) return false;
      off += static_cast<size_t>(n);
    }
    return true;
  }

  bool read_line(std::string& out) const {
    out.clear();
    char c;
    while (true) {
      ssize_t n = ::read(stdout_fd_, &c, 1);
      if (n <= 0) return !out.empty();
      if (c == '\n') return true;
      out += c;
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    std::string stderr_tail;
    std::ifstream err(stderr_path_);
    if (err) {
      std::ostringstream ss;
      ss << err.rdbuf();
      stderr_tail = ss.str();
      if (stderr_tail.size() > 2000) stderr_tail = stderr_tail.substr(stderr_tail.size() - 2000);
    }
    throw IoError(what + " (command: " + command_ + ")" +
                  (stderr_tail.empty() ? "" : "\nstderr:\n" + stderr_tail));
  }

  std::string command_;
  std::filesystem::path stderr_path_;
  pid_t pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  mutable std::mutex mutex_;
};

// ---------------------------------------------------------------------------
// Vocabulary and bag-of-words

class Vocabulary {
public:
  int32_t add(const std::string& term) {
    auto it = index_.find(term);
    if (it != index_.end()) return it->second;
    int32_t id = static_cast<int32_t>(terms_.size());
    index_.emplace(term, id);
    terms_.push_back(term);
    doc_freq_.push_back(0);
    corpus_freq_.push_back(0);
    return id;
  }

  std::optional<int32_t> id_of(const std::string& term) const {
    auto it = index_.find(term);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& term_of(int32_t id) const { return terms_.at(static_cast<size_t>(id)); }
  int32_t size() const { return static_cast<int32_t>(terms_.size()); }

  int64_t doc_freq(int32_t id) const { return doc_freq_.at(static_cast<size_t>(id)); }
  int64_t corpus_freq(int32_t id) const { return corpus_freq_.at(static_cast<size_t>(id)); }

  void set_freqs(int32_t id, int64_t doc_freq, int64_t corpus_freq) {
    doc_freq_[static_cast<size_t>(id)] = doc_freq;
    corpus_freq_[static_cast<size_t>(id)] = corpus_freq;
  }

private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, int32_t> index_;
  std::vector<int64_t> doc_freq_;
  std::vector<int64_t> corpus_freq_;
};

struct BowDoc {
  std::string doc_id;
  std::vector<std::pair<int32_t, int32_t>> counts;  // (term id, count), sorted by id
  int64_t total_tokens = 0;
};

struct BowCorpus {
  Vocabulary vocab;
  std::vector<BowDoc> docs;
  std::vector<std::string> empty_doc_ids;  // retained but excluded from training
};

struct BowOptions {
  std::set<Pos> keep_pos = {Pos::Noun};
  int64_t min_corpus_count = 1;
  std::unordered_set<std::string> stopwords;
  unsigned threads = std::thread::hardware_concurrency();
};

/// Builds the vocabulary (ids in first-occurrence order) and sparse counts.
/// Documents that end up empty are retained with empty counts and reported.
inline BowCorpus build_bow(const std::vector<std::pair<std::string, std::string>>& docs,
                           const TokenizerPlugin& tokenizer, const BowOptions& options = {}) {
  if (options.min_corpus_count < 1) throw ConfigError("min_corpus_count must be >= 1");

  // Tokenize (parallel when the plugin allows it), then fold in doc order.
  std::vector<std::vector<std::string>> doc_terms(docs.size());
  const bool parallel =
      options.threads > 1 && dynamic_cast<const SubprocessTokenizer*>(&tokenizer) == nullptr;
  auto tokenize_range = [&](size_t begin, size_t end) {
    for (size_t d = begin; d < end; ++d) {
      for (const Token& t : tokenizer.tokenize(docs[d].second)) {
        if (!options.keep_pos.contains(t.pos)) continue;
        if (t.normalized.empty() || options.stopwords.contains(t.normalized)) continue;
        doc_terms[d].push_back(t.normalized);
      }
    }
  };
  if (parallel && docs.size() > 1) {
    size_t nthreads = std::min<size_t>(options.threads, docs.size());
    std::vector<std::future<void>> futures;
    size_t chunk = (docs.size() + nthreads - 1) / nthreads;
    for (size_t t = 0; t < nthreads; ++t) {
      size_t begin = t * chunk, end = std::min(docs.size(), begin + chunk);
      if (begin >= end) break;
      futures.push_back(std::async(std::launch::async, tokenize_range, begin, end));
    }
    for (auto& f : futures) f.get();
  } else {
    tokenize_range(0, docs.size());
  }

  // First pass: raw vocabulary in first-occurrence order with frequencies.
  Vocabulary raw;
  std::vector<int64_t> raw_corpus_freq, raw_doc_freq;
  for (const auto& terms : doc_terms) {
    std::unordered_set<int32_t> seen;
    for (const auto& term : terms) {
      int32_t id = raw.add(term);
      if (static_cast<size_t>(id) >= raw_corpus_freq.size()) {
        raw_corpus_freq.push_back(0);
        raw_doc_freq.push_back(0);
      }
      ++raw_corpus_freq[static_cast<size_t>(id)];
      if (seen.insert(id).second) ++raw_doc_freq[static_cast<size_t>(id)];
    }
  }

  // Prune rare terms, re-index survivors preserving first-occurrence order.
  BowCorpus out;
  std::vector<int32_t> remap(raw_corpus_freq.size(), -1);
  for (int32_t id = 0; id < raw.size(); ++id) {
    if (raw_corpus_freq[static_cast<size_t>(id)] >= options.min_corpus_count) {
      int32_t new_id = out.vocab.add(raw.term_of(id));
      out.vocab.set_freqs(new_id, raw_doc_freq[static_cast<size_t>(id)],
                          raw_corpus_freq[static_cast<size_t>(id)]);
      remap[static_cast<size_t>(id)] = new_id;
    }
  }

  for (size_t d = 0; d < docs.size(); ++d) {
    std::map<int32_t, int32_t> counts;
    for (const auto& term : doc_terms[d]) {
      int32_t raw_id = *raw.id_of(term);
      int32_t id = remap[static_cast<size_t>(raw_id)];
      if (id >= 0) ++counts[id];
    }
    BowDoc doc;
    doc.doc_id = docs[d].first;
    for (auto [id, n] : counts) {
      doc.counts.emplace_back(id, n);
      doc.total_tokens += n;
    }
    if (doc.counts.empty()) out.empty_doc_ids.push_back(doc.doc_id);
    out.docs.push_back(std::move(doc));
  }

  size_t non_empty = out.docs.size() - out.empty_doc_ids.size();
  if (non_empty == 0) throw ConfigError("bag-of-words construction left no non-empty documents");
  for (const auto& id : out.empty_doc_ids)
    warn("document %s is empty after token filtering", id.c_str());
  return out;
}

// ---------------------------------------------------------------------------
// Artifact formats

inline std::string vocab_to_tsv(const Vocabulary& vocab) {
  std::string out = "id\tterm\tdoc_freq\tcorpus_freq\n";
  for (int32_t id = 0; id < vocab.size(); ++id) {
    out += std::to_string(id);
    out += '\t';
    out += vocab.term_of(id);
    out += '\t';
    out += std::to_string(vocab.doc_freq(id));
    out += '\t';
    out += std::to_string(vocab.corpus_freq(id));
    out += '\n';
  }
  return out;
}

inline Vocabulary vocab_from_tsv(const std::string& text) {
  Vocabulary vocab;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string id_s, term, df_s, cf_s;
    if (!std::getline(ls, id_s, '\t') || !std::getline(ls, term, '\t') ||
        !std::getline(ls, df_s, '\t') || !std::getline(ls, cf_s, '\t'))
      throw ParseError("malformed vocab.tsv line", line);
    int32_t id = vocab.add(term);
    if (id != std::stoi(id_s)) throw ParseError("vocab.tsv ids must be contiguous from 0", line);
    vocab.set_freqs(id, std::stoll(df_s), std::stoll(cf_s));
  }
  return vocab;
}

inline std::string bow_to_jsonl(const std::vector<BowDoc>& docs) {
  std::string out;
  for (const auto& d : docs) {
    nlohmann::json counts = nlohmann::json::object();
    for (auto [id, n] : d.counts) counts[std::to_string(id)] = n;
    nlohmann::json j = {{"doc_id", d.doc_id}, {"counts", counts}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

inline std::vector<BowDoc> bow_from_jsonl(const std::string& text, int32_t vocab_size) {
  std::vector<BowDoc> docs;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("doc_id") || !j.contains("counts"))
      throw ParseError("malformed bow.jsonl line " + std::to_string(line_no), line);
    BowDoc d;
    d.doc_id = j["doc_id"].get<std::string>();
    for (auto it = j["counts"].begin(); it != j["counts"].end(); ++it) {
      int32_t id = std::stoi(it.key());
      int32_t n = it.value().get<int32_t>();
      if (id < 0 || id >= vocab_size)
        throw ParseError("bow.jsonl term id out of vocabulary range", line);
      if (n < 1) throw ParseError("bow.jsonl counts must be positive", line);
      d.counts.emplace_back(id, n);
      d.total_tokens += n;
    }
    std::sort(d.counts.begin(), d.counts.end());
    docs.push_back(std::move(d));
  }
  return docs;
}

/// term,corpus_freq rows sorted by frequency (desc), then first occurrence.
inline std::string freq_to_csv(const Vocabulary& vocab) {
  std::vector<int32_t> ids(static_cast<size_t>(vocab.size()));
  for (int32_t i = 0; i < vocab.size(); ++i) ids[static_cast<size_t>(i)] = i;
  std::stable_sort(ids.begin(), ids.end(), [&](int32_t a, int32_t b) {
    return vocab.corpus_freq(a) > vocab.corpus_freq(b);
  });
  CsvWriter csv;
  csv.row({"term", "corpus_freq"});
  for (int32_t id : ids) csv.row({vocab.term_of(id), std::to_string(vocab.corpus_freq(id))});
  return csv.str();
}

}  // namespace opinion
