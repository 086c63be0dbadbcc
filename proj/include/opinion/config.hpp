// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opinion/coherence.hpp"
#include "opinion/common.hpp"
#include "opinion/corpus.hpp"
#include "opinion/lda.hpp"
#include "opinion/llm.hpp"
#include "opinion/timeutil.hpp"
#include "opinion/toml.hpp"

namespace opinion {

struct PipelineConfig {
  // [paths]
  std::string videos = "videos.jsonl";
  std::string comments = "comments.jsonl";
  std::string lexicon = "lexicon.tsv";
  std::string output_dir = "out";

  // [filter] — inline rules, or a separate rules file which wins when set
  FilterRules rules;
  std::string rules_file;
  double language_threshold = 0.3;

  // [tokenizer]
  std::string tokenizer_kind = "builtin";  // builtin | subprocess
  std::string tokenizer_command;
  std::string user_dict;
  std::string stopwords;

  // [bow]
  int64_t min_corpus_count = 1;

  // [lda]
  LdaConfig lda;

  // [sweep]
  int32_t sweep_k_min = 2;
  int32_t sweep_k_max = 20;

  // [coherence]
  CoherenceConfig coherence;

  // [llm]
  std::string llm_endpoint;
  std::string llm_model = "gpt-4o-2024-08-06";
  std::string llm_prompt_mode = "few_shot";  // zero_shot | few_shot
  int64_t llm_seed = 42;
  int32_t llm_max_in_flight = 4;
  std::string llm_cache_dir;
  std::string few_shot_file;  // JSON [{"text":..., "label":...} x6]; empty = defaults

  // [aggregate]
  std::string date_floor = "2019-10-01";
  bool aggregate_all_comments = true;  // include comments on videos without a main topic

  // [cooccur] — node_min_freq deliberately has no default; required per run
  int64_t node_min_freq = 0;
  std::string cooccur_labels;  // optional display-name TSV

  bool operator==(const PipelineConfig&) const = default;
};

inline std::string serialize_config(const PipelineConfig& c) {
  std::string out;
  auto str_array = [](const std::vector<std::string>& v) {
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      s += toml::escape(v[i]);
    }
    s += "]";
    return s;
  };
  out += "[paths]\n";
  out += "videos = " + toml::escape(c.videos) + "\n";
  out += "comments = " + toml::escape(c.comments) + "\n";
  out += "lexicon = " + toml::escape(c.lexicon) + "\n";
  out += "output_dir = " + toml::escape(c.output_dir) + "\n\n";
  out += "[filter]\n";
  out += "required_any = " + str_array(c.rules.required_any) + "\n";
  out += "excluded_any = " + str_array(c.rules.excluded_any) + "\n";
  out += "rules_file = " + toml::escape(c.rules_file) + "\n";
  out += "language_threshold = " + format_double(c.language_threshold, "%.17g") + "\n\n";
  out += "[tokenizer]\n";
  out += "kind = " + toml::escape(c.tokenizer_kind) + "\n";
  out += "command = " + toml::escape(c.tokenizer_command) + "\n";
  out += "user_dict = " + toml::escape(c.user_dict) + "\n";
  out += "stopwords = " + toml::escape(c.stopwords) + "\n\n";
  out += "[bow]\n";
  out += "min_corpus_count = " + std::to_string(c.min_corpus_count) + "\n\n";
  out += "[lda]\n";
  out += "topics = " + std::to_string(c.lda.topics) + "\n";
  out += "alpha = " + format_double(c.lda.alpha, "%.17g") + "\n";
  out += "beta = " + format_double(c.lda.beta, "%.17g") + "\n";
  out += "iterations = " + std::to_string(c.lda.iterations) + "\n";
  out += "burn_in = " + std::to_string(c.lda.burn_in) + "\n";
  out += "sample_interval = " + std::to_string(c.lda.sample_interval) + "\n";
  out += "seed = " + std::to_string(c.lda.seed) + "\n\n";
  out += "[sweep]\n";
  out += "k_min = " + std::to_string(c.sweep_k_min) + "\n";
  out += "k_max = " + std::to_string(c.sweep_k_max) + "\n\n";
  out += "[coherence]\n";
  out += "top_n = " + std::to_string(c.coherence.top_n) + "\n";
  out += "window = " + std::to_string(c.coherence.window) + "\n";
  out += "epsilon = " + format_double(c.coherence.epsilon, "%.17g") + "\n\n";
  out += "[llm]\n";
  out += "endpoint = " + toml::escape(c.llm_endpoint) + "\n";
  out += "model = " + toml::escape(c.llm_model) + "\n";
  out += "prompt_mode = " + toml::escape(c.llm_prompt_mode) + "\n";
  out += "seed = " + std::to_string(c.llm_seed) + "\n";
  out += "max_in_flight = " + std::to_string(c.llm_max_in_flight) + "\n";
  out += "cache_dir = " + toml::escape(c.llm_cache_dir) + "\n";
  out += "few_shot_file = " + toml::escape(c.few_shot_file) + "\n\n";
  out += "[aggregate]\n";
  out += "date_floor = " + toml::escape(c.date_floor) + "\n";
  out += std::string("all_comments = ") + (c.aggregate_all_comments ? "true" : "false") + "\n\n";
  out += "[cooccur]\n";
  out += "node_min_freq = " + std::to_string(c.node_min_freq) + "\n";
  out += "labels = " + toml::escape(c.cooccur_labels) + "\n";
  return out;
}

inline PipelineConfig parse_config(const std::string& text) {
  toml::Table t = toml::parse(text);
  PipelineConfig c;
  c.videos = toml::get_or<std::string>(t, "paths.videos", c.videos);
  c.comments = toml::get_or<std::string>(t, "paths.comments", c.comments);
  c.lexicon = toml::get_or<std::string>(t, "paths.lexicon", c.lexicon);
  c.output_dir = toml::get_or<std::string>(t, "paths.output_dir", c.output_dir);
  c.rules.required_any =
      toml::get_or<std::vector<std::string>>(t, "filter.required_any", {});
  c.rules.excluded_any =
      toml::get_or<std::vector<std::string>>(t, "filter.excluded_any", {});
  c.rules_file = toml::get_or<std::string>(t, "filter.rules_file", "");
  c.language_threshold = toml::get_or<double>(t, "filter.language_threshold", 0.3);
  c.tokenizer_kind = toml::get_or<std::string>(t, "tokenizer.kind", c.tokenizer_kind);
  c.tokenizer_command = toml::get_or<std::string>(t, "tokenizer.command", "");
  c.user_dict = toml::get_or<std::string>(t, "tokenizer.user_dict", "");
  c.stopwords = toml::get_or<std::string>(t, "tokenizer.stopwords", "");
  c.min_corpus_count = toml::get_or<int64_t>(t, "bow.min_corpus_count", 1);
  c.lda.topics = static_cast<int32_t>(toml::get_or<int64_t>(t, "lda.topics", c.lda.topics));
  c.lda.alpha = toml::get_or<double>(t, "lda.alpha", c.lda.alpha);
  c.lda.beta = toml::get_or<double>(t, "lda.beta", c.lda.beta);
  c.lda.iterations =
      static_cast<int32_t>(toml::get_or<int64_t>(t, "lda.iterations", c.lda.iterations));
  c.lda.burn_in = static_cast<int32_t>(toml::get_or<int64_t>(t, "lda.burn_in", c.lda.burn_in));
  c.lda.sample_interval =
      static_cast<int32_t>(toml::get_or<int64_t>(t, "lda.sample_interval", c.lda.sample_interval));
  c.lda.seed = static_cast<uint64_t>(toml::get_or<int64_t>(t, "lda.seed", 42));
  c.sweep_k_min = static_cast<int32_t>(toml::get_or<int64_t>(t, "sweep.k_min", c.sweep_k_min));
  c.sweep_k_max = static_cast<int32_t>(toml::get_or<int64_t>(t, "sweep.k_max", c.sweep_k_max));
  c.coherence.top_n =
      static_cast<int>(toml::get_or<int64_t>(t, "coherence.top_n", c.coherence.top_n));
  c.coherence.window =
      static_cast<int>(toml::get_or<int64_t>(t, "coherence.window", c.coherence.window));
  c.coherence.epsilon = toml::get_or<double>(t, "coherence.epsilon", c.coherence.epsilon);
  c.llm_endpoint = toml::get_or<std::string>(t, "llm.endpoint", "");
  c.llm_model = toml::get_or<std::string>(t, "llm.model", c.llm_model);
  c.llm_prompt_mode = toml::get_or<std::string>(t, "llm.prompt_mode", c.llm_prompt_mode);
  c.llm_seed = toml::get_or<int64_t>(t, "llm.seed", c.llm_seed);
  c.llm_max_in_flight =
      static_cast<int32_t>(toml::get_or<int64_t>(t, "llm.max_in_flight", c.llm_max_in_flight));
  c.llm_cache_dir = toml::get_or<std::string>(t, "llm.cache_dir", "");
  c.few_shot_file = toml::get_or<std::string>(t, "llm.few_shot_file", "");
  c.date_floor = toml::get_or<std::string>(t, "aggregate.date_floor", c.date_floor);
  c.aggregate_all_comments = toml::get_or<bool>(t, "aggregate.all_comments", true);
  c.node_min_freq = toml::get_or<int64_t>(t, "cooccur.node_min_freq", 0);
  c.cooccur_labels = toml::get_or<std::string>(t, "cooccur.labels", "");
  return c;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path));
}

/// Resolves the effective filter rules (rules file wins over inline rules).
inline FilterRules effective_rules(const PipelineConfig& c,
                                   const std::filesystem::path& base_dir) {
  if (!c.rules_file.empty()) return load_filter_rules(base_dir / c.rules_file);
  return c.rules;
}

inline std::vector<FewShotExample> load_few_shot_file(const std::filesystem::path& path) {
  nlohmann::json j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_array())
    throw ConfigError("few-shot file must be a JSON array: " + path.string());
  std::vector<FewShotExample> out;
  for (const auto& e : j) {
    auto label = label_from_name(e.value("label", ""));
    if (!label) throw ConfigError("few-shot example has unknown label in " + path.string());
    out.push_back({e.value("text", ""), *label});
  }
  validate_few_shot_examples(out);
  return out;
}

}  // namespace opinion
