// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 opinion contributors
//
// Batch opinion-mining pipeline: corpus filtering, LDA topic modeling with
// coherence-based model selection, lexicon/LLM sentiment classification,
// and per-month / per-topic / co-occurrence aggregation. Each subcommand
// reads the previous stage's artifacts and writes its own, plus a manifest
// of content hashes.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "opinion/aggregate.hpp"
#include "opinion/coherence.hpp"
#include "opinion/common.hpp"
#include "opinion/config.hpp"
#include "opinion/cooccur.hpp"
#include "opinion/corpus.hpp"
#include "opinion/fetch.hpp"
#include "opinion/hash.hpp"
#include "opinion/lda.hpp"
#include "opinion/llm.hpp"
#include "opinion/manifest.hpp"
#include "opinion/sentiment.hpp"
#include "opinion/synthetic.hpp"
#include "opinion/tokenize.hpp"

namespace fs = std::filesystem;
using namespace opinion;

namespace {

struct Ctx {
  std::string config_path;
  std::string out_override;
  PipelineConfig cfg;
  fs::path base_dir;  // config file directory; inputs resolve against it
  fs::path out_dir;
  std::string config_hash;

  void load() {
    if (!config_path.empty()) {
      fs::path p = config_path;
      if (!fs::exists(p)) throw ConfigError("config file not found: " + p.string());
      cfg = load_config(p);
      base_dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    } else {
      base_dir = ".";
    }
    out_dir = out_override.empty() ? base_dir / cfg.output_dir : fs::path(out_override);
    fs::create_directories(out_dir);
    config_hash = sha256_hex(serialize_config(cfg));
  }

  fs::path input(const std::string& rel) const { return base_dir / rel; }

  fs::path artifact(const std::string& name, const std::string& producer) const {
    fs::path p = out_dir / name;
    if (!fs::exists(p))
      throw IoError("missing artifact " + name + "; run `opinion " + producer + "` first");
    return p;
  }
};

std::unique_ptr<TokenizerPlugin> make_tokenizer(const Ctx& ctx) {
  if (ctx.cfg.tokenizer_kind == "subprocess") {
    if (ctx.cfg.tokenizer_command.empty())
      throw ConfigError("tokenizer.kind is 'subprocess' but tokenizer.command is empty");
    return std::make_unique<SubprocessTokenizer>(ctx.cfg.tokenizer_command);
  }
  if (ctx.cfg.tokenizer_kind != "builtin")
    throw ConfigError("tokenizer.kind must be 'builtin' or 'subprocess'");
  auto tok = std::make_unique<BuiltinTokenizer>();
  if (!ctx.cfg.user_dict.empty()) tok->load_dictionary(ctx.input(ctx.cfg.user_dict));
  return tok;
}

std::unordered_set<std::string> load_stopwords(const Ctx& ctx) {
  std::unordered_set<std::string> out;
  if (ctx.cfg.stopwords.empty()) return out;
  std::string text = read_file(ctx.input(ctx.cfg.stopwords));
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] != '#') out.insert(nfkc(line));
  }
  return out;
}

std::map<std::string, SentimentLabel> load_gold(const fs::path& path) {
  std::map<std::string, SentimentLabel> gold;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    auto label = label_from_name(j.at("label").get<std::string>());
    if (!label) throw ParseError("unknown gold label", line);
    gold[j.at("comment_id").get<std::string>()] = *label;
  }
  return gold;
}

/// video_id -> main topic from a trained model artifact.
std::map<std::string, int32_t> main_topics_of(const LdaModel& model) {
  std::map<std::string, int32_t> out;
  for (size_t d = 0; d < model.num_docs(); ++d) {
    int32_t k = main_topic(model, d);
    if (k != kNoMainTopic) out[model.doc_ids[d]] = k;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stages

void run_synth(const std::string& out, const SynthOptions& options) {
  write_synthetic_fixture(out, options);
  std::cout << "synthetic fixture written to " << out << "\n";
}

void run_fetch(Ctx& ctx, const std::string& endpoint, const std::string& query,
               const std::string& api_key, int max_pages, const std::string& output) {
  ctx.load();
  auto videos = fetch_videos(endpoint, query, api_key, max_pages);
  fs::path out = output.empty() ? ctx.out_dir / "videos.jsonl" : fs::path(output);
  save_videos(out, videos);
  write_manifest(ctx.out_dir, "fetch", {}, {out}, ctx.config_hash, 0,
                 {{"videos", videos.size()}, {"pages_max", max_pages}});
  std::cout << "fetched " << videos.size() << " videos -> " << out << "\n";
}

void run_ingest(Ctx& ctx) {
  ctx.load();
  fs::path vpath = ctx.input(ctx.cfg.videos);
  fs::path cpath = ctx.input(ctx.cfg.comments);
  auto videos = load_videos(vpath);
  auto comments = load_comments(cpath);
  for (auto& v : videos.records) {
    v.title = clean_text(v.title);
    v.description = clean_text(v.description);
    v.transcript = clean_text(v.transcript);
  }
  for (auto& c : comments.records) c.text = clean_text(c.text);
  size_t orphans = link_comments(videos.records, comments.records);

  fs::path vout = ctx.out_dir / "videos_clean.jsonl";
  fs::path cout_path = ctx.out_dir / "comments_clean.jsonl";
  save_videos(vout, videos.records);
  save_comments(cout_path, comments.records);
  write_manifest(ctx.out_dir, "ingest", {vpath, cpath}, {vout, cout_path}, ctx.config_hash, 0,
                 {{"videos", videos.records.size()},
                  {"comments", comments.records.size()},
                  {"skipped_video_lines", videos.skipped},
                  {"skipped_comment_lines", comments.skipped},
                  {"orphaned_comments", orphans}});
  std::cout << "ingested " << videos.records.size() << " videos, " << comments.records.size()
            << " comments (" << orphans << " orphaned; " << videos.skipped + comments.skipped
            << " lines skipped)\n";
}

void run_filter(Ctx& ctx) {
  ctx.load();
  fs::path vin = ctx.artifact("videos_clean.jsonl", "ingest");
  fs::path cin = ctx.artifact("comments_clean.jsonl", "ingest");
  FilterRules rules = effective_rules(ctx.cfg, ctx.base_dir);
  auto videos = load_videos(vin);
  auto comments = load_comments(cin);

  VideoFilterResult vres = filter_videos(videos.records, rules);
  ScriptRatioClassifier classifier(ctx.cfg.language_threshold);
  // Restrict comments to kept videos before the language pass, keeping
  // orphans (their video may simply be outside the crawl).
  std::unordered_set<std::string> kept_ids;
  for (const auto& v : vres.kept) kept_ids.insert(v.video_id);
  std::vector<Comment> candidates;
  size_t dropped_with_videos = 0;
  for (auto& c : comments.records) {
    if (c.orphaned || kept_ids.contains(c.video_id))
      candidates.push_back(c);
    else
      ++dropped_with_videos;
  }
  LanguageFilterResult lres = filter_language(candidates, classifier);

  fs::path vout = ctx.out_dir / "videos_filtered.jsonl";
  fs::path cout_path = ctx.out_dir / "comments_filtered.jsonl";
  fs::path dropped_csv = ctx.out_dir / "videos_dropped.csv";
  fs::path removed_csv = ctx.out_dir / "comments_removed.csv";
  save_videos(vout, vres.kept);
  save_comments(cout_path, lres.kept);
  {
    CsvWriter csv;
    csv.row({"video_id", "reason"});
    for (const auto& d : vres.dropped) csv.row({d.video_id, d.reason});
    write_file(dropped_csv, csv.str());
  }
  {
    CsvWriter csv;
    csv.row({"comment_id", "reason"});
    for (const auto& c : lres.removed) csv.row({c.comment_id, "not-japanese"});
    write_file(removed_csv, csv.str());
  }
  write_manifest(ctx.out_dir, "filter", {vin, cin},
                 {vout, cout_path, dropped_csv, removed_csv}, ctx.config_hash, 0,
                 {{"videos_kept", vres.kept.size()},
                  {"videos_dropped", vres.dropped.size()},
                  {"comments_kept", lres.kept.size()},
                  {"comments_removed", lres.removed.size()},
                  {"comments_on_dropped_videos", dropped_with_videos},
                  {"classifier_failures", lres.classifier_failures}});
  std::cout << "filter kept " << vres.kept.size() << "/" << videos.records.size() << " videos, "
            << lres.kept.size() << " comments (" << lres.removed.size() << " non-Japanese)\n";
}

void run_bow(Ctx& ctx) {
  ctx.load();
  fs::path vin = ctx.artifact("videos_filtered.jsonl", "filter");
  auto videos = load_videos(vin);
  auto tokenizer = make_tokenizer(ctx);
  BowOptions options;
  options.min_corpus_count = ctx.cfg.min_corpus_count;
  options.stopwords = load_stopwords(ctx);
  std::vector<std::pair<std::string, std::string>> docs;
  docs.reserve(videos.records.size());
  for (const auto& v : videos.records) docs.emplace_back(v.video_id, v.corpus_text());
  BowCorpus corpus = build_bow(docs, *tokenizer, options);

  fs::path vocab_out = ctx.out_dir / "vocab.tsv";
  fs::path bow_out = ctx.out_dir / "bow.jsonl";
  fs::path freq_out = ctx.out_dir / "freq.csv";
  write_file(vocab_out, vocab_to_tsv(corpus.vocab));
  write_file(bow_out, bow_to_jsonl(corpus.docs));
  write_file(freq_out, freq_to_csv(corpus.vocab));
  int64_t tokens = 0;
  for (const auto& d : corpus.docs) tokens += d.total_tokens;
  write_manifest(ctx.out_dir, "bow", {vin}, {vocab_out, bow_out, freq_out}, ctx.config_hash, 0,
                 {{"vocabulary", corpus.vocab.size()},
                  {"documents", corpus.docs.size()},
                  {"empty_documents", corpus.empty_doc_ids.size()},
                  {"tokens", tokens}});
  std::cout << "bow: V=" << corpus.vocab.size() << " docs=" << corpus.docs.size()
            << " tokens=" << tokens << " empty=" << corpus.empty_doc_ids.size() << "\n";
}

BowCorpus load_bow_corpus(Ctx& ctx) {
  fs::path vocab_in = ctx.artifact("vocab.tsv", "bow");
  fs::path bow_in = ctx.artifact("bow.jsonl", "bow");
  BowCorpus corpus;
  corpus.vocab = vocab_from_tsv(read_file(vocab_in));
  corpus.docs = bow_from_jsonl(read_file(bow_in), corpus.vocab.size());
  for (const auto& d : corpus.docs)
    if (d.counts.empty()) corpus.empty_doc_ids.push_back(d.doc_id);
  return corpus;
}

void run_lda_train(Ctx& ctx, std::optional<int32_t> k_override,
                   std::optional<uint64_t> seed_override) {
  ctx.load();
  if (k_override) ctx.cfg.lda.topics = *k_override;
  if (seed_override) ctx.cfg.lda.seed = *seed_override;
  BowCorpus corpus = load_bow_corpus(ctx);
  LdaModel model = train_lda(corpus, ctx.cfg.lda);
  std::string vocab_hash = sha256_file_hex(ctx.out_dir / "vocab.tsv");

  auto reference = coherence_reference_docs(corpus.docs);
  auto topics = model_top_words(model, ctx.cfg.coherence.top_n);
  CoherenceResult cv = coherence_cv(topics, reference, ctx.cfg.coherence);
  CoherenceResult umass = coherence_umass(topics, reference);

  fs::path model_out = ctx.out_dir / "model.json";
  fs::path doc_topics_out = ctx.out_dir / "doc_topics.csv";
  fs::path coherence_out = ctx.out_dir / "coherence.csv";
  write_file(model_out, model_to_json(model, vocab_hash).dump() + "\n");
  write_file(doc_topics_out, doc_topics_to_csv(model));
  write_file(coherence_out, coherence_to_csv(cv, umass));
  write_manifest(ctx.out_dir, "lda-train",
                 {ctx.out_dir / "vocab.tsv", ctx.out_dir / "bow.jsonl"},
                 {model_out, doc_topics_out, coherence_out}, ctx.config_hash, ctx.cfg.lda.seed,
                 {{"K", model.config.topics},
                  {"coherence_cv", cv.mean},
                  {"coherence_umass", umass.mean},
                  {"perplexity", perplexity(model, corpus.docs)}});
  std::cout << "lda-train: K=" << model.config.topics << " coherence_cv=" << cv.mean
            << " umass=" << umass.mean << "\n";
  for (int32_t k = 0; k < model.num_topics(); ++k) {
    std::cout << "  topic " << k << ":";
    for (int32_t id : top_keywords(model, k, 5)) std::cout << " " << corpus.vocab.term_of(id);
    std::cout << "\n";
  }
}

void run_lda_sweep(Ctx& ctx, unsigned threads) {
  ctx.load();
  BowCorpus corpus = load_bow_corpus(ctx);
  if (ctx.cfg.sweep_k_min < 1 || ctx.cfg.sweep_k_max < ctx.cfg.sweep_k_min)
    throw ConfigError("sweep: need 1 <= k_min <= k_max");
  std::vector<int32_t> k_range;
  for (int32_t k = ctx.cfg.sweep_k_min; k <= ctx.cfg.sweep_k_max; ++k) k_range.push_back(k);
  auto records = sweep_topics(corpus, k_range, ctx.cfg.lda, ctx.cfg.coherence, threads);

  fs::path sweep_out = ctx.out_dir / "sweep.csv";
  write_file(sweep_out, sweep_to_csv(records));

  const SweepRecord* best_cv = nullptr;
  const SweepRecord* best_umass = nullptr;
  for (const auto& r : records) {
    if (r.failed) continue;
    if (!best_cv || r.coherence_cv > best_cv->coherence_cv) best_cv = &r;
    if (!best_umass || r.coherence_umass > best_umass->coherence_umass) best_umass = &r;
  }
  nlohmann::json stats = {{"models", records.size()}, {"pinned_K", ctx.cfg.lda.topics}};
  if (best_cv) stats["argmax_cv_K"] = best_cv->K;
  if (best_umass) stats["argmax_umass_K"] = best_umass->K;
  write_manifest(ctx.out_dir, "lda-sweep",
                 {ctx.out_dir / "vocab.tsv", ctx.out_dir / "bow.jsonl"}, {sweep_out},
                 ctx.config_hash, ctx.cfg.lda.seed, stats);
  std::cout << "sweep: " << records.size() << " models";
  if (best_cv) std::cout << "; argmax coherence_cv at K=" << best_cv->K;
  if (best_umass) std::cout << ", umass at K=" << best_umass->K;
  std::cout << "; pinned K=" << ctx.cfg.lda.topics << " (selection stays manual)\n";
}

void run_sentiment_lexicon(Ctx& ctx, const std::string& output) {
  ctx.load();
  fs::path cin = ctx.artifact("comments_filtered.jsonl", "filter");
  auto comments = load_comments(cin);
  PolarityLexicon lexicon;
  lexicon.load(ctx.input(ctx.cfg.lexicon));
  if (lexicon.empty()) throw ConfigError("lexicon is empty");
  auto tokenizer = make_tokenizer(ctx);

  std::vector<LabeledComment> labels;
  size_t unscored = 0;
  for (const auto& c : comments.records) {
    std::vector<std::string> tokens;
    for (const Token& t : tokenizer->tokenize(c.text)) tokens.push_back(t.normalized);
    LexiconScore score = lexicon_score(tokens, lexicon);
    LabeledComment lc;
    lc.comment_id = c.comment_id;
    lc.label = classify_from_score(score.score);
    lc.score = score.score;
    lc.method = LabelMethod::Lexicon;
    if (!score.score) {
      lc.flag = "unscored";
      ++unscored;
    }
    labels.push_back(std::move(lc));
  }
  fs::path out = output.empty() ? ctx.out_dir / "labels.jsonl" : fs::path(output);
  write_file(out, labels_to_jsonl(labels));
  write_manifest(ctx.out_dir, "sentiment-lexicon", {cin}, {out}, ctx.config_hash, 0,
                 {{"labeled", labels.size()},
                  {"unscored", unscored},
                  {"lexicon_terms", lexicon.size()},
                  {"lexicon_conflicts", lexicon.conflicts().size()}});
  std::cout << "sentiment-lexicon: " << labels.size() << " comments labeled (" << unscored
            << " unscored -> neutral)\n";
}

void run_sentiment_llm(Ctx& ctx, const std::string& endpoint_override,
                       const std::string& api_key, const std::string& output) {
  ctx.load();
  fs::path cin = ctx.artifact("comments_filtered.jsonl", "filter");
  auto comments = load_comments(cin);

  LlmBackendConfig backend;
  backend.endpoint = endpoint_override.empty() ? ctx.cfg.llm_endpoint : endpoint_override;
  if (backend.endpoint.empty())
    throw ConfigError("llm endpoint not configured (set llm.endpoint or --endpoint)");
  backend.model = ctx.cfg.llm_model;
  backend.prompt_mode =
      ctx.cfg.llm_prompt_mode == "zero_shot" ? PromptMode::ZeroShot : PromptMode::FewShot;
  backend.seed = ctx.cfg.llm_seed;
  backend.max_in_flight = ctx.cfg.llm_max_in_flight;
  backend.cache_dir = ctx.cfg.llm_cache_dir.empty() ? ctx.out_dir / "llm_cache"
                                                    : fs::path(ctx.cfg.llm_cache_dir);
  backend.api_key = api_key;
  if (!ctx.cfg.few_shot_file.empty())
    backend.examples = load_few_shot_file(ctx.input(ctx.cfg.few_shot_file));

  std::vector<std::pair<std::string, std::string>> inputs;
  inputs.reserve(comments.records.size());
  for (const auto& c : comments.records) inputs.emplace_back(c.comment_id, c.text);
  LlmClassifyResult result = llm_classify(inputs, backend);

  fs::path out = output.empty() ? ctx.out_dir / "labels.jsonl" : fs::path(output);
  write_file(out, labels_to_jsonl(result.labeled));
  write_manifest(ctx.out_dir, "sentiment-llm", {cin}, {out}, ctx.config_hash,
                 static_cast<uint64_t>(backend.seed),
                 {{"labeled", result.labeled.size()},
                  {"failed", result.failed.size()},
                  {"http_requests", result.http_requests},
                  {"cache_hits", result.cache_hits},
                  {"empty_comments", result.empty_comments}});
  std::cout << "sentiment-llm: " << result.labeled.size() << " labeled, " << result.failed.size()
            << " failed, " << result.http_requests << " requests, " << result.cache_hits
            << " cache hits\n";
}

void run_benchmark(Ctx& ctx, const std::string& gold_path,
                   const std::vector<std::string>& pred_paths,
                   const std::vector<std::string>& names) {
  ctx.load();
  auto gold = load_gold(gold_path.empty() ? ctx.input("gold.jsonl") : fs::path(gold_path));
  std::vector<std::pair<std::string, EvalMetrics>> rows;
  std::vector<fs::path> outputs;
  std::vector<fs::path> inputs;
  for (size_t i = 0; i < pred_paths.size(); ++i) {
    fs::path ppath = pred_paths[i];
    inputs.push_back(ppath);
    auto labels = labels_from_jsonl(read_file(ppath));
    std::map<std::string, SentimentLabel> pred;
    std::string method_tag;
    for (const auto& l : labels) {
      pred[l.comment_id] = l.label;
      if (method_tag.empty())
        method_tag = l.model_tag.empty() ? method_name(l.method) : l.model_tag;
    }
    std::string name = i < names.size() ? names[i] : method_tag;
    auto [cm, metrics] = evaluate(pred, gold);
    rows.emplace_back(name, metrics);
    fs::path confusion_out = ctx.out_dir / ("confusion_" + name + ".csv");
    write_file(confusion_out, confusion_to_csv(cm));
    outputs.push_back(confusion_out);
    std::cout << name << ": accuracy=" << format_double(metrics.accuracy, "%.4f")
              << " precision=" << format_double(metrics.precision, "%.4f")
              << " recall=" << format_double(metrics.recall, "%.4f")
              << " f1=" << format_double(metrics.f1, "%.4f") << "\n";
  }
  fs::path bench_out = ctx.out_dir / "benchmark.csv";
  write_file(bench_out, benchmark_to_csv(rows));
  outputs.push_back(bench_out);
  write_manifest(ctx.out_dir, "benchmark", inputs, outputs, ctx.config_hash, 0,
                 {{"methods", rows.size()}, {"gold_size", gold.size()}});
}

void run_aggregate(Ctx& ctx) {
  ctx.load();
  fs::path cin = ctx.artifact("comments_filtered.jsonl", "filter");
  fs::path lin = ctx.artifact("labels.jsonl", "sentiment-lexicon (or sentiment-llm)");
  fs::path vin = ctx.artifact("videos_filtered.jsonl", "filter");
  fs::path min = ctx.artifact("model.json", "lda-train");

  auto comments = load_comments(cin);
  auto labels = labels_from_jsonl(read_file(lin));
  auto videos = load_videos(vin);
  LdaModel model = model_from_json(nlohmann::json::parse(read_file(min)));
  auto topic_of_video = main_topics_of(model);

  std::map<std::string, const Comment*> by_id;
  for (const auto& c : comments.records) by_id[c.comment_id] = &c;

  auto floor_ts = parse_utc_date(ctx.cfg.date_floor);
  if (!floor_ts) throw ConfigError("aggregate.date_floor must be YYYY-MM-DD");

  std::vector<TimedLabel> timed;
  std::vector<TopicLabel> topic_labels;
  size_t labels_without_comment = 0;
  for (const auto& l : labels) {
    auto it = by_id.find(l.comment_id);
    if (it == by_id.end()) {
      ++labels_without_comment;
      continue;
    }
    const Comment& c = *it->second;
    std::optional<int32_t> topic;
    if (auto t = topic_of_video.find(c.video_id); t != topic_of_video.end()) topic = t->second;
    if (ctx.cfg.aggregate_all_comments || topic)
      timed.push_back({l.comment_id, l.label, c.published_at});
    if (c.published_at >= *floor_ts) topic_labels.push_back({l.label, topic});
  }
  if (labels_without_comment > 0)
    warn("%zu labels had no matching comment record", labels_without_comment);

  MonthlySeries monthly = monthly_scores(timed, *floor_ts);
  TopicSentimentTable table = topic_sentiment(topic_labels, model.config.topics);

  std::vector<TimedTopic> vtopics;
  for (const auto& v : videos.records) {
    std::optional<int32_t> topic;
    if (auto t = topic_of_video.find(v.video_id); t != topic_of_video.end()) topic = t->second;
    vtopics.push_back({topic, v.published_at});
  }
  TopicTimeseries ts = topic_timeseries(vtopics);

  fs::path monthly_out = ctx.out_dir / "monthly_scores.csv";
  fs::path topic_out = ctx.out_dir / "topic_sentiment.csv";
  fs::path ts_out = ctx.out_dir / "topic_monthly.csv";
  write_file(monthly_out, monthly_to_csv(monthly));
  write_file(topic_out, topic_sentiment_to_csv(table));
  write_file(ts_out, topic_timeseries_to_csv(ts));
  write_manifest(ctx.out_dir, "aggregate", {cin, lin, vin, min},
                 {monthly_out, topic_out, ts_out}, ctx.config_hash, 0,
                 {{"months", monthly.buckets.size()},
                  {"topics", table.topics.size()},
                  {"unassigned_comments", table.unassigned},
                  {"videos_without_topic", ts.skipped_no_topic}});
  std::cout << "aggregate: " << monthly.buckets.size() << " months, " << table.topics.size()
            << " topics, " << table.unassigned << " unassigned comments\n";
}

void run_cooccur(Ctx& ctx, const std::string& label_s, const std::string& from_s,
                 const std::string& to_s, int32_t topic, int64_t node_min_freq,
                 const std::vector<std::string>& formats) {
  ctx.load();
  fs::path cin = ctx.artifact("comments_filtered.jsonl", "filter");
  fs::path lin = ctx.artifact("labels.jsonl", "sentiment-lexicon (or sentiment-llm)");

  SliceSpec spec;
  if (!label_s.empty() && label_s != "any") {
    auto l = label_from_name(label_s);
    if (!l) throw ConfigError("--label must be positive|neutral|negative|any");
    spec.label = l;
  }
  if (!from_s.empty()) {
    spec.from = parse_year_month(from_s);
    if (!spec.from) throw ConfigError("--from must be YYYY-MM");
  }
  if (!to_s.empty()) {
    spec.to = parse_year_month(to_s);
    if (!spec.to) throw ConfigError("--to must be YYYY-MM");
  }
  if (topic >= 0) spec.topic = topic;

  int64_t min_freq = node_min_freq > 0 ? node_min_freq : ctx.cfg.node_min_freq;
  if (min_freq < 1)
    throw ConfigError(
        "cooccur: node_min_freq is required (set cooccur.node_min_freq or --node-min-freq)");

  auto comments = load_comments(cin);
  auto labels = labels_from_jsonl(read_file(lin));
  std::map<std::string, SentimentLabel> label_of;
  for (const auto& l : labels) label_of[l.comment_id] = l.label;

  std::map<std::string, int32_t> topic_of_video;
  if (spec.topic) {
    fs::path min = ctx.artifact("model.json", "lda-train");
    LdaModel model = model_from_json(nlohmann::json::parse(read_file(min)));
    topic_of_video = main_topics_of(model);
  }

  std::vector<SliceItem> items;
  for (const auto& c : comments.records) {
    auto it = label_of.find(c.comment_id);
    if (it == label_of.end()) continue;
    SliceItem item;
    item.comment = &c;
    item.label = it->second;
    if (auto t = topic_of_video.find(c.video_id); t != topic_of_video.end())
      item.topic = t->second;
    items.push_back(item);
  }
  auto slice = sentiment_slice(items, spec);
  if (slice.empty()) warn("cooccur: slice %s selected no comments", spec.describe().c_str());

  auto tokenizer = make_tokenizer(ctx);
  std::vector<std::string> texts;
  texts.reserve(slice.size());
  for (const Comment* c : slice) texts.push_back(c->text);
  CooccurrenceGraph graph = build_graph(texts, *tokenizer, min_freq);
  graph.filter_description = spec.describe();

  DisplayNames names;
  if (!ctx.cfg.cooccur_labels.empty()) {
    std::istringstream in(read_file(ctx.input(ctx.cfg.cooccur_labels)));
    std::string line;
    while (std::getline(in, line)) {
      size_t tab = line.find('\t');
      if (tab != std::string::npos) names[line.substr(0, tab)] = line.substr(tab + 1);
    }
  }

  std::vector<std::string> wanted = formats.empty()
                                        ? std::vector<std::string>{"graphml", "dot", "json"}
                                        : formats;
  std::vector<fs::path> outputs;
  for (const auto& f : wanted) {
    auto format = graph_format_from_name(f);
    if (!format) throw ConfigError("unsupported graph format: " + f);
    fs::path out = ctx.out_dir / ("graph." + f);
    write_file(out, export_graph(graph, *format, names));
    outputs.push_back(out);
  }
  write_manifest(ctx.out_dir, "cooccur", {cin, lin}, outputs, ctx.config_hash, 0,
                 {{"slice", spec.describe()},
                  {"comments", slice.size()},
                  {"sentences", graph.sentence_count},
                  {"nodes", graph.nodes.size()},
                  {"edges", graph.edges.size()},
                  {"node_min_freq", min_freq}});
  std::cout << "cooccur: " << slice.size() << " comments -> " << graph.nodes.size() << " nodes, "
            << graph.edges.size() << " edges\n";
}

void run_report(Ctx& ctx) {
  ctx.load();
  auto issues = verify_manifests(ctx.out_dir);
  nlohmann::json report;
  report["version"] = kVersion;
  report["artifact_issues"] = nlohmann::json::array();
  for (const auto& i : issues)
    report["artifact_issues"].push_back(
        {{"stage", i.stage}, {"path", i.path}, {"problem", i.problem}});

  // Stage summaries straight from the manifests.
  nlohmann::json stages = nlohmann::json::object();
  for (const auto& entry : fs::directory_iterator(ctx.out_dir)) {
    std::string name = entry.path().filename().string();
    if (name.rfind("manifest-", 0) != 0 || !name.ends_with(".json")) continue;
    nlohmann::json m = nlohmann::json::parse(read_file(entry.path()), nullptr, false);
    if (!m.is_discarded()) stages[m.value("stage", name)] = m.value("stats", nlohmann::json());
  }
  report["stages"] = stages;

  fs::path sweep_csv = ctx.out_dir / "sweep.csv";
  if (fs::exists(sweep_csv)) report["sweep_csv"] = sweep_csv.filename().string();

  fs::path out = ctx.out_dir / "report.json";
  write_file(out, report.dump(2) + "\n");
  std::cout << "report: " << stages.size() << " stages; " << issues.size()
            << " artifact issues -> " << out << "\n";
  for (const auto& i : issues)
    std::cerr << "  tampered or missing: stage=" << i.stage << " path=" << i.path << " ("
              << i.problem << ")\n";
  if (!issues.empty()) throw IoError("artifact verification failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"opinion: YouTube opinion-mining pipeline (LDA topics + sentiment)"};
  app.require_subcommand(1);

  Ctx ctx;
  app.add_option("-c,--config", ctx.config_path, "Pipeline config file (TOML)");
  app.add_option("-o,--out", ctx.out_override, "Output directory override");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate the bundled synthetic fixture corpus");
  std::string synth_out = "fixture";
  SynthOptions synth_options;
  synth->add_option("--dir", synth_out, "Fixture directory");
  synth->add_option("--seed", synth_options.seed, "Generator seed");
  synth->add_option("--videos-per-topic", synth_options.videos_per_topic, "Videos per topic");
  synth->add_option("--comments-per-video", synth_options.comments_per_video,
                    "Comments per video");
  synth->add_option("--tokens-per-doc", synth_options.tokens_per_doc, "Transcript tokens per doc");
  synth->callback([&]() { run_synth(synth_out, synth_options); });

  // fetch
  auto* fetch = app.add_subcommand("fetch", "Fetch videos from a paged listing endpoint");
  std::string fetch_endpoint, fetch_query, fetch_key, fetch_output;
  int fetch_max_pages = 1;
  fetch->add_option("--endpoint", fetch_endpoint, "Listing endpoint URL")->required();
  fetch->add_option("--query", fetch_query, "Search query")->required();
  fetch->add_option("--api-key", fetch_key, "API key")->envname("OPINION_API_KEY");
  fetch->add_option("--max-pages", fetch_max_pages, "Page limit");
  fetch->add_option("--output", fetch_output, "Output videos.jsonl path");
  fetch->callback([&]() {
    run_fetch(ctx, fetch_endpoint, fetch_query, fetch_key, fetch_max_pages, fetch_output);
  });

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load, clean and link the raw corpus");
  ingest->callback([&]() { run_ingest(ctx); });

  // filter
  auto* filter = app.add_subcommand("filter", "Apply keyword and language filters");
  filter->callback([&]() { run_filter(ctx); });

  // bow
  auto* bow = app.add_subcommand("bow", "Tokenize and build the bag-of-words corpus");
  bow->callback([&]() { run_bow(ctx); });

  // lda-train
  auto* lda_train = app.add_subcommand("lda-train", "Train the pinned-K LDA model");
  int32_t train_k = 0;
  uint64_t train_seed = 0;
  auto* train_k_opt = lda_train->add_option("--topics", train_k, "Topic count override");
  auto* train_seed_opt = lda_train->add_option("--seed", train_seed, "Seed override");
  lda_train->callback([&]() {
    run_lda_train(ctx,
                  train_k_opt->count() ? std::optional<int32_t>(train_k) : std::nullopt,
                  train_seed_opt->count() ? std::optional<uint64_t>(train_seed) : std::nullopt);
  });

  // lda-sweep
  auto* lda_sweep = app.add_subcommand("lda-sweep", "Train one model per K and score them");
  unsigned sweep_threads = std::thread::hardware_concurrency();
  lda_sweep->add_option("--threads", sweep_threads, "Parallel trainings");
  lda_sweep->callback([&]() { run_lda_sweep(ctx, sweep_threads); });

  // sentiment-lexicon
  auto* sent_lex = app.add_subcommand("sentiment-lexicon", "Label comments with the lexicon scorer");
  std::string lex_output;
  sent_lex->add_option("--output", lex_output, "Labels output path");
  sent_lex->callback([&]() { run_sentiment_lexicon(ctx, lex_output); });

  // sentiment-llm
  auto* sent_llm = app.add_subcommand("sentiment-llm", "Label comments via a chat-completion endpoint");
  std::string llm_endpoint, llm_key, llm_output;
  sent_llm->add_option("--endpoint", llm_endpoint, "Endpoint override");
  sent_llm->add_option("--api-key", llm_key, "API key")->envname("OPINION_API_KEY");
  sent_llm->add_option("--output", llm_output, "Labels output path");
  sent_llm->callback([&]() { run_sentiment_llm(ctx, llm_endpoint, llm_key, llm_output); });

  // benchmark
  auto* benchmark = app.add_subcommand("benchmark", "Evaluate label files against gold labels");
  std::string gold_path;
  std::vector<std::string> pred_paths, pred_names;
  benchmark->add_option("--gold", gold_path, "Gold labels jsonl");
  benchmark->add_option("--pred", pred_paths, "Prediction labels.jsonl (repeatable)")->required();
  benchmark->add_option("--name", pred_names, "Method names matching --pred order");
  benchmark->callback([&]() { run_benchmark(ctx, gold_path, pred_paths, pred_names); });

  // aggregate
  auto* aggregate = app.add_subcommand("aggregate", "Monthly and per-topic sentiment tables");
  aggregate->callback([&]() { run_aggregate(ctx); });

  // cooccur
  auto* cooccur = app.add_subcommand("cooccur", "Word co-occurrence network from a comment slice");
  std::string co_label = "any", co_from, co_to;
  int32_t co_topic = -1;
  int64_t co_min_freq = 0;
  std::vector<std::string> co_formats;
  cooccur->add_option("--label", co_label, "positive|neutral|negative|any");
  cooccur->add_option("--from", co_from, "First month YYYY-MM");
  cooccur->add_option("--to", co_to, "Last month YYYY-MM");
  cooccur->add_option("--topic", co_topic, "Main-topic filter");
  cooccur->add_option("--node-min-freq", co_min_freq, "Node frequency threshold");
  cooccur->add_option("--format", co_formats, "graphml|dot|json (repeatable; default all)");
  cooccur->callback([&]() {
    run_cooccur(ctx, co_label, co_from, co_to, co_topic, co_min_freq, co_formats);
  });

  // report
  auto* report = app.add_subcommand("report", "Verify manifests and summarize the run");
  report->callback([&]() { run_report(ctx); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
