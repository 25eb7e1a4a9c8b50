#include "sensemt/cli.hpp"

#include "sensemt/corpus.hpp"
#include "sensemt/curation.hpp"
#include "sensemt/digest.hpp"
#include "sensemt/evaluation.hpp"
#include "sensemt/io.hpp"
#include "sensemt/llm_client.hpp"
#include "sensemt/mock_model.hpp"
#include "sensemt/prompt.hpp"
#include "sensemt/retrieval.hpp"
#include "sensemt/sense_index.hpp"
#include "sensemt/text.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

namespace sensemt::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDiagnostics = 3;

struct Options {
  std::string format = "text";
  std::string manifest;

  std::string corpus;
  std::string out;
  std::string corpus_id;
  std::string index;
  std::string degree_overrides;
  std::string queries;
  std::string demos;
  std::string summary;
  std::size_t k = 3;
  std::uint64_t seed = 0;
  std::string policy = "matched-only";
  std::string strategy = "similar";
  std::string template_kind = "completion";
  std::string template_file;
  std::string src_lang;
  std::string tgt_lang;
  std::string prompts;
  std::string endpoint;
  std::string path = "/generate";
  std::string schema = "native";
  std::string model = "default";
  std::string token_env;
  std::string cache;
  std::string records;
  std::size_t max_in_flight = 4;
  int retries = 3;
  long timeout_ms = 30000;
  long backoff_ms = 200;
  int beam = 1;
  double temperature = 1.0;
  int no_repeat_ngram = 4;
  int max_new_tokens = 256;
  std::string eval;
  std::string hypotheses;
  std::string miss_policy = "exclude";
  std::string match = "auto";
  std::string table;
  std::size_t size = 0;
  std::size_t holdout = kDefaultHoldout;
  std::string out_dir;
  std::string lexicon;
  std::string host = "127.0.0.1";
  int port = 8089;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  Options& opt;
  std::vector<Diagnostic> diagnostics;
  std::map<std::string, std::string> inputs;  // path -> sha256
  std::string primary_output;

  std::string read_input(const std::string& path) {
    auto contents = io::read_file(path);
    inputs[path] = sha256_hex(contents);
    return contents;
  }
  void report(const std::string& source, const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags) {
      err << format_diagnostic(source, d) << '\n';
      diagnostics.push_back(d);
    }
  }
  bool json_output() const { return opt.format == "json"; }
};

std::string env_name(const std::string& long_name) {
  std::string name = "SENSEMT_";
  for (char c : long_name) name.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return name;
}

void emit(Context& ctx, const std::string& path, std::string_view contents) {
  io::write_atomic(path, contents);
  if (ctx.primary_output.empty()) ctx.primary_output = path;
}

std::vector<ParallelPair> load_corpus(Context& ctx, const std::string& path) {
  auto parsed = parse_annotated_corpus(ctx.read_input(path));
  ctx.report(path, parsed.diagnostics);
  return std::move(parsed.records);
}

std::string default_corpus_id(const Context& ctx, const std::string& path) {
  return "sha256:" + ctx.inputs.at(path).substr(0, 16);
}

// ---------------------------------------------------------------- ingest

int run_ingest(Context& ctx) {
  auto& o = ctx.opt;
  auto pairs = load_corpus(ctx, o.corpus);
  const auto stats = validate_corpus(pairs);
  if (!o.out.empty()) emit(ctx, o.out, serialize_corpus(pairs));
  if (ctx.json_output()) {
    ordered_json j;
    j["sentences"] = stats.sentences;
    j["tokens"] = stats.tokens;
    j["sense_tokens"] = stats.sense_tokens;
    j["distinct_lemmas"] = stats.distinct_lemmas;
    j["distinct_sense_lemmas"] = stats.distinct_sense_lemmas;
    j["distinct_senses"] = stats.distinct_senses;
    j["diagnostics"] = ctx.diagnostics.size();
    ctx.out << j.dump(2) << '\n';
  } else {
    ctx.out << fmt::format(
        "sentences: {}\ntokens: {}\nsense-bearing tokens: {}\ndistinct lemmas: {}\n"
        "distinct lemmas with senses: {}\ndistinct senses: {}\nskipped lines: {}\n",
        stats.sentences, stats.tokens, stats.sense_tokens, stats.distinct_lemmas,
        stats.distinct_sense_lemmas, stats.distinct_senses, ctx.diagnostics.size());
  }
  return ctx.diagnostics.empty() ? kExitOk : kExitDiagnostics;
}

// ----------------------------------------------------------------- index

int run_index(Context& ctx) {
  auto& o = ctx.opt;
  auto pairs = load_corpus(ctx, o.corpus);
  std::map<std::string, std::uint32_t, std::less<>> overrides;
  if (!o.degree_overrides.empty()) overrides = parse_degree_overrides(ctx.read_input(o.degree_overrides));
  auto index = build_index(pairs, o.corpus_id.empty() ? default_corpus_id(ctx, o.corpus) : o.corpus_id);
  index.set_degree_overrides(std::move(overrides));
  const auto bytes = encode_index(index);
  emit(ctx, o.out, bytes);
  if (ctx.json_output()) {
    ordered_json j;
    j["corpus_id"] = index.corpus_id();
    j["lemmas"] = index.lemma_senses().size();
    j["senses"] = index.sense_freq().size();
    j["sense_tokens"] = index.total_sense_tokens();
    j["checksum"] = sha256_hex(bytes);
    ctx.out << j.dump(2) << '\n';
  } else {
    ctx.out << fmt::format("corpus id: {}\nlemmas: {}\nsenses: {}\nsense-bearing tokens: {}\n", index.corpus_id(),
                           index.lemma_senses().size(), index.sense_freq().size(), index.total_sense_tokens());
  }
  return ctx.diagnostics.empty() ? kExitOk : kExitDiagnostics;
}

SenseIndex read_index(Context& ctx, const std::string& path) {
  ctx.inputs[path] = file_sha256_hex(path);
  return load_index(path);
}

// -------------------------------------------------------------- coverage

int run_coverage(Context& ctx) {
  auto& o = ctx.opt;
  auto pairs = load_corpus(ctx, o.corpus);
  const auto index = read_index(ctx, o.index);
  const auto report = coverage_report(pairs, index, o.k);
  if (ctx.json_output()) {
    ordered_json j;
    j["k"] = o.k;
    j["covered"] = report.covered;
    j["eligible"] = report.eligible;
    j["fraction"] = report.fraction;
    j["zero_denominator"] = report.zero_denominator;
    ctx.out << j.dump(2) << '\n';
  } else {
    ctx.out << fmt::format("k={}: {}/{} sentences have {} same-sense matches ({:.4f}){}\n", o.k, report.covered,
                           report.eligible, o.k, report.fraction,
                           report.zero_denominator ? " [zero denominator]" : "");
  }
  return ctx.diagnostics.empty() ? kExitOk : kExitDiagnostics;
}

// -------------------------------------------------------------- retrieve

int run_retrieve(Context& ctx) {
  auto& o = ctx.opt;
  const auto index = read_index(ctx, o.index);
  auto pairs = load_corpus(ctx, o.corpus);
  auto queries = parse_sentences(ctx.read_input(o.queries));
  ctx.report(o.queries, queries.diagnostics);
  const auto policy = parse_fallback_policy(o.policy);
  if (o.strategy != "similar" && o.strategy != "random")
    throw Error(fmt::format("unknown strategy '{}'", o.strategy));
  if (o.k == 0) throw Error("--k must be at least 1");

  const CorpusView view(pairs);
  std::vector<DemonstrationSet> sets(queries.records.size());
  const auto n = static_cast<std::ptrdiff_t>(sets.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& q = queries.records[static_cast<std::size_t>(i)];
    const auto seed = derive_seed(o.seed, q.id);
    if (o.strategy == "random") {
      sets[static_cast<std::size_t>(i)] = sample_random(view, o.k, seed, q.id);
    } else {
      sets[static_cast<std::size_t>(i)] = retrieve_similar(q, index, view, o.k, seed, policy);
    }
  }

  std::string demos_text;
  ordered_json per_query = ordered_json::array();
  std::size_t matched_total = 0;
  std::size_t full = 0;
  std::size_t fallbacks = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto& q = queries.records[i];
    const auto& set = sets[i];
    for (std::size_t r = 0; r < set.demos.size(); ++r) {
      auto record = ordered_json::parse(serialize_pair(set.demos[r]));
      record["query_id"] = q.id;
      record["demo_rank"] = r;
      demos_text += record.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
      demos_text += '\n';
    }
    matched_total += set.matched_k;
    full += set.matched_k >= o.k;
    fallbacks += set.fallback_used;
    ordered_json qj;
    qj["id"] = q.id;
    if (set.target) {
      qj["target_lemma"] = set.target->lemma;
      qj["target_sense"] = set.target->sense.str();
      qj["degree"] = set.target->degree;
    }
    qj["matched_k"] = set.matched_k;
    qj["demos"] = set.demos.size();
    qj["fallback_used"] = set.fallback_used;
    per_query.push_back(std::move(qj));
  }
  ordered_json summary;
  summary["strategy"] = o.strategy;
  summary["policy"] = std::string(to_string(policy));
  summary["requested_k"] = o.k;
  summary["seed"] = o.seed;
  summary["queries"] = sets.size();
  summary["queries_with_full_k"] = full;
  summary["mean_matched_k"] = sets.empty() ? 0.0 : static_cast<double>(matched_total) / static_cast<double>(sets.size());
  summary["fallback_used"] = fallbacks;
  summary["per_query"] = std::move(per_query);

  emit(ctx, o.out, demos_text);
  if (!o.summary.empty()) io::write_atomic(o.summary, summary.dump(2) + "\n");
  if (ctx.json_output()) {
    summary.erase("per_query");
    ctx.out << summary.dump(2) << '\n';
  } else {
    ctx.out << fmt::format("queries: {}\nfull {}-shot matches: {}\nmean matched k: {:.3f}\nfallback used: {}\n",
                           sets.size(), o.k, full, summary["mean_matched_k"].get<double>(), fallbacks);
  }
  return ctx.diagnostics.empty() ? kExitOk : kExitDiagnostics;
}

// ---------------------------------------------------------------- prompt

std::pair<std::string, std::string> languages_in(std::string_view contents) {
  for (const auto& line : io::split_lines(contents)) {
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) continue;
    if (obj.contains("src_lang") && obj.contains("tgt_lang") && obj["src_lang"].is_string() &&
        obj["tgt_lang"].is_string())
      return {obj["src_lang"].get<std::string>(), obj["tgt_lang"].get<std::string>()};
  }
  return {};
}

int run_prompt(Context& ctx) {
  auto& o = ctx.opt;
  const auto query_text = ctx.read_input(o.queries);
  auto queries = parse_sentences(query_text);
  ctx.report(o.queries, queries.diagnostics);

  std::map<std::string, std::vector<std::pair<std::size_t, Demonstration>>> demos;
  std::string demo_text;
  if (!o.demos.empty()) {
    demo_text = ctx.read_input(o.demos);
    std::size_t line_no = 0;
    for (const auto& line : io::split_lines(demo_text)) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      json obj = json::parse(line, nullptr, false);
      if (obj.is_discarded() || !obj.is_object() || !obj.contains("query_id") || !obj.contains("text") ||
          !obj.contains("target")) {
        ctx.report(o.demos, {{line_no, "malformed demonstration record"}});
        continue;
      }
      demos[obj["query_id"].get<std::string>()].emplace_back(
          obj.value("demo_rank", std::size_t{0}),
          Demonstration{obj["text"].get<std::string>(), obj["target"].get<std::string>()});
    }
    for (auto& [id, list] : demos)
      std::stable_sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  }

  auto [src, tgt] = std::pair{o.src_lang, o.tgt_lang};
  if (src.empty() || tgt.empty()) {
    auto found = languages_in(query_text);
    if (found.first.empty() && !demo_text.empty()) found = languages_in(demo_text);
    if (src.empty()) src = found.first;
    if (tgt.empty()) tgt = found.second;
  }
  if (src.empty() || tgt.empty())
    throw Error("source/target languages unknown: pass --src-lang and --tgt-lang");

  const auto kind = parse_template_kind(o.template_kind);
  PromptTemplate tmpl = default_template(kind);
  if (!o.template_file.empty()) tmpl = parse_template(ctx.read_input(o.template_file));

  std::string out_text;
  for (const auto& q : queries.records) {
    PromptSpec spec;
    spec.test_source = q.text;
    spec.src_lang = language_name(src);
    spec.tgt_lang = language_name(tgt);
    spec.kind = kind;
    if (auto it = demos.find(q.id); it != demos.end()) {
      for (const auto& [rank, d] : it->second) spec.demos.push_back(d);
    }
    ordered_json line;
    line["id"] = q.id;
    line["prompt"] = render_prompt(spec, tmpl);
    out_text += line.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
    out_text += '\n';
  }
  emit(ctx, o.out, out_text);
  ctx.out << fmt::format("prompts: {}\n", queries.records.size());
  return ctx.diagnostics.empty() ? kExitOk : kExitDiagnostics;
}

// ------------------------------------------------------------- translate

int run_translate(Context& ctx) {
  auto& o = ctx.opt;
  std::vector<std::string> ids;
  std::vector<std::string> prompts;
  std::size_t line_no = 0;
  for (const auto& line : io::split_lines(ctx.read_input(o.prompts))) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("id") || !obj.contains("prompt") ||
        !obj["id"].is_string() || !obj["prompt"].is_string()) {
      ctx.report(o.prompts, {{line_no, "malformed prompt record"}});
      continue;
    }
    ids.push_back(obj["id"].get<std::string>());
    prompts.push_back(obj["prompt"].get<std::string>());
  }

  EndpointConfig cfg;
  cfg.base_url = o.endpoint;
  cfg.path = o.path;
  cfg.schema = parse_wire_schema(o.schema);
  cfg.token_env = o.token_env;
  cfg.model_id = o.model;
  cfg.timeout = std::chrono::milliseconds(o.timeout_ms);
  cfg.max_in_flight = o.max_in_flight;
  cfg.retry_budget = o.retries;
  cfg.backoff_base = std::chrono::milliseconds(o.backoff_ms);
  cfg.validate();
  GenerationParams gen{o.beam, o.temperature, o.no_repeat_ngram, o.max_new_tokens};
  gen.validate();

  CompletionCache cache = o.cache.empty() ? CompletionCache() : CompletionCache(o.cache);
  BatchStats stats;
  const auto records = translate_batch(prompts, cfg, gen, cache, &stats);

  std::string hyps;
  std::string full;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].error) {
      ++failed;
      ctx.report(o.prompts, {{0, fmt::format("prompt '{}': {}", ids[i], *records[i].error)}});
      continue;
    }
    hyps += ids[i];
    hyps += '\t';
    hyps += escape_field(records[i].parsed);
    hyps += '\n';
    full += serialize_record(records[i], ids[i]);
    full += '\n';
  }
  emit(ctx, o.out, hyps);
  if (!o.records.empty()) io::write_atomic(o.records, full);
  ctx.out << fmt::format("prompts: {}\ncache hits: {}\nrequests sent: {}\nfailed: {}\n", prompts.size(),
                         stats.cache_hits, stats.requests_sent, failed);
  return ctx.diagnostics.empty() ? kExitOk : kExitDiagnostics;
}

// -------------------------------------------------------------- evaluate

int run_evaluate(Context& ctx) {
  auto& o = ctx.opt;
  auto items = parse_eval_set(ctx.read_input(o.eval));
  ctx.report(o.eval, items.diagnostics);
  const auto hyps = parse_hypotheses(ctx.read_input(o.hypotheses));
  MatcherConfig matcher;
  if (o.match == "token") matcher.mode = MatchMode::token;
  else if (o.match == "substring") matcher.mode = MatchMode::substring;
  else if (o.match != "auto") throw Error(fmt::format("unknown match mode '{}'", o.match));
  const auto report = evaluate_run(hyps, items.records, parse_miss_policy(o.miss_policy), matcher);
  ctx.report(o.hypotheses, report.diagnostics);
  const auto rendered = ctx.json_output() ? render_report_json(report) : render_report_text(report);
  if (!o.out.empty()) emit(ctx, o.out, render_report_json(report));
  ctx.out << rendered;
  return ctx.diagnostics.empty() ? kExitOk : kExitDiagnostics;
}

// ------------------------------------------------------------- correlate

int run_correlate(Context& ctx) {
  auto& o = ctx.opt;
  const auto table = parse_metrics_table(ctx.read_input(o.table));
  ctx.report(o.table, table.diagnostics);
  const auto results = correlate_metrics(table);
  ordered_json j = ordered_json::array();
  std::string text_out = fmt::format("{:<16} {:>10} {:>14} {:>4}\n", "metric", "rho", "p-value", "n");
  for (const auto& r : results) {
    ordered_json row;
    row["metric"] = r.metric;
    row["rho"] = r.result.rho;
    row["p_value"] = r.result.p_value;
    row["n"] = r.result.n;
    j.push_back(std::move(row));
    text_out += fmt::format("{:<16} {:>10.4f} {:>14.6g} {:>4}\n", r.metric, r.result.rho, r.result.p_value, r.result.n);
  }
  if (!o.out.empty()) emit(ctx, o.out, j.dump(2) + "\n");
  ctx.out << (ctx.json_output() ? j.dump(2) + "\n" : text_out);
  return ctx.diagnostics.empty() ? kExitOk : kExitDiagnostics;
}

// ---------------------------------------------------------------- curate

int run_curate(Context& ctx) {
  auto& o = ctx.opt;
  auto pairs = load_corpus(ctx, o.corpus);
  const auto index = read_index(ctx, o.index);
  if (o.size == 0) throw Error("--size must be positive");
  const auto ranking = rank_and_interleave(pairs, index, o.size);
  const auto split = split_validation(ranking.selected, o.holdout, o.seed);
  Provenance prov;
  prov.corpus_id = index.corpus_id();
  prov.index_checksum = ctx.inputs.at(o.index);
  prov.seed = o.seed;
  prov.holdout = o.holdout;
  prov.target_size = o.size;
  const CorpusView view(pairs);
  const auto emitted = emit_finetune_dataset(split.train, split.valid, view, o.out_dir, prov);
  ctx.primary_output = emitted.manifest_path.string();
  ctx.out << fmt::format("scoreable sentences: {}\nselected: {}\ntrain: {}\nvalid: {}\n", ranking.by_degree.size(),
                         ranking.selected.size(), emitted.train_records, emitted.valid_records);
  return ctx.diagnostics.empty() ? kExitOk : kExitDiagnostics;
}

// ------------------------------------------------------------ serve-mock

int run_serve_mock(Context& ctx) {
  auto& o = ctx.opt;
  auto lexicon = MockLexicon::parse(ctx.read_input(o.lexicon));
  std::string token;
  if (!o.token_env.empty()) {
    const char* v = std::getenv(o.token_env.c_str());
    if (v == nullptr || *v == '\0') throw AuthError(fmt::format("environment variable {} is not set", o.token_env));
    token = v;
  }
  MockServer server(std::move(lexicon), token);
  ctx.err << fmt::format("mock endpoint listening on http://{}:{}/generate\n", o.host, o.port);
  server.listen_blocking(o.host, o.port);
  return kExitOk;
}

// -------------------------------------------------------------- manifest

std::string iso_time(std::chrono::system_clock::time_point tp) {
  const auto t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(Context& ctx, const CLI::App& sub, int exit_code,
                    std::chrono::system_clock::time_point started) {
  ordered_json m;
  m["subcommand"] = sub.get_name();
  ordered_json params;
  for (const auto* opt : sub.get_options()) {
    const auto name = opt->get_single_name();
    if (name == "help" || name == "manifest" || name == "config") continue;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      params[name] = results.size() == 1 ? json(results.front()) : json(results);
    } else {
      params[name] = opt->get_default_str();
    }
  }
  m["parameters"] = std::move(params);
  m["inputs"] = ctx.inputs;
  m["seed"] = ctx.opt.seed;
  m["tool_version"] = SENSEMT_VERSION;
  m["started_at"] = iso_time(started);
  m["finished_at"] = iso_time(std::chrono::system_clock::now());
  m["exit_code"] = exit_code;
  m["diagnostics"] = ctx.diagnostics.size();
  const auto text = m.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";

  std::string path = ctx.opt.manifest;
  if (path.empty() && !ctx.primary_output.empty()) {
    path = ctx.primary_output;
    if (sub.get_name() == "curate") {
      path = (std::filesystem::path(ctx.opt.out_dir) / "run_manifest.json").string();
    } else {
      path += ".manifest.json";
    }
  }
  if (path.empty()) {
    ctx.err << m.dump(-1, ' ', false, ordered_json::error_handler_t::replace) << '\n';
  } else {
    io::write_atomic(path, text);
  }
}

// ------------------------------------------------------------ app wiring

struct Registered {
  CLI::App* app;
  int (*run)(Context&);
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--format", o.format, "Output format for the console summary")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  sub->add_option("--manifest", o.manifest, "Run manifest path (default: next to the primary output)");
  sub->set_config("--config", "", "Key-value configuration file (flags take precedence)");
}

void add_env_names(CLI::App* sub) {
  for (auto* opt : sub->get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty() || names.front() == "help" || names.front() == "config") continue;
    opt->envname(env_name(names.front()));
  }
}

// CLI11 only reads config files attached to the root app, so the subcommand's
// --config is applied here. Flags and environment variables win over the file.
void apply_config(CLI::App* sub) {
  auto* config = sub->get_config_ptr();
  if (config == nullptr || config->count() == 0) return;
  const auto path = config->as<std::string>();
  for (const auto& item : CLI::ConfigTOML().from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;
    CLI::Option* opt = nullptr;
    try {
      opt = sub->get_option("--" + item.name);
    } catch (const CLI::OptionNotFound&) {
      throw CLI::ConfigError(fmt::format("{}: unknown key '{}'", path, item.name));
    }
    if (opt->count() > 0 || opt == config) continue;
    if (!opt->get_envname().empty() && std::getenv(opt->get_envname().c_str()) != nullptr) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Sense-aware demonstration retrieval, fine-tuning data curation and disambiguation evaluation",
               "sensemt"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(SENSEMT_VERSION));
  app.option_defaults()->always_capture_default();
  std::vector<Registered> subs;

  {
    auto* s = app.add_subcommand("ingest", "Parse and validate an annotated corpus; report statistics");
    s->add_option("--corpus", o.corpus, "Annotated corpus (JSONL)")->required()->check(CLI::ExistingFile);
    s->add_option("--out", o.out, "Write the normalized corpus here");
    subs.push_back({s, run_ingest});
  }
  {
    auto* s = app.add_subcommand("index", "Build the sense index of an annotated corpus");
    s->add_option("--corpus", o.corpus, "Annotated corpus (JSONL)")->required()->check(CLI::ExistingFile);
    s->add_option("--out", o.out, "Index file to write")->required();
    s->add_option("--corpus-id", o.corpus_id, "Corpus identifier (default: sha256 prefix of the corpus file)");
    s->add_option("--degree-overrides", o.degree_overrides, "lemma<TAB>degree table overriding observed degrees")
        ->check(CLI::ExistingFile);
    subs.push_back({s, run_index});
  }
  {
    auto* s = app.add_subcommand("coverage", "Fraction of sentences with k same-sense matches");
    s->add_option("--corpus", o.corpus, "Annotated corpus (JSONL)")->required()->check(CLI::ExistingFile);
    s->add_option("--index", o.index, "Sense index file")->required()->check(CLI::ExistingFile);
    s->add_option("--k", o.k, "Required number of matches")->capture_default_str();
    subs.push_back({s, run_coverage});
  }
  {
    auto* s = app.add_subcommand("retrieve", "Sample k demonstrations per query sentence");
    s->add_option("--index", o.index, "Sense index file")->required()->check(CLI::ExistingFile);
    s->add_option("--corpus", o.corpus, "Annotated corpus the demonstrations come from")
        ->required()
        ->check(CLI::ExistingFile);
    s->add_option("--queries", o.queries, "Annotated query sentences (corpus or eval-set records)")
        ->required()
        ->check(CLI::ExistingFile);
    s->add_option("--k", o.k, "Demonstrations per query")->capture_default_str();
    s->add_option("--seed", o.seed, "Sampling seed")->required();
    s->add_option("--policy", o.policy, "Behaviour when fewer than k matches exist")
        ->check(CLI::IsMember({"matched-only", "pad-random"}))
        ->capture_default_str();
    s->add_option("--strategy", o.strategy, "similar: same-sense demonstrations; random: naive baseline")
        ->check(CLI::IsMember({"similar", "random"}))
        ->capture_default_str();
    s->add_option("--out", o.out, "Demonstration records (JSONL)")->required();
    s->add_option("--summary", o.summary, "Per-query summary (JSON)");
    subs.push_back({s, run_retrieve});
  }
  {
    auto* s = app.add_subcommand("prompt", "Render k-shot prompts");
    s->add_option("--queries", o.queries, "Query sentences (corpus or eval-set records)")
        ->required()
        ->check(CLI::ExistingFile);
    s->add_option("--demos", o.demos, "Demonstration records from `retrieve`")->check(CLI::ExistingFile);
    s->add_option("--template", o.template_kind, "Built-in template")
        ->check(CLI::IsMember({"completion", "question", "alpaca"}))
        ->capture_default_str();
    s->add_option("--template-file", o.template_file, "Custom template (JSON)")->check(CLI::ExistingFile);
    s->add_option("--src-lang", o.src_lang, "Source language code (default: from the records)");
    s->add_option("--tgt-lang", o.tgt_lang, "Target language code (default: from the records)");
    s->add_option("--out", o.out, "Prompt records (JSONL: id, prompt)")->required();
    subs.push_back({s, run_prompt});
  }
  {
    auto* s = app.add_subcommand("translate", "Send prompts to a completion endpoint");
    s->add_option("--prompts", o.prompts, "Prompt records from `prompt`")->required()->check(CLI::ExistingFile);
    s->add_option("--endpoint", o.endpoint, "Base URL, e.g. http://127.0.0.1:8089")->required();
    s->add_option("--path", o.path, "Request path")->capture_default_str();
    s->add_option("--schema", o.schema, "Wire schema")
        ->check(CLI::IsMember({"native", "openai", "tgi"}))
        ->capture_default_str();
    s->add_option("--model", o.model, "Model identifier (part of the cache key)")->capture_default_str();
    s->add_option("--token-env", o.token_env, "Environment variable holding the bearer token");
    s->add_option("--cache", o.cache, "Append-only completion cache file");
    s->add_option("--max-in-flight", o.max_in_flight, "Concurrent requests")->capture_default_str();
    s->add_option("--retries", o.retries, "Retry budget for transient failures")->capture_default_str();
    s->add_option("--timeout-ms", o.timeout_ms, "Per-request timeout")->capture_default_str();
    s->add_option("--backoff-ms", o.backoff_ms, "Initial retry backoff")->capture_default_str();
    s->add_option("--beam", o.beam, "Beam size")->capture_default_str();
    s->add_option("--temperature", o.temperature, "Sampling temperature")->capture_default_str();
    s->add_option("--no-repeat-ngram", o.no_repeat_ngram, "no_repeat_ngram_size")->capture_default_str();
    s->add_option("--max-new-tokens", o.max_new_tokens, "Generation length limit")->capture_default_str();
    s->add_option("--out", o.out, "Hypotheses file (id<TAB>translation)")->required();
    s->add_option("--records", o.records, "Full completion records (JSONL)");
    subs.push_back({s, run_translate});
  }
  {
    auto* s = app.add_subcommand("evaluate", "Judge hypotheses against good/bad lexicalizations");
    s->add_option("--eval", o.eval, "Evaluation set (JSONL)")->required()->check(CLI::ExistingFile);
    s->add_option("--hypotheses", o.hypotheses, "Hypotheses file (id<TAB>translation)")
        ->required()
        ->check(CLI::ExistingFile);
    s->add_option("--miss-policy", o.miss_policy, "Accuracy denominator")
        ->check(CLI::IsMember({"exclude", "count-as-error"}))
        ->capture_default_str();
    s->add_option("--match", o.match, "Matching mode")
        ->check(CLI::IsMember({"auto", "token", "substring"}))
        ->capture_default_str();
    s->add_option("--out", o.out, "Machine-readable report (JSON)");
    subs.push_back({s, run_evaluate});
  }
  {
    auto* s = app.add_subcommand("correlate", "Pearson correlation of accuracy with metric columns");
    s->add_option("--table", o.table, "Delimited table: system, accuracy, metrics...")
        ->required()
        ->check(CLI::ExistingFile);
    s->add_option("--out", o.out, "Correlations (JSON)");
    subs.push_back({s, run_correlate});
  }
  {
    auto* s = app.add_subcommand("curate", "Select an ambiguous fine-tuning corpus and emit Alpaca data");
    s->add_option("--corpus", o.corpus, "Annotated corpus (JSONL)")->required()->check(CLI::ExistingFile);
    s->add_option("--index", o.index, "Sense index file")->required()->check(CLI::ExistingFile);
    s->add_option("--size", o.size, "Target corpus size N")->required();
    s->add_option("--holdout", o.holdout, "Validation sentences")->capture_default_str();
    s->add_option("--seed", o.seed, "Seed for the validation split")->required();
    s->add_option("--out-dir", o.out_dir, "Output directory")->required();
    subs.push_back({s, run_curate});
  }
  {
    auto* s = app.add_subcommand("serve-mock", "Serve the deterministic mock translator over HTTP");
    s->add_option("--lexicon", o.lexicon, "Mock lexicon (JSON)")->required()->check(CLI::ExistingFile);
    s->add_option("--host", o.host, "Bind address")->capture_default_str();
    s->add_option("--port", o.port, "Port")->capture_default_str();
    s->add_option("--token-env", o.token_env, "Require this bearer token (environment variable name)");
    subs.push_back({s, run_serve_mock});
  }
  for (auto& r : subs) {
    add_common(r.app, o);
    add_env_names(r.app);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    for (auto& r : subs) {
      if (r.app->parsed()) apply_config(r.app);
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    const CLI::App* failing = &app;
    for (const auto& r : subs) {
      if (r.app->parsed()) failing = r.app;
    }
    err << failing->help();
    return kExitUsage;
  }

  for (const auto& r : subs) {
    if (!r.app->parsed()) continue;
    Context ctx{out, err, o, {}, {}, {}};
    const auto started = std::chrono::system_clock::now();
    int code = kExitFatal;
    try {
      code = r.run(ctx);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      code = kExitFatal;
    }
    try {
      write_manifest(ctx, *r.app, code, started);
    } catch (const std::exception& e) {
      err << "error: cannot write run manifest: " << e.what() << '\n';
      if (code == kExitOk) code = kExitFatal;
    }
    return code;
  }
  return kExitUsage;
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace sensemt::cli
