#include "sensemt/llm_client.hpp"

#include "sensemt/digest.hpp"
#include "sensemt/io.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

namespace sensemt {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(WireSchema schema) {
  switch (schema) {
    case WireSchema::native: return "native";
    case WireSchema::openai: return "openai";
    case WireSchema::tgi: return "tgi";
  }
  return "native";
}

WireSchema parse_wire_schema(std::string_view name) {
  if (name == "native") return WireSchema::native;
  if (name == "openai") return WireSchema::openai;
  if (name == "tgi") return WireSchema::tgi;
  throw Error(fmt::format("unknown wire schema '{}'", name));
}

std::string encode_request(WireSchema schema, std::string_view prompt, const GenerationParams& gen,
                           std::string_view model_id) {
  ordered_json body;
  switch (schema) {
    case WireSchema::native:
      body["prompt"] = prompt;
      body["max_new_tokens"] = gen.max_new_tokens;
      body["temperature"] = gen.temperature;
      body["num_beams"] = gen.beam_size;
      body["no_repeat_ngram_size"] = gen.no_repeat_ngram;
      body["model"] = model_id;
      break;
    case WireSchema::openai:
      body["model"] = model_id;
      body["prompt"] = prompt;
      body["max_tokens"] = gen.max_new_tokens;
      body["temperature"] = gen.temperature;
      break;
    case WireSchema::tgi:
      body["inputs"] = prompt;
      body["parameters"] = {{"max_new_tokens", gen.max_new_tokens},
                            {"temperature", gen.temperature},
                            {"num_beams", gen.beam_size},
                            {"no_repeat_ngram_size", gen.no_repeat_ngram},
                            {"do_sample", false}};
      break;
  }
  return body.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

std::string decode_response(WireSchema schema, std::string_view body) {
  json obj = json::parse(body, nullptr, false);
  if (obj.is_discarded()) throw Error("response is not valid JSON");
  auto text_field = [](const json& o, const char* key) -> std::string {
    if (!o.is_object()) throw Error("response is not a JSON object");
    auto it = o.find(key);
    if (it == o.end() || !it->is_string()) throw Error(fmt::format("response lacks string field '{}'", key));
    return it->get<std::string>();
  };
  switch (schema) {
    case WireSchema::native: return text_field(obj, "text");
    case WireSchema::openai: {
      if (!obj.is_object() || !obj.contains("choices") || !obj["choices"].is_array() || obj["choices"].empty())
        throw Error("response lacks 'choices'");
      return text_field(obj["choices"][0], "text");
    }
    case WireSchema::tgi:
      if (obj.is_array()) {
        if (obj.empty()) throw Error("response array is empty");
        return text_field(obj[0], "generated_text");
      }
      return text_field(obj, "generated_text");
  }
  throw Error("unknown schema");
}

void EndpointConfig::validate() const {
  if (base_url.empty()) throw Error("endpoint base URL is empty");
  if (timeout.count() <= 0) throw Error("endpoint timeout must be positive");
  if (max_in_flight < 1) throw Error("max in-flight requests must be at least 1");
  if (retry_budget < 0) throw Error("retry budget must be non-negative");
}

CompletionCache::CompletionCache(std::filesystem::path file) : file_(std::move(file)) {
  if (!std::filesystem::exists(file_)) return;
  const auto contents = io::read_file(file_);
  for (const auto& line : io::split_lines(contents)) {
    json obj = json::parse(line, nullptr, false);
    // A torn final line from an interrupted run is ignored.
    if (obj.is_discarded() || !obj.is_object()) continue;
    auto key = obj.find("key");
    auto completion = obj.find("completion");
    if (key == obj.end() || !key->is_string() || completion == obj.end() || !completion->is_string())
      continue;
    Entry e;
    e.raw = completion->get<std::string>();
    if (auto lat = obj.find("latency_ms"); lat != obj.end() && lat->is_number()) e.latency_ms = lat->get<double>();
    entries_[key->get<std::string>()] = std::move(e);
  }
}

std::string CompletionCache::key(std::string_view prompt, const GenerationParams& gen,
                                 std::string_view model_id) {
  std::string material(prompt);
  material += '\x1f';
  material += gen.digest_text();
  material += '\x1f';
  material += model_id;
  return sha256_hex(material);
}

std::optional<CompletionCache::Entry> CompletionCache::lookup(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void CompletionCache::store(const std::string& key, const GenerationParams& gen,
                            std::string_view model_id, const Entry& entry) {
  std::lock_guard lock(mutex_);
  entries_[key] = entry;
  if (file_.empty()) return;
  ordered_json obj;
  obj["key"] = key;
  obj["params"] = sha256_hex(gen.digest_text());
  obj["model"] = model_id;
  obj["completion"] = entry.raw;
  obj["latency_ms"] = entry.latency_ms;
  if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
  std::ofstream out(file_, std::ios::app | std::ios::binary);
  if (!out) throw Error(fmt::format("cannot append to cache {}", file_.string()));
  out << obj.dump(-1, ' ', false, ordered_json::error_handler_t::replace) << '\n';
  out.flush();
}

std::size_t CompletionCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

namespace {

bool is_transient(int status) { return status == 408 || status == 429 || status >= 500; }

struct Outcome {
  std::string raw;
  std::optional<std::string> error;
  bool auth_failed = false;
  double latency_ms = 0.0;
  std::size_t attempts = 0;
};

Outcome send_one(httplib::Client& client, const EndpointConfig& cfg, const std::string& body) {
  Outcome out;
  const auto started = std::chrono::steady_clock::now();
  for (int attempt = 0;; ++attempt) {
    ++out.attempts;
    auto res = client.Post(cfg.path, body, "application/json");
    std::string failure;
    bool retry = false;
    if (!res) {
      failure = fmt::format("request failed: {}", httplib::to_string(res.error()));
      retry = true;
    } else if (res->status == 401 || res->status == 403) {
      out.auth_failed = true;
      out.error = fmt::format("authentication rejected (HTTP {})", res->status);
      return out;
    } else if (res->status == 200) {
      try {
        out.raw = decode_response(cfg.schema, res->body);
      } catch (const Error& e) {
        out.error = fmt::format("malformed response: {}", e.what());
        return out;
      }
      out.latency_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
      return out;
    } else {
      failure = fmt::format("HTTP {}", res->status);
      retry = is_transient(res->status);
    }
    if (!retry || attempt >= cfg.retry_budget) {
      out.error = failure + (retry ? fmt::format(" after {} attempts", attempt + 1) : "");
      return out;
    }
    std::this_thread::sleep_for(cfg.backoff_base * (1LL << std::min(attempt, 16)));
  }
}

}  // namespace

std::vector<CompletionRecord> translate_batch(const std::vector<std::string>& prompts,
                                              const EndpointConfig& cfg, const GenerationParams& gen,
                                              CompletionCache& cache, BatchStats* stats) {
  std::vector<CompletionRecord> records(prompts.size());
  if (prompts.empty()) return records;
  cfg.validate();
  gen.validate();

  BatchStats local;
  std::vector<std::string> keys(prompts.size());
  std::vector<std::size_t> pending;
  std::unordered_map<std::string, std::size_t> first_pending;
  std::vector<std::pair<std::size_t, std::size_t>> copies;  // (index, source index)
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    keys[i] = CompletionCache::key(prompts[i], gen, cfg.model_id);
    auto& r = records[i];
    r.prompt_hash = keys[i];
    r.model = cfg.model_id;
    r.params = gen;
    if (auto hit = cache.lookup(keys[i])) {
      r.raw = hit->raw;
      r.parsed = parse_completion(r.raw);
      r.latency_ms = hit->latency_ms;
      ++local.cache_hits;
    } else if (auto [it, inserted] = first_pending.emplace(keys[i], i); inserted) {
      pending.push_back(i);
    } else {
      copies.emplace_back(i, it->second);
    }
  }

  if (!pending.empty()) {
    std::string token;
    if (!cfg.token_env.empty()) {
      const char* value = std::getenv(cfg.token_env.c_str());
      if (value == nullptr || *value == '\0')
        throw AuthError(fmt::format("environment variable {} holding the API token is not set", cfg.token_env));
      token = value;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> sent{0};
    std::atomic<bool> auth_failed{false};
    const auto workers = std::min(cfg.max_in_flight, pending.size());
    auto worker = [&] {
      httplib::Client client(cfg.base_url);
      const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout);
      const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg.timeout - secs);
      client.set_connection_timeout(secs.count(), usecs.count());
      client.set_read_timeout(secs.count(), usecs.count());
      client.set_write_timeout(secs.count(), usecs.count());
      if (!token.empty()) client.set_bearer_token_auth(token);
      while (!auth_failed.load()) {
        const auto slot = next.fetch_add(1);
        if (slot >= pending.size()) break;
        const auto i = pending[slot];
        auto outcome = send_one(client, cfg, encode_request(cfg.schema, prompts[i], gen, cfg.model_id));
        sent += outcome.attempts;
        auto& r = records[i];
        if (outcome.auth_failed) auth_failed = true;
        if (outcome.error) {
          r.error = std::move(outcome.error);
          continue;
        }
        r.raw = std::move(outcome.raw);
        r.parsed = parse_completion(r.raw);
        r.latency_ms = outcome.latency_ms;
        cache.store(keys[i], gen, cfg.model_id, {r.raw, r.latency_ms});
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    local.requests_sent = sent.load();
    if (auth_failed) throw AuthError(fmt::format("endpoint {} rejected the credentials", cfg.base_url));
  }

  for (const auto& [i, src] : copies) {
    const auto hash = records[i].prompt_hash;
    records[i] = records[src];
    records[i].prompt_hash = hash;
  }
  for (const auto& r : records) local.failures += r.error.has_value();
  if (stats) *stats = local;
  return records;
}

std::string serialize_record(const CompletionRecord& r, std::string_view id) {
  ordered_json obj;
  if (!id.empty()) obj["id"] = id;
  obj["prompt_hash"] = r.prompt_hash;
  obj["raw"] = r.raw;
  obj["translation"] = r.parsed;
  obj["model"] = r.model;
  obj["params"] = {{"beam_size", r.params.beam_size},
                   {"temperature", r.params.temperature},
                   {"no_repeat_ngram_size", r.params.no_repeat_ngram},
                   {"max_new_tokens", r.params.max_new_tokens}};
  obj["latency_ms"] = r.latency_ms;
  if (r.error) obj["error"] = *r.error;
  return obj.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

}  // namespace sensemt
