#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sensemt/error.hpp"
#include "sensemt/prompt.hpp"

namespace sensemt {

class AuthError : public Error {
 public:
  using Error::Error;
};

/// Request/response mapping for a completion API.
///   native: {"prompt","max_new_tokens","temperature","num_beams","no_repeat_ngram_size","model"}
///           -> {"text"}
///   openai: {"model","prompt","max_tokens","temperature"} -> {"choices":[{"text"}]}
///   tgi:    {"inputs","parameters":{...}} -> {"generated_text"} or [{"generated_text"}]
enum class WireSchema { native, openai, tgi };

std::string_view to_string(WireSchema schema);
WireSchema parse_wire_schema(std::string_view name);

std::string encode_request(WireSchema schema, std::string_view prompt,
                           const GenerationParams& gen, std::string_view model_id);
/// Throws Error when the body does not match the schema.
std::string decode_response(WireSchema schema, std::string_view body);

struct EndpointConfig {
  std::string base_url;  // scheme://host:port
  std::string path = "/generate";
  WireSchema schema = WireSchema::native;
  std::string token_env;  // name of the variable holding the bearer token; empty = no auth
  std::string model_id = "default";
  std::chrono::milliseconds timeout{30000};
  std::size_t max_in_flight = 4;
  int retry_budget = 3;
  std::chrono::milliseconds backoff_base{200};

  void validate() const;
};

struct CompletionRecord {
  std::string prompt_hash;
  std::string raw;
  std::string parsed;
  double latency_ms = 0.0;
  std::string model;
  GenerationParams params;
  std::optional<std::string> error;

  bool operator==(const CompletionRecord&) const = default;
};

/// Append-only completion cache: one JSON line per entry holding the key,
/// params digest, model, raw completion and latency. Later lines win.
class CompletionCache {
 public:
  CompletionCache() = default;  // in-memory only
  explicit CompletionCache(std::filesystem::path file);

  static std::string key(std::string_view prompt, const GenerationParams& gen,
                         std::string_view model_id);

  struct Entry {
    std::string raw;
    double latency_ms = 0.0;
  };

  std::optional<Entry> lookup(const std::string& key) const;
  void store(const std::string& key, const GenerationParams& gen, std::string_view model_id,
             const Entry& entry);
  std::size_t size() const;

 private:
  std::filesystem::path file_;
  mutable std::mutex mutex_;
  std::map<std::string, Entry> entries_;
};

struct BatchStats {
  std::size_t requests_sent = 0;  // network attempts, including retries
  std::size_t cache_hits = 0;
  std::size_t failures = 0;
};

/// Sends prompts concurrently (at most max_in_flight), retrying transient
/// failures with exponential backoff. Output order matches input order; a
/// permanent failure produces a record with `error` set. Throws AuthError
/// before any request if the token variable is unset, or on a 401/403.
std::vector<CompletionRecord> translate_batch(const std::vector<std::string>& prompts,
                                              const EndpointConfig& cfg,
                                              const GenerationParams& gen,
                                              CompletionCache& cache,
                                              BatchStats* stats = nullptr);

std::string serialize_record(const CompletionRecord& record, std::string_view id = {});

}  // namespace sensemt
