#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sensemt/llm_client.hpp"

namespace httplib {
class Server;
}

namespace sensemt {

/// Source word -> ordered sense translations; the first sense is the most
/// frequent one.
class MockLexicon {
 public:
  struct SenseForm {
    std::string sense;
    std::string target;
  };

  void add(std::string word, std::vector<SenseForm> forms);
  const std::vector<SenseForm>* find(std::string_view word) const;
  bool empty() const noexcept { return entries_.empty(); }

  /// {"word": [{"sense": "...", "target": "..."}, ...], ...}
  static MockLexicon parse(std::string_view json_text);

 private:
  std::map<std::string, std::vector<SenseForm>, std::less<>> entries_;
};

inline constexpr std::string_view kMockFiller = "\n<|continuation|> filler text";

/// Deterministic test double for a few-shot translator. Translates the test
/// sentence word by word; an ambiguous word takes the target form found in
/// the earliest demonstration whose source contains it, else its most
/// frequent form. Unknown words are copied. Appends a newline and filler.
std::string mock_translate(std::string_view prompt, const MockLexicon& lexicon);

/// Pieces recovered from a prompt rendered with a default template.
struct ParsedPrompt {
  std::vector<Demonstration> demos;
  std::string test_source;
};
ParsedPrompt parse_rendered_prompt(std::string_view prompt);

/// In-process HTTP endpoint speaking the native wire schema, answering with
/// mock_translate. Used by tests and the `serve-mock` subcommand.
class MockServer {
 public:
  explicit MockServer(MockLexicon lexicon, std::string required_token = {});
  ~MockServer();
  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  /// Binds to host:port (port 0 = ephemeral) and serves on a background
  /// thread. Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Blocks serving on the calling thread.
  void listen_blocking(const std::string& host, int port);
  void stop();

  std::size_t request_count() const;
  /// Makes the next `n` requests fail with HTTP 503.
  void fail_next(std::size_t n);
  /// Override the completion for every request (e.g. "OK\nX").
  void set_fixed_reply(std::string reply);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sensemt
