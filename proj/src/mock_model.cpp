#include "sensemt/mock_model.hpp"

#include "sensemt/text.hpp"

#include <atomic>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

namespace sensemt {

using nlohmann::json;

void MockLexicon::add(std::string word, std::vector<SenseForm> forms) {
  if (forms.empty()) throw Error(fmt::format("lexicon entry '{}' has no translations", word));
  entries_[text::fold_case(word)] = std::move(forms);
}

const std::vector<MockLexicon::SenseForm>* MockLexicon::find(std::string_view word) const {
  auto it = entries_.find(text::fold_case(word));
  return it == entries_.end() ? nullptr : &it->second;
}

MockLexicon MockLexicon::parse(std::string_view json_text) {
  json obj = json::parse(json_text, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) throw Error("lexicon is not a JSON object");
  MockLexicon lex;
  for (const auto& [word, forms] : obj.items()) {
    if (!forms.is_array()) throw Error(fmt::format("lexicon entry '{}' must be an array", word));
    std::vector<SenseForm> list;
    for (const auto& f : forms) {
      if (!f.is_object() || !f.contains("target") || !f["target"].is_string())
        throw Error(fmt::format("lexicon entry '{}' needs objects with a 'target' string", word));
      list.push_back({f.value("sense", std::string{}), f["target"].get<std::string>()});
    }
    lex.add(word, std::move(list));
  }
  return lex;
}

namespace {

std::string_view after_label(std::string_view line) {
  const auto colon = line.find(": ");
  return colon == std::string_view::npos ? line : line.substr(colon + 2);
}

std::vector<std::string_view> split_on(std::string_view s, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + sep.size();
  }
}

bool contains_token(std::string_view sentence, std::string_view word) {
  const auto folded = text::fold_case(word);
  for (const auto& t : text::word_tokens(text::fold_case(sentence))) {
    if (t == folded) return true;
  }
  return false;
}

bool is_edge_punct(char c) {
  return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' || c == '"' || c == '\'' ||
         c == '(' || c == ')';
}

}  // namespace

ParsedPrompt parse_rendered_prompt(std::string_view prompt) {
  ParsedPrompt parsed;
  constexpr std::string_view kInput = "### Input:\n";
  constexpr std::string_view kResponse = "\n\n### Response:";
  if (const auto in = prompt.find(kInput); in != std::string_view::npos) {
    const auto start = in + kInput.size();
    const auto end = prompt.find(kResponse, start);
    parsed.test_source = std::string(prompt.substr(start, end == std::string_view::npos ? end : end - start));
    return parsed;
  }
  const auto blocks = split_on(prompt, "\n\n");
  for (std::size_t b = 0; b + 1 < blocks.size(); ++b) {
    const auto lines = split_on(blocks[b], "\n");
    Demonstration d;
    d.source = std::string(after_label(lines[0]));
    if (lines.size() > 1) d.target = std::string(after_label(lines[1]));
    parsed.demos.push_back(std::move(d));
  }
  const auto query_lines = split_on(blocks.back(), "\n");
  parsed.test_source = std::string(after_label(query_lines[0]));
  return parsed;
}

std::string mock_translate(std::string_view prompt, const MockLexicon& lexicon) {
  const auto parsed = parse_rendered_prompt(prompt);
  std::string out;
  for (const auto& raw : text::split(parsed.test_source, ' ')) {
    if (raw.empty()) continue;
    std::size_t lo = 0;
    std::size_t hi = raw.size();
    while (lo < hi && is_edge_punct(raw[lo])) ++lo;
    while (hi > lo && is_edge_punct(raw[hi - 1])) --hi;
    const auto core = raw.substr(lo, hi - lo);
    std::string rendered;
    const auto* forms = core.empty() ? nullptr : lexicon.find(core);
    if (!forms) {
      rendered = std::string(raw);
    } else {
      const std::string* chosen = &forms->front().target;
      if (forms->size() > 1) {
        for (const auto& demo : parsed.demos) {
          if (!contains_token(demo.source, core)) continue;
          for (const auto& f : *forms) {
            if (contains_token(demo.target, f.target)) {
              chosen = &f.target;
              break;
            }
          }
          break;
        }
      }
      rendered = fmt::format("{}{}{}", raw.substr(0, lo), *chosen, raw.substr(hi));
    }
    if (!out.empty()) out.push_back(' ');
    out += rendered;
  }
  out += kMockFiller;
  return out;
}

struct MockServer::Impl {
  MockLexicon lexicon;
  std::string required_token;
  httplib::Server server;
  std::thread thread;
  std::atomic<std::size_t> requests{0};
  std::atomic<std::size_t> fail_remaining{0};
  std::mutex reply_mutex;
  std::optional<std::string> fixed_reply;

  void install() {
    server.Post("/generate", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests;
      if (!required_token.empty() && req.get_header_value("Authorization") != "Bearer " + required_token) {
        res.status = 401;
        res.set_content(R"({"error":"unauthorized"})", "application/json");
        return;
      }
      for (auto n = fail_remaining.load(); n > 0;) {
        if (fail_remaining.compare_exchange_weak(n, n - 1)) {
          res.status = 503;
          res.set_content(R"({"error":"unavailable"})", "application/json");
          return;
        }
      }
      json body = json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object() || !body.contains("prompt") || !body["prompt"].is_string()) {
        res.status = 400;
        res.set_content(R"({"error":"bad request"})", "application/json");
        return;
      }
      std::string completion;
      {
        std::lock_guard lock(reply_mutex);
        if (fixed_reply) completion = *fixed_reply;
      }
      if (completion.empty()) completion = mock_translate(body["prompt"].get<std::string>(), lexicon);
      json reply;
      reply["text"] = completion;
      res.set_content(reply.dump(), "application/json");
    });
  }
};

MockServer::MockServer(MockLexicon lexicon, std::string required_token) : impl_(std::make_unique<Impl>()) {
  impl_->lexicon = std::move(lexicon);
  impl_->required_token = std::move(required_token);
  impl_->install();
}

MockServer::~MockServer() { stop(); }

int MockServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error(fmt::format("mock server cannot bind {}:{}", host, port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void MockServer::listen_blocking(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) throw Error(fmt::format("mock server cannot listen on {}:{}", host, port));
}

void MockServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::size_t MockServer::request_count() const { return impl_->requests.load(); }

void MockServer::fail_next(std::size_t n) { impl_->fail_remaining = n; }

void MockServer::set_fixed_reply(std::string reply) {
  std::lock_guard lock(impl_->reply_mutex);
  impl_->fixed_reply = std::move(reply);
}

}  // namespace sensemt
