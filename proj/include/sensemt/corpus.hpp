#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sensemt/error.hpp"
#include "sensemt/exec.hpp"

namespace sensemt {

/// Opaque knowledge-base concept key, e.g. a BabelNet synset id.
class SenseId {
 public:
  SenseId() = default;
  /// Throws Error when empty or containing whitespace.
  explicit SenseId(std::string value);

  const std::string& str() const noexcept { return value_; }

  auto operator<=>(const SenseId&) const = default;
  bool operator==(const SenseId&) const = default;

 private:
  std::string value_;
};

struct AnnotatedToken {
  std::string surface;
  std::string lemma;  // lowercase
  std::string pos;    // may be empty
  std::optional<SenseId> sense;
  std::size_t start = 0;  // byte offsets into the sentence text, [start, end)
  std::size_t end = 0;

  bool operator==(const AnnotatedToken&) const = default;
};

struct AnnotatedSentence {
  std::string id;
  std::string text;
  std::vector<AnnotatedToken> tokens;

  std::size_t sense_token_count() const;
  bool has_sense(const SenseId& sense) const;

  bool operator==(const AnnotatedSentence&) const = default;
};

struct ParallelPair {
  AnnotatedSentence source;
  std::string target;
  std::string src_lang;
  std::string tgt_lang;

  const std::string& id() const noexcept { return source.id; }

  bool operator==(const ParallelPair&) const = default;
};

/// One benchmark item: a sentence with exactly one sense-bearing token and
/// the acceptable (good) and wrong-sense (bad) target lexicalizations.
struct EvalItem {
  std::string id;
  AnnotatedSentence source;
  std::vector<std::string> good;
  std::vector<std::string> bad;
  std::string src_lang;  // optional in the file
  std::string tgt_lang;

  const AnnotatedToken& ambiguous_token() const;

  bool operator==(const EvalItem&) const = default;
};

template <typename T>
struct ParseResult {
  std::vector<T> records;
  std::vector<Diagnostic> diagnostics;
};

/// Parses the line-delimited annotated-corpus format. Malformed lines and
/// duplicate ids become diagnostics; the first occurrence of an id wins.
/// Throws Error if the stream is unreadable.
ParseResult<ParallelPair> parse_annotated_corpus(std::istream& in, Exec exec = Exec::parallel);
ParseResult<ParallelPair> parse_annotated_corpus(std::string_view contents,
                                                 Exec exec = Exec::parallel);

ParseResult<EvalItem> parse_eval_set(std::istream& in);
ParseResult<EvalItem> parse_eval_set(std::string_view contents);

/// Parses only the sentence fields (id, text, tokens) of each record; any
/// other fields are ignored. Accepts both corpus and eval-set files.
ParseResult<AnnotatedSentence> parse_sentences(std::string_view contents);

std::string serialize_pair(const ParallelPair& pair);
std::string serialize_eval_item(const EvalItem& item);
std::string serialize_corpus(const std::vector<ParallelPair>& pairs);

struct CorpusStats {
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::size_t sense_tokens = 0;
  std::size_t distinct_lemmas = 0;        // over all tokens
  std::size_t distinct_sense_lemmas = 0;  // lemmas that carry a sense somewhere
  std::size_t distinct_senses = 0;

  bool operator==(const CorpusStats&) const = default;
};

CorpusStats validate_corpus(const std::vector<ParallelPair>& pairs);

/// Checks the sentence-level invariants; returns the first violation.
std::optional<std::string> check_sentence(const AnnotatedSentence& sentence);

/// Read-only lookup of pairs by sentence id over a corpus vector.
class CorpusView {
 public:
  explicit CorpusView(const std::vector<ParallelPair>& pairs);

  const ParallelPair* find(std::string_view id) const;
  const std::vector<ParallelPair>& pairs() const noexcept { return *pairs_; }
  std::size_t size() const noexcept { return pairs_->size(); }

 private:
  const std::vector<ParallelPair>* pairs_;
  std::unordered_map<std::string_view, std::size_t> by_id_;
};

}  // namespace sensemt

template <>
struct std::hash<sensemt::SenseId> {
  std::size_t operator()(const sensemt::SenseId& s) const noexcept {
    return std::hash<std::string>{}(s.str());
  }
};
