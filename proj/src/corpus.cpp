#include "sensemt/corpus.hpp"

#include "sensemt/io.hpp"
#include "sensemt/text.hpp"

#include <set>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

namespace sensemt {

using nlohmann::json;
using nlohmann::ordered_json;

SenseId::SenseId(std::string value) : value_(std::move(value)) {
  if (value_.empty()) throw Error("sense id is empty");
  if (text::has_whitespace(value_)) throw Error(fmt::format("sense id '{}' contains whitespace", value_));
}

std::size_t AnnotatedSentence::sense_token_count() const {
  std::size_t n = 0;
  for (const auto& t : tokens) n += t.sense.has_value();
  return n;
}

bool AnnotatedSentence::has_sense(const SenseId& sense) const {
  for (const auto& t : tokens) {
    if (t.sense && *t.sense == sense) return true;
  }
  return false;
}

const AnnotatedToken& EvalItem::ambiguous_token() const {
  for (const auto& t : source.tokens) {
    if (t.sense) return t;
  }
  throw Error(fmt::format("eval item {} has no sense-bearing token", id));
}

std::optional<std::string> check_sentence(const AnnotatedSentence& s) {
  if (s.id.empty()) return "empty sentence id";
  std::size_t prev_end = 0;
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    const auto& t = s.tokens[i];
    if (t.start >= t.end) return fmt::format("token {}: empty or inverted span [{}, {})", i, t.start, t.end);
    if (t.end > s.text.size())
      return fmt::format("token {}: span end {} exceeds text length {}", i, t.end, s.text.size());
    if (t.start < prev_end) return fmt::format("token {}: span overlaps or precedes token {}", i, i - 1);
    if (std::string_view(s.text).substr(t.start, t.end - t.start) != t.surface)
      return fmt::format("token {}: surface '{}' does not match text span", i, t.surface);
    if (t.sense && t.lemma.empty()) return fmt::format("token {}: sense without lemma", i);
    prev_end = t.end;
  }
  return std::nullopt;
}

namespace {

std::string require_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(fmt::format("missing field '{}'", key));
  if (!it->is_string()) throw Error(fmt::format("field '{}' must be a string", key));
  return it->get<std::string>();
}

std::string optional_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) throw Error(fmt::format("field '{}' must be a string", key));
  return it->get<std::string>();
}

std::size_t require_offset(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(fmt::format("missing field '{}'", key));
  if (!it->is_number_unsigned()) throw Error(fmt::format("field '{}' must be a non-negative integer", key));
  return it->get<std::size_t>();
}

AnnotatedSentence sentence_from_json(const json& obj) {
  if (!obj.is_object()) throw Error("record is not an object");
  AnnotatedSentence s;
  s.id = require_string(obj, "id");
  s.text = require_string(obj, "text");
  auto tokens = obj.find("tokens");
  if (tokens == obj.end()) throw Error("missing field 'tokens'");
  if (!tokens->is_array()) throw Error("field 'tokens' must be an array");
  for (const auto& tj : *tokens) {
    if (!tj.is_object()) throw Error("token is not an object");
    AnnotatedToken t;
    t.surface = require_string(tj, "surface");
    t.lemma = text::fold_case(optional_string(tj, "lemma"));
    t.pos = optional_string(tj, "pos");
    if (auto sense = optional_string(tj, "sense"); !sense.empty()) t.sense = SenseId(std::move(sense));
    else if (tj.contains("sense") && tj["sense"].is_string()) throw Error("sense id is empty");
    t.start = require_offset(tj, "start");
    t.end = require_offset(tj, "end");
    s.tokens.push_back(std::move(t));
  }
  if (auto problem = check_sentence(s)) throw Error(*problem);
  return s;
}

ParallelPair pair_from_json(const json& obj) {
  ParallelPair p;
  p.source = sentence_from_json(obj);
  p.target = require_string(obj, "target");
  p.src_lang = require_string(obj, "src_lang");
  p.tgt_lang = require_string(obj, "tgt_lang");
  if (p.target.empty()) throw Error("empty target");
  if (p.src_lang.empty() || p.tgt_lang.empty()) throw Error("empty language code");
  if (p.src_lang == p.tgt_lang) throw Error(fmt::format("source and target language are both '{}'", p.src_lang));
  return p;
}

std::vector<std::string> variant_list(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(fmt::format("missing field '{}'", key));
  if (!it->is_array()) throw Error(fmt::format("field '{}' must be an array", key));
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) throw Error(fmt::format("field '{}' must hold strings", key));
    auto s = v.get<std::string>();
    if (text::trim(s).empty()) throw Error(fmt::format("empty variant in '{}'", key));
    out.push_back(std::move(s));
  }
  if (out.empty()) throw Error(fmt::format("field '{}' is empty", key));
  return out;
}

EvalItem eval_from_json(const json& obj) {
  EvalItem item;
  item.source = sentence_from_json(obj);
  item.id = item.source.id;
  if (item.source.sense_token_count() != 1)
    throw Error(fmt::format("expected exactly one sense-bearing token, found {}",
                            item.source.sense_token_count()));
  item.good = variant_list(obj, "good");
  item.bad = variant_list(obj, "bad");
  std::set<std::string> folded_good;
  for (const auto& g : item.good) folded_good.insert(text::fold_case(g));
  for (const auto& b : item.bad) {
    if (folded_good.contains(text::fold_case(b)))
      throw Error(fmt::format("'{}' is listed as both good and bad", b));
  }
  item.src_lang = optional_string(obj, "src_lang");
  item.tgt_lang = optional_string(obj, "tgt_lang");
  return item;
}

bool blank(std::string_view line) { return text::trim(line).empty(); }

template <typename T, typename Fn>
ParseResult<T> parse_lines(const std::vector<std::string>& lines, Fn&& parse_one, Exec exec,
                           bool dedupe_ids) {
  struct Outcome {
    std::optional<T> value;
    std::string error;
  };
  std::vector<Outcome> outcomes(lines.size());
  const auto n = static_cast<std::ptrdiff_t>(lines.size());
  auto work = [&](std::ptrdiff_t i) {
    const auto& line = lines[static_cast<std::size_t>(i)];
    if (blank(line)) return;
    auto& slot = outcomes[static_cast<std::size_t>(i)];
    json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded()) {
      slot.error = "malformed record syntax";
      return;
    }
    try {
      slot.value = parse_one(obj);
    } catch (const std::exception& e) {
      slot.error = e.what();
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 256)
    for (std::ptrdiff_t i = 0; i < n; ++i) work(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) work(i);
  }

  ParseResult<T> result;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    auto& o = outcomes[i];
    if (!o.error.empty()) {
      result.diagnostics.push_back({i + 1, std::move(o.error)});
      continue;
    }
    if (!o.value) continue;
    if (dedupe_ids) {
      const std::string& id = [&]() -> const std::string& {
        if constexpr (std::is_same_v<T, ParallelPair>) return o.value->id();
        else return o.value->id;
      }();
      if (!seen.insert(id).second) {
        result.diagnostics.push_back({i + 1, fmt::format("duplicate sentence id '{}' skipped", id)});
        continue;
      }
    }
    result.records.push_back(std::move(*o.value));
  }
  return result;
}

std::string slurp(std::istream& in) {
  if (!in) throw Error("input stream is not readable");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error("read error on input stream");
  return std::move(buf).str();
}

ordered_json sentence_to_json(const AnnotatedSentence& s) {
  ordered_json obj;
  obj["id"] = s.id;
  obj["text"] = s.text;
  auto tokens = ordered_json::array();
  for (const auto& t : s.tokens) {
    ordered_json tj;
    tj["surface"] = t.surface;
    tj["lemma"] = t.lemma;
    if (!t.pos.empty()) tj["pos"] = t.pos;
    if (t.sense) tj["sense"] = t.sense->str();
    tj["start"] = t.start;
    tj["end"] = t.end;
    tokens.push_back(std::move(tj));
  }
  obj["tokens"] = std::move(tokens);
  return obj;
}

std::string dump(const ordered_json& obj) {
  return obj.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

}  // namespace

ParseResult<ParallelPair> parse_annotated_corpus(std::string_view contents, Exec exec) {
  return parse_lines<ParallelPair>(io::split_lines(contents), pair_from_json, exec, true);
}

ParseResult<ParallelPair> parse_annotated_corpus(std::istream& in, Exec exec) {
  return parse_annotated_corpus(slurp(in), exec);
}

ParseResult<EvalItem> parse_eval_set(std::string_view contents) {
  return parse_lines<EvalItem>(io::split_lines(contents), eval_from_json, Exec::serial, true);
}

ParseResult<EvalItem> parse_eval_set(std::istream& in) { return parse_eval_set(slurp(in)); }

ParseResult<AnnotatedSentence> parse_sentences(std::string_view contents) {
  return parse_lines<AnnotatedSentence>(io::split_lines(contents), sentence_from_json, Exec::serial,
                                        true);
}

std::string serialize_pair(const ParallelPair& pair) {
  auto obj = sentence_to_json(pair.source);
  obj["target"] = pair.target;
  obj["src_lang"] = pair.src_lang;
  obj["tgt_lang"] = pair.tgt_lang;
  return dump(obj);
}

std::string serialize_eval_item(const EvalItem& item) {
  auto obj = sentence_to_json(item.source);
  obj["good"] = item.good;
  obj["bad"] = item.bad;
  if (!item.src_lang.empty()) obj["src_lang"] = item.src_lang;
  if (!item.tgt_lang.empty()) obj["tgt_lang"] = item.tgt_lang;
  return dump(obj);
}

std::string serialize_corpus(const std::vector<ParallelPair>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    out += serialize_pair(p);
    out += '\n';
  }
  return out;
}

CorpusStats validate_corpus(const std::vector<ParallelPair>& pairs) {
  CorpusStats stats;
  std::set<std::string_view> lemmas;
  std::set<std::string_view> sense_lemmas;
  std::set<std::string_view> senses;
  stats.sentences = pairs.size();
  for (const auto& p : pairs) {
    stats.tokens += p.source.tokens.size();
    for (const auto& t : p.source.tokens) {
      if (!t.lemma.empty()) lemmas.insert(t.lemma);
      if (t.sense) {
        ++stats.sense_tokens;
        sense_lemmas.insert(t.lemma);
        senses.insert(t.sense->str());
      }
    }
  }
  stats.distinct_lemmas = lemmas.size();
  stats.distinct_sense_lemmas = sense_lemmas.size();
  stats.distinct_senses = senses.size();
  return stats;
}

CorpusView::CorpusView(const std::vector<ParallelPair>& pairs) : pairs_(&pairs) {
  by_id_.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) by_id_.emplace(pairs[i].id(), i);
}

const ParallelPair* CorpusView::find(std::string_view id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &(*pairs_)[it->second];
}

}  // namespace sensemt
