#include "sensemt/prompt.hpp"

#include "sensemt/text.hpp"

#include <array>
#include <map>

#include <fmt/format.h>
#include <json.hpp>

namespace sensemt {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::completion: return "completion";
    case TemplateKind::question: return "question";
    case TemplateKind::alpaca: return "alpaca";
  }
  return "completion";
}

TemplateKind parse_template_kind(std::string_view name) {
  if (name == "completion") return TemplateKind::completion;
  if (name == "question") return TemplateKind::question;
  if (name == "alpaca") return TemplateKind::alpaca;
  throw Error(fmt::format("unknown template kind '{}'", name));
}

// Keep in sync with templates/*.json; a unit test compares them.
const PromptTemplate& default_template(TemplateKind kind) {
  static const std::array<PromptTemplate, 3> kDefaults{{
      {"completion",
       "{src_lang}: {source}\n{tgt_lang}: {target}",
       "{src_lang}: {source}\n{tgt_lang}:",
       "\n\n",
       false},
      {"question",
       "{src_lang}: {source}\n{tgt_lang}: {target}",
       "{src_lang}: {source}\nWhat is the {tgt_lang} translation of this {src_lang} sentence?",
       "\n\n",
       false},
      {"alpaca",
       "",
       "Below is an instruction that describes a task, paired with an input that provides further "
       "context. Write a response that appropriately completes the request.\n\n"
       "### Instruction:\nTranslate the following sentence from {src_lang} to {tgt_lang}.\n\n"
       "### Input:\n{source}\n\n### Response:\n",
       "\n\n",
       true},
  }};
  return kDefaults[static_cast<std::size_t>(kind)];
}

PromptTemplate parse_template(std::string_view json_text) {
  json obj = json::parse(json_text, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) throw Error("template file is not a JSON object");
  auto get = [&](const char* key, bool required) -> std::string {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) throw Error(fmt::format("template is missing '{}'", key));
      return {};
    }
    if (!it->is_string()) throw Error(fmt::format("template field '{}' must be a string", key));
    return it->get<std::string>();
  };
  PromptTemplate t;
  t.name = get("name", false);
  t.demo = get("demo", false);
  t.query = get("query", true);
  t.separator = obj.contains("separator") ? get("separator", true) : "\n\n";
  if (auto it = obj.find("zero_shot_only"); it != obj.end()) {
    if (!it->is_boolean()) throw Error("template field 'zero_shot_only' must be a boolean");
    t.zero_shot_only = it->get<bool>();
  }
  if (t.query.find("{source}") == std::string::npos) throw Error("template query lacks {source}");
  if (!t.zero_shot_only && t.demo.find("{target}") == std::string::npos)
    throw Error("template demo lacks {target}");
  return t;
}

std::string serialize_template(const PromptTemplate& t) {
  ordered_json obj;
  obj["name"] = t.name;
  obj["demo"] = t.demo;
  obj["query"] = t.query;
  obj["separator"] = t.separator;
  obj["zero_shot_only"] = t.zero_shot_only;
  return obj.dump(2) + "\n";
}

std::string language_name(std::string_view code) {
  static const std::map<std::string, std::string, std::less<>> kNames{
      {"ar", "Arabic"},  {"bg", "Bulgarian"}, {"cs", "Czech"},     {"da", "Danish"},
      {"de", "German"},  {"el", "Greek"},     {"en", "English"},   {"es", "Spanish"},
      {"et", "Estonian"}, {"fi", "Finnish"},  {"fr", "French"},    {"hu", "Hungarian"},
      {"it", "Italian"}, {"ja", "Japanese"},  {"ko", "Korean"},    {"lt", "Lithuanian"},
      {"lv", "Latvian"}, {"nl", "Dutch"},     {"pl", "Polish"},    {"pt", "Portuguese"},
      {"ro", "Romanian"}, {"ru", "Russian"},  {"sk", "Slovak"},    {"sl", "Slovenian"},
      {"sv", "Swedish"}, {"tr", "Turkish"},   {"uk", "Ukrainian"}, {"zh", "Chinese"},
  };
  auto it = kNames.find(text::fold_case(code));
  return it == kNames.end() ? std::string(code) : it->second;
}

std::string GenerationParams::digest_text() const {
  return fmt::format("beam={};temperature={};no_repeat_ngram={};max_new_tokens={}", beam_size,
                     temperature, no_repeat_ngram, max_new_tokens);
}

void GenerationParams::validate() const {
  if (beam_size < 1) throw Error("beam size must be at least 1");
  if (no_repeat_ngram < 0) throw Error("no_repeat_ngram must be non-negative");
  if (max_new_tokens < 1) throw Error("max_new_tokens must be at least 1");
  if (!(temperature > 0.0)) throw Error("temperature must be positive");
}

std::string fill_placeholders(std::string_view pattern, std::string_view src_lang,
                              std::string_view tgt_lang, std::string_view source,
                              std::string_view target) {
  static constexpr std::array<std::string_view, 4> kKeys{"{src_lang}", "{tgt_lang}", "{source}",
                                                         "{target}"};
  const std::array<std::string_view, 4> values{src_lang, tgt_lang, source, target};
  std::string out;
  out.reserve(pattern.size() + source.size() + target.size());
  std::size_t i = 0;
  while (i < pattern.size()) {
    bool replaced = false;
    if (pattern[i] == '{') {
      for (std::size_t k = 0; k < kKeys.size(); ++k) {
        if (pattern.substr(i, kKeys[k].size()) == kKeys[k]) {
          out.append(values[k]);
          i += kKeys[k].size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out.push_back(pattern[i++]);
  }
  return out;
}

std::string render_prompt(const PromptSpec& spec, const PromptTemplate& tmpl) {
  if (tmpl.zero_shot_only && !spec.demos.empty())
    throw Error(fmt::format("template '{}' supports only 0-shot prompts, got {} demonstrations",
                            tmpl.name, spec.demos.size()));
  std::string out;
  for (const auto& d : spec.demos) {
    out += fill_placeholders(tmpl.demo, spec.src_lang, spec.tgt_lang, d.source, d.target);
    out += tmpl.separator;
  }
  out += fill_placeholders(tmpl.query, spec.src_lang, spec.tgt_lang, spec.test_source, "");
  return out;
}

std::string render_prompt(const PromptSpec& spec) {
  return render_prompt(spec, default_template(spec.kind));
}

std::string parse_completion(std::string_view raw) {
  const auto nl = raw.find('\n');
  return std::string(text::trim(raw.substr(0, nl)));
}

std::string alpaca_instruction(std::string_view src_lang, std::string_view tgt_lang) {
  return fmt::format("Translate the following sentence from {} to {}.", src_lang, tgt_lang);
}

AlpacaRecord render_alpaca_record(const ParallelPair& pair) {
  return {alpaca_instruction(language_name(pair.src_lang), language_name(pair.tgt_lang)),
          pair.source.text, pair.target};
}

std::string serialize_alpaca(const AlpacaRecord& r) {
  ordered_json obj;
  obj["instruction"] = r.instruction;
  obj["input"] = r.input;
  obj["output"] = r.output;
  return obj.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

AlpacaRecord parse_alpaca(std::string_view line) {
  json obj = json::parse(line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) throw Error("alpaca record is not a JSON object");
  AlpacaRecord r;
  try {
    r.instruction = obj.at("instruction").get<std::string>();
    r.input = obj.at("input").get<std::string>();
    r.output = obj.at("output").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(fmt::format("bad alpaca record: {}", e.what()));
  }
  return r;
}

}  // namespace sensemt
