#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sensemt/corpus.hpp"

namespace sensemt {

enum class TemplateKind { completion, question, alpaca };

std::string_view to_string(TemplateKind kind);
TemplateKind parse_template_kind(std::string_view name);

/// Prompt template with {src_lang} {tgt_lang} {source} {target} placeholders.
/// Demonstrations use `demo`, the test sentence uses `query`, and blocks are
/// joined with `separator`.
struct PromptTemplate {
  std::string name;
  std::string demo;
  std::string query;
  std::string separator;
  bool zero_shot_only = false;

  bool operator==(const PromptTemplate&) const = default;
};

const PromptTemplate& default_template(TemplateKind kind);

/// Template file: a JSON object with keys name, demo, query, separator and
/// optional zero_shot_only.
PromptTemplate parse_template(std::string_view json_text);
std::string serialize_template(const PromptTemplate& tmpl);

/// Display name for a language code ("es" -> "Spanish"); unknown codes are
/// returned unchanged.
std::string language_name(std::string_view code);

struct Demonstration {
  std::string source;
  std::string target;
};

struct PromptSpec {
  std::vector<Demonstration> demos;
  std::string test_source;
  std::string src_lang;  // display names
  std::string tgt_lang;
  TemplateKind kind = TemplateKind::completion;
};

struct GenerationParams {
  int beam_size = 1;
  double temperature = 1.0;
  int no_repeat_ngram = 4;
  int max_new_tokens = 256;

  /// Few-shot prompting of off-the-shelf models.
  static GenerationParams prompting() { return {}; }
  /// Inference with a LoRA fine-tuned model.
  static GenerationParams finetuned_inference() { return {3, 1.0, 4, 150}; }

  /// Canonical text form; part of the completion cache key.
  std::string digest_text() const;
  void validate() const;

  bool operator==(const GenerationParams&) const = default;
};

/// Substitutes placeholders in one pass; substituted text is not rescanned
/// and unknown braces are kept verbatim.
std::string fill_placeholders(std::string_view pattern, std::string_view src_lang,
                              std::string_view tgt_lang, std::string_view source,
                              std::string_view target);

std::string render_prompt(const PromptSpec& spec);
std::string render_prompt(const PromptSpec& spec, const PromptTemplate& tmpl);

/// The part of a raw completion before the first newline, whitespace-trimmed.
std::string parse_completion(std::string_view raw);

struct AlpacaRecord {
  std::string instruction;
  std::string input;
  std::string output;

  bool operator==(const AlpacaRecord&) const = default;
};

AlpacaRecord render_alpaca_record(const ParallelPair& pair);
std::string alpaca_instruction(std::string_view src_lang, std::string_view tgt_lang);
std::string serialize_alpaca(const AlpacaRecord& record);
AlpacaRecord parse_alpaca(std::string_view line);

}  // namespace sensemt
