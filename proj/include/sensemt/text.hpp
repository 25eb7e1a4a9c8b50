#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sensemt::text {

std::string_view trim(std::string_view s);

/// Simple case folding: ASCII, Latin-1 supplement, Greek and Cyrillic.
/// Other code points pass through unchanged.
std::string fold_case(std::string_view s);

bool has_whitespace(std::string_view s);

/// Decodes UTF-8 leniently; invalid bytes map to U+FFFD.
std::vector<char32_t> decode_utf8(std::string_view s);
void append_utf8(std::string& out, char32_t cp);

/// True for scripts written without spaces between words (Han, kana, Thai...).
bool is_unsegmented_script(char32_t cp);
bool contains_unsegmented_script(std::string_view s);

/// Splits into word tokens: runs of characters that are neither whitespace
/// nor punctuation. Unsegmented-script characters are kept inside runs.
std::vector<std::string> word_tokens(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);

}  // namespace sensemt::text
