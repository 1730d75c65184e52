#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Unicode helpers shared by hashing, rule filtering and decontamination.
// All strings are UTF-8.
namespace medcurate::text {

bool is_valid_utf8(std::string_view s);

std::vector<char32_t> code_points(std::string_view s);
std::string encode_utf8(char32_t cp);
std::size_t code_point_count(std::string_view s);

std::string nfc(std::string_view s);
std::string case_fold(std::string_view s);

/// NFC, then every run of Unicode whitespace becomes one ASCII space, then trim.
std::string canonicalize(std::string_view s);

/// Han ideographs (all CJK blocks), Hiragana, Katakana and Bopomofo.
bool is_cjk(char32_t cp);

/// Word segments of space-delimited scripts, with every CJK character
/// emitted as its own token. Punctuation and whitespace produce nothing.
std::vector<std::string> word_tokens(std::string_view s);

/// word_tokens over NFC + case-folded text; the unit of n-gram matching.
std::vector<std::string> normalized_tokens(std::string_view s);

std::string trim(std::string_view s);

}  // namespace medcurate::text
