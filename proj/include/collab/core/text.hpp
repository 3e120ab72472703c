#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace collab::text {

// Lenient UTF-8 decoding; invalid bytes become U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

// Simple case mapping for Latin, Greek and Cyrillic blocks.
char32_t to_lower(char32_t c);
bool is_alnum(char32_t c);
bool is_space(char32_t c);

std::string to_lower(std::string_view s);

// Lowercase, split on anything that is not alphanumeric. Never returns empty tokens.
std::vector<std::string> tokenize(std::string_view s);

// Lowercase, drop punctuation, collapse whitespace runs to one space, trim.
std::u32string normalize_for_match(std::string_view s);

std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
// 1 - distance / max(len); two empty strings are identical (1.0).
double levenshtein_similarity(std::u32string_view a, std::u32string_view b);

// FNV-1a, 64 bit. Stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string> split_words(std::string_view s);
// Sentences split on '.', '?' and '!'; trimmed, empty pieces dropped.
std::vector<std::string> split_sentences(std::string_view s);

// Truncates to at most `max_codepoints`, ending in "…" when cut.
std::string truncate_with_ellipsis(std::string_view s, std::size_t max_codepoints);
std::size_t codepoint_length(std::string_view s);

}  // namespace collab::text
