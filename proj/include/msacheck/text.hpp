#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace msacheck::text {

constexpr bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Words are maximal runs of non-whitespace bytes.
std::vector<std::string_view> split_words(std::string_view s);
std::size_t count_words(std::string_view s);
std::string collapse_whitespace(std::string_view s);
std::string_view trim(std::string_view s);
std::string join(const std::vector<std::string_view>& words, std::string_view sep = " ");

// Lowercase ASCII letters and strip punctuation (ASCII plus common UTF-8
// quotes and dashes) from both token edges. May return an empty string.
std::string normalize_token(std::string_view token);

// Normalized, non-empty tokens of `s` in order.
std::vector<std::string> normalized_tokens(std::string_view s);

std::string to_lower(std::string_view s);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

}  // namespace msacheck::text
