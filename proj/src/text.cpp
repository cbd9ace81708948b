#include "msacheck/text.hpp"

#include <array>
#include <cctype>
#include <cstdio>

namespace msacheck::text {

std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    while (i < n && is_space(s[i])) ++i;
    if (i == n) break;
    std::size_t start = i;
    while (i < n && !is_space(s[i])) ++i;
    out.emplace_back(s.substr(start, i - start));
  }
  return out;
}

std::size_t count_words(std::string_view s) {
  std::size_t count = 0;
  bool in_word = false;
  for (char c : s) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

std::string join(const std::vector<std::string_view>& words, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += sep;
    out += words[i];
  }
  return out;
}

std::string collapse_whitespace(std::string_view s) { return join(split_words(s)); }

std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

namespace {

// Multi-byte punctuation stripped from token edges.
constexpr std::array<std::string_view, 10> kUtf8Punct = {
    "\xE2\x80\x98",  // left single quote
    "\xE2\x80\x99",  // right single quote
    "\xE2\x80\x9C",  // left double quote
    "\xE2\x80\x9D",  // right double quote
    "\xE2\x80\x93",  // en dash
    "\xE2\x80\x94",  // em dash
    "\xE2\x80\xA2",  // bullet
    "\xE2\x80\xA6",  // ellipsis
    "\xC2\xAB",      // left guillemet
    "\xC2\xBB",      // right guillemet
};

bool strip_front(std::string_view& t) {
  if (t.empty()) return false;
  if (std::ispunct(static_cast<unsigned char>(t.front()))) {
    t.remove_prefix(1);
    return true;
  }
  for (auto p : kUtf8Punct) {
    if (t.starts_with(p)) {
      t.remove_prefix(p.size());
      return true;
    }
  }
  return false;
}

bool strip_back(std::string_view& t) {
  if (t.empty()) return false;
  if (std::ispunct(static_cast<unsigned char>(t.back()))) {
    t.remove_suffix(1);
    return true;
  }
  for (auto p : kUtf8Punct) {
    if (t.ends_with(p)) {
      t.remove_suffix(p.size());
      return true;
    }
  }
  return false;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string normalize_token(std::string_view token) {
  while (strip_front(token)) {
  }
  while (strip_back(token)) {
  }
  return to_lower(token);
}

std::vector<std::string> normalized_tokens(std::string_view s) {
  std::vector<std::string> out;
  for (auto w : split_words(s)) {
    auto t = normalize_token(w);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace msacheck::text
