#pragma once

#include <string>
#include <string_view>
#include <vector>

// ASCII-only text helpers. Review text is UTF-8; non-ASCII bytes pass through
// untouched, which keeps byte offsets stable.
namespace reviewlens::text {

inline bool is_space(char c) noexcept {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_alpha(char c) noexcept {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline char to_lower(char c) noexcept {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string lower(std::string_view s);
std::string_view trim(std::string_view s);

/// Whitespace-separated tokens.
std::vector<std::string_view> words(std::string_view s);
std::size_t word_count(std::string_view s);

/// Lowercased alphanumeric runs (apostrophes kept inside words).
std::vector<std::string> tokens(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Splits on every occurrence of `sep`. Never returns an empty vector.
std::vector<std::string> split(std::string_view s, std::string_view sep);

bool iequals(std::string_view a, std::string_view b);

}  // namespace reviewlens::text
