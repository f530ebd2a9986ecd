#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace trackaudit::strings {

inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string to_lower(std::string_view s);

bool iequals(std::string_view a, std::string_view b);

std::string_view trim(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);

// Splits on runs of ASCII whitespace, dropping empty tokens.
std::vector<std::string_view> split_ws(std::string_view s);

bool contains_ci(std::string_view haystack, std::string_view needle);

// Lowercases ASCII, collapses whitespace runs to single spaces, trims, and
// maps typographic apostrophes (U+2019) to ASCII. Used for matching visible
// text against configured phrases.
std::string normalize_phrase(std::string_view s);

std::string format_double2(double v);  // fixed 2 decimals, e.g. "3.98"

}  // namespace trackaudit::strings
