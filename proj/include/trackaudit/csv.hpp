#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace trackaudit::csv {

// RFC 4180-style quoting: a field is quoted when it contains a comma, quote,
// or newline; embedded quotes are doubled.
std::string escape(std::string_view field);

std::string join_row(const std::vector<std::string>& fields);

// Parses CSV text into rows of fields. Handles quoted fields with embedded
// commas, quotes, and newlines. A trailing newline does not add an empty row.
std::vector<std::vector<std::string>> parse(std::string_view text);

}  // namespace trackaudit::csv
