#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace citymap::csv {

/// Quotes a field when it contains a comma, quote, or line break.
std::string field(std::string_view value);

/// Joins fields into one CSV line (no terminator).
std::string row(const std::vector<std::string>& fields);

/// Parses one line with double-quote escaping. Throws std::runtime_error on
/// an unterminated quote.
std::vector<std::string> parse_line(std::string_view line);

/// Reads all non-blank lines of a stream as CSV rows.
std::vector<std::vector<std::string>> read(std::istream& in);

}  // namespace citymap::csv
