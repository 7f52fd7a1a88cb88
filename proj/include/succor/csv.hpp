#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace succor::csv {

using Row = std::vector<std::string>;

/// Parses comma-separated text with double-quote escaping. Accepts LF or
/// CRLF line endings; a trailing newline does not produce an empty row.
std::vector<Row> parse(std::string_view text);

/// Appends one row terminated by '\n'. Fields containing a comma, quote or
/// line break are quoted.
void append_row(std::string& out, const Row& row);

}  // namespace succor::csv
