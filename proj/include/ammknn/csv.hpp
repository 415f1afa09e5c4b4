#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ammknn::csv {

using Record = std::vector<std::string>;

/// Split CSV text into records. Supports double-quoted fields with embedded
/// separators, quotes ("") and newlines; accepts LF and CRLF line endings.
/// Blank lines are skipped.
std::vector<Record> parse(std::string_view text);

/// Quote a field only when it contains a separator, quote or line break.
std::string escape_field(std::string_view field);

std::string join_record(const Record& fields);

/// Shortest text that parses back to exactly `value`; missing cells become "".
std::string format_number(double value);

/// Parse a finite decimal number (surrounding spaces allowed). Returns
/// nullopt for anything else, including "nan" and "inf".
std::optional<double> parse_number(std::string_view text);

} // namespace ammknn::csv
