#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ttpbench::csv {

/// Quote a field per RFC 4180 when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

/// Write one record terminated by CRLF.
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Parse a whole RFC 4180 document. Accepts LF or CRLF record separators.
/// Throws ParseError with the 1-based line of an unterminated quote.
std::vector<std::vector<std::string>> parse(std::string_view text);

std::vector<std::vector<std::string>> read_file(const std::string& path);

}  // namespace ttpbench::csv
