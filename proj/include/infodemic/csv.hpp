#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace infodemic::csv {

using Row = std::vector<std::string>;

/// RFC-4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF.
/// A UTF-8 byte-order mark on the first field is dropped.
std::vector<Row> read(std::istream& in);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);
std::string format_row(const Row& row);

}  // namespace infodemic::csv
