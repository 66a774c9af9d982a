#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace billprep::csv {

// A CSV cell. nullopt is written as an empty unquoted field; an empty string
// is written as "" so the two survive a round trip.
using Field = std::optional<std::string>;
using Row = std::vector<Field>;

void write_field(std::ostream& out, const std::optional<std::string_view>& field);
void write_row(std::ostream& out, std::span<const Field> row);
void write_header(std::ostream& out, std::span<const std::string> names);

// RFC-4180 reader. Accepts LF or CRLF line endings.
class Reader
{
public:
    explicit Reader(std::istream& in) : in_(in) {}

    // Returns false at end of input. Throws ParseError on an unterminated quote.
    bool next(Row& row);

    // Physical line number of the first line of the last row returned.
    std::size_t line() const { return row_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 1;
    std::size_t row_line_ = 0;
};

// Reads the header row and checks it matches `expected` exactly.
void expect_header(Reader& reader, std::span<const std::string> expected, std::string_view what);

std::vector<Row> read_all(std::istream& in);

}  // namespace billprep::csv
