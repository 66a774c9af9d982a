#include "billprep/csv.hpp"

#include "billprep/error.hpp"

namespace billprep::csv {

namespace {

bool needs_quotes(std::string_view s)
{
    if (s.empty()) return true;
    return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

}  // namespace

void write_field(std::ostream& out, const std::optional<std::string_view>& field)
{
    if (!field) return;
    if (!needs_quotes(*field)) {
        out << *field;
        return;
    }
    out.put('"');
    for (char c : *field) {
        if (c == '"') out.put('"');
        out.put(c);
    }
    out.put('"');
}

void write_row(std::ostream& out, std::span<const Field> row)
{
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out.put(',');
        if (row[i]) write_field(out, std::string_view(*row[i]));
    }
    out.put('\n');
}

void write_header(std::ostream& out, std::span<const std::string> names)
{
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out.put(',');
        write_field(out, std::string_view(names[i]));
    }
    out.put('\n');
}

bool Reader::next(Row& row)
{
    row.clear();
    int c = in_.get();
    if (c == std::char_traits<char>::eof()) return false;
    row_line_ = line_;

    std::string cell;
    bool quoted = false;
    bool any = false;  // current cell has content or quotes
    for (;;) {
        if (c == std::char_traits<char>::eof() || c == '\n' || c == '\r') {
            if (quoted || any) row.emplace_back(std::move(cell));
            else row.emplace_back(std::nullopt);
            if (c == '\r' && in_.peek() == '\n') in_.get();
            if (c != std::char_traits<char>::eof()) ++line_;
            return true;
        }
        if (c == ',') {
            if (quoted || any) row.emplace_back(std::move(cell));
            else row.emplace_back(std::nullopt);
            cell.clear();
            quoted = false;
            any = false;
            c = in_.get();
            continue;
        }
        if (c == '"' && !any && !quoted) {
            quoted = true;
            for (;;) {
                c = in_.get();
                if (c == std::char_traits<char>::eof())
                    throw ParseError("unterminated quoted field", row_line_);
                if (c == '"') {
                    if (in_.peek() == '"') {
                        in_.get();
                        cell.push_back('"');
                        continue;
                    }
                    break;
                }
                if (c == '\n') ++line_;
                cell.push_back(static_cast<char>(c));
            }
            c = in_.get();
            if (c != ',' && c != '\n' && c != '\r' && c != std::char_traits<char>::eof())
                throw ParseError("unexpected character after closing quote", row_line_);
            continue;
        }
        if (quoted) throw ParseError("unexpected character after closing quote", row_line_);
        any = true;
        cell.push_back(static_cast<char>(c));
        c = in_.get();
    }
}

void expect_header(Reader& reader, std::span<const std::string> expected, std::string_view what)
{
    Row row;
    if (!reader.next(row)) throw ParseError(std::string(what) + ": missing header");
    bool ok = row.size() == expected.size();
    for (std::size_t i = 0; ok && i < row.size(); ++i) ok = row[i] && *row[i] == expected[i];
    if (!ok) throw ParseError(std::string(what) + ": unexpected header", reader.line());
}

std::vector<Row> read_all(std::istream& in)
{
    Reader reader(in);
    std::vector<Row> rows;
    Row row;
    while (reader.next(row)) rows.push_back(row);
    return rows;
}

}  // namespace billprep::csv
