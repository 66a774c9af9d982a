#include "billprep/csv.hpp"
#include "billprep/fuse.hpp"
#include "billprep/io.hpp"

#include <fstream>

namespace billprep {

namespace fs = std::filesystem;

namespace {

ValueTag tag_for(OutputType t)
{
    switch (t) {
    case OutputType::decimal: return ValueTag::decimal;
    case OutputType::integer: return ValueTag::integer;
    case OutputType::date: return ValueTag::date;
    case OutputType::text: return ValueTag::text;
    case OutputType::hashed_text: return ValueTag::hashed_text;
    }
    return ValueTag::text;
}

std::string_view sql_type(OutputType t)
{
    switch (t) {
    case OutputType::decimal: return "DECIMAL(18,2)";
    case OutputType::integer: return "BIGINT";
    case OutputType::date: return "DATE";
    case OutputType::text: return "TEXT";
    case OutputType::hashed_text: return "CHAR(64)";
    }
    return "TEXT";
}

void append_values(csv::Row& row, const std::vector<CleanValue>& values)
{
    for (const auto& v : values) row.push_back(v.render());
}

CleanValue cell_value(const csv::Field& field, const GatDefinition& gat)
{
    if (!field) return {};
    return parse_canonical(tag_for(gat.output_type), field);
}

std::vector<CleanValue> read_values(const csv::Row& row, std::size_t offset, const std::vector<std::size_t>& cols,
                                    const MappingSpec& spec)
{
    std::vector<CleanValue> out;
    out.reserve(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) out.push_back(cell_value(row[offset + c], spec.gats()[cols[c]]));
    return out;
}

template <typename Fn>
void read_table(const fs::path& path, const std::vector<std::string>& header, Fn&& on_row)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    csv::Reader reader(in);
    csv::expect_header(reader, header, path.filename().string());
    csv::Row row;
    while (reader.next(row)) {
        if (row.size() != header.size() || !row[0])
            throw ParseError(path.filename().string() + ": malformed row", reader.line());
        try {
            on_row(row);
        } catch (const ParseError& e) {
            throw ParseError(path.filename().string() + ": " + e.what(), reader.line());
        }
    }
}

std::string sql_literal(const CleanValue& v)
{
    const auto text = v.render();
    if (!text) return "NULL";
    if (v.tag() == ValueTag::decimal || v.tag() == ValueTag::integer) return *text;
    std::string out = "'";
    for (char c : *text) {
        if (c == '\'') out += '\'';
        out += c;
    }
    return out + "'";
}

std::string sql_literal(const std::optional<std::string>& s)
{
    return s ? sql_literal(CleanValue::make_text(*s)) : "NULL";
}

void sql_columns(std::ostream& out, const std::vector<std::size_t>& cols, const MappingSpec& spec)
{
    for (auto i : cols) out << ",\n  \"" << spec.gats()[i].name << "\" " << sql_type(spec.gats()[i].output_type);
}

void sql_values(std::ostream& out, const std::vector<CleanValue>& values)
{
    for (const auto& v : values) out << ", " << sql_literal(v);
}

}  // namespace

void write_bills_csv(std::ostream& out, const EntityTables& tables, const MappingSpec& spec)
{
    const EntityLayout layout(spec);
    csv::write_header(out, layout.bill_header(spec));
    csv::Row row;
    for (const auto& b : tables.bills) {
        row = {b.bill_id, b.pod_id};
        append_values(row, b.values);
        csv::write_row(out, row);
    }
}

void write_pods_csv(std::ostream& out, const EntityTables& tables, const MappingSpec& spec)
{
    const EntityLayout layout(spec);
    csv::write_header(out, layout.pod_header(spec));
    csv::Row row;
    for (const auto& p : tables.pods) {
        row = {p.pod_id, p.user_id};
        append_values(row, p.values);
        csv::write_row(out, row);
    }
}

void write_users_csv(std::ostream& out, const EntityTables& tables, const MappingSpec& spec)
{
    const EntityLayout layout(spec);
    csv::write_header(out, layout.user_header(spec));
    csv::Row row;
    for (const auto& u : tables.users) {
        row = {u.user_id, u.year_of_birth ? csv::Field(std::to_string(*u.year_of_birth)) : std::nullopt};
        append_values(row, u.values);
        csv::write_row(out, row);
    }
}

void write_quarantine_csv(std::ostream& out, const std::vector<QuarantineEntry>& entries)
{
    static const std::vector<std::string> header = {"kind", "key", "reason"};
    csv::write_header(out, header);
    for (const auto& q : entries) {
        const csv::Row row{q.kind, q.key, q.reason};
        csv::write_row(out, row);
    }
}

void write_sql_dump(std::ostream& out, const EntityTables& tables, const MappingSpec& spec)
{
    const EntityLayout layout(spec);
    out << "CREATE TABLE users (\n  user_id TEXT PRIMARY KEY,\n  year_of_birth BIGINT";
    sql_columns(out, layout.user_columns, spec);
    out << "\n);\n\n";
    out << "CREATE TABLE pods (\n  pod_id TEXT PRIMARY KEY,\n  user_id TEXT REFERENCES users(user_id)";
    sql_columns(out, layout.pod_columns, spec);
    out << "\n);\n\n";
    out << "CREATE TABLE bills (\n  bill_id TEXT PRIMARY KEY,\n  pod_id TEXT NOT NULL REFERENCES pods(pod_id)";
    sql_columns(out, layout.bill_columns, spec);
    out << "\n);\n\n";

    for (const auto& u : tables.users) {
        out << "INSERT INTO users VALUES (" << sql_literal(u.user_id) << ", "
            << (u.year_of_birth ? std::to_string(*u.year_of_birth) : "NULL");
        sql_values(out, u.values);
        out << ");\n";
    }
    for (const auto& p : tables.pods) {
        out << "INSERT INTO pods VALUES (" << sql_literal(p.pod_id) << ", " << sql_literal(p.user_id);
        sql_values(out, p.values);
        out << ");\n";
    }
    for (const auto& b : tables.bills) {
        out << "INSERT INTO bills VALUES (" << sql_literal(b.bill_id) << ", " << sql_literal(b.pod_id);
        sql_values(out, b.values);
        out << ");\n";
    }
}

void write_tables(const fs::path& dir, const EntityTables& tables, const MappingSpec& spec)
{
    fs::create_directories(dir);
    write_file_atomically(dir / "bills.csv", [&](std::ostream& o) { write_bills_csv(o, tables, spec); });
    write_file_atomically(dir / "pods.csv", [&](std::ostream& o) { write_pods_csv(o, tables, spec); });
    write_file_atomically(dir / "users.csv", [&](std::ostream& o) { write_users_csv(o, tables, spec); });
}

EntityTables read_tables(const fs::path& dir, const MappingSpec& spec)
{
    const EntityLayout layout(spec);
    EntityTables tables;
    read_table(dir / "bills.csv", layout.bill_header(spec), [&](const csv::Row& row) {
        if (!row[1]) throw ParseError("bill without pod_id");
        tables.bills.push_back({*row[0], *row[1], read_values(row, 2, layout.bill_columns, spec)});
    });
    read_table(dir / "pods.csv", layout.pod_header(spec), [&](const csv::Row& row) {
        tables.pods.push_back({*row[0], row[1], read_values(row, 2, layout.pod_columns, spec)});
    });
    read_table(dir / "users.csv", layout.user_header(spec), [&](const csv::Row& row) {
        std::optional<std::int64_t> yob;
        if (row[1]) yob = parse_canonical(ValueTag::integer, row[1]).as_integer();
        tables.users.push_back({*row[0], yob, read_values(row, 2, layout.user_columns, spec)});
    });
    check_referential_integrity(tables);
    return tables;
}

}  // namespace billprep
