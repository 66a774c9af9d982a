#include "billprep/mapping.hpp"

#include "billprep/error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace billprep {

std::string_view to_string(OutputType t)
{
    switch (t) {
    case OutputType::decimal: return "decimal";
    case OutputType::integer: return "integer";
    case OutputType::date: return "date";
    case OutputType::text: return "text";
    case OutputType::hashed_text: return "hashed_text";
    }
    return "?";
}

std::string_view to_string(Entity e)
{
    switch (e) {
    case Entity::bill: return "bill";
    case Entity::pod: return "pod";
    case Entity::user: return "user";
    }
    return "?";
}

std::string_view to_string(Role r)
{
    switch (r) {
    case Role::identifier: return "identifier";
    case Role::attribute: return "attribute";
    case Role::bill_date: return "bill_date";
    case Role::age: return "age";
    case Role::offer: return "offer";
    }
    return "?";
}

std::string_view to_string(MonthLocale l)
{
    return l == MonthLocale::english ? "english" : "italian";
}

std::optional<OutputType> parse_output_type(std::string_view s)
{
    for (auto t : {OutputType::decimal, OutputType::integer, OutputType::date, OutputType::text,
                   OutputType::hashed_text})
        if (s == to_string(t)) return t;
    return std::nullopt;
}

std::optional<Entity> parse_entity(std::string_view s)
{
    for (auto e : {Entity::bill, Entity::pod, Entity::user})
        if (s == to_string(e)) return e;
    return std::nullopt;
}

std::optional<Role> parse_role(std::string_view s)
{
    for (auto r : {Role::identifier, Role::attribute, Role::bill_date, Role::age, Role::offer})
        if (s == to_string(r)) return r;
    return std::nullopt;
}

std::optional<MonthLocale> parse_month_locale(std::string_view s)
{
    if (s == "english") return MonthLocale::english;
    if (s == "italian") return MonthLocale::italian;
    return std::nullopt;
}

MappingSpec::MappingSpec(std::vector<GatDefinition> gats, MonthLocale locale)
    : gats_(std::move(gats))
    , locale_(locale)
{
    if (gats_.empty()) throw ValidationError("mapping: no GATs");

    std::set<std::string> names;
    std::optional<std::size_t> bill_date, pod_id, user_id;
    for (std::size_t i = 0; i < gats_.size(); ++i) {
        const auto& g = gats_[i];
        const std::string where = "mapping: GAT '" + g.name + "': ";
        if (g.name.empty()) throw ValidationError("mapping: empty GAT name");
        if (!names.insert(g.name).second) throw ValidationError(where + "duplicate name");
        if (g.paths.empty()) throw ValidationError(where + "no paths");
        if (g.role != Role::identifier &&
            (g.name == "bill_id" || g.name == "pod_id" || g.name == "user_id" || g.name == "year_of_birth"))
            throw ValidationError(where + "name is reserved for a table key column");

        switch (g.role) {
        case Role::bill_date:
            if (bill_date) throw ValidationError(where + "more than one bill_date GAT");
            if (g.entity != Entity::bill || g.output_type != OutputType::date)
                throw ValidationError(where + "bill_date must be a bill-entity date");
            bill_date = i;
            break;
        case Role::identifier:
            if (g.entity == Entity::bill)
                throw ValidationError(where + "bills are keyed by file path, not an identifier GAT");
            if (g.entity == Entity::pod) {
                if (pod_id) throw ValidationError(where + "more than one POD identifier");
                pod_id = i;
            } else {
                if (user_id) throw ValidationError(where + "more than one user identifier");
                user_id = i;
            }
            break;
        case Role::age:
            if (age_) throw ValidationError(where + "more than one age GAT");
            if (g.entity != Entity::user || g.output_type != OutputType::integer)
                throw ValidationError(where + "age must be a user-entity integer");
            age_ = i;
            break;
        case Role::offer:
            if (offer_) throw ValidationError(where + "more than one offer GAT");
            if (g.entity != Entity::bill) throw ValidationError(where + "offer must be a bill-entity GAT");
            offer_ = i;
            break;
        case Role::attribute:
            break;
        }
    }

    if (!bill_date) throw ValidationError("mapping: missing bill_date GAT");
    if (!pod_id) throw ValidationError("mapping: missing POD identifier GAT");
    if (!user_id) throw ValidationError("mapping: missing user identifier GAT");
    bill_date_ = *bill_date;
    pod_id_ = *pod_id;
    user_id_ = *user_id;
}

std::optional<std::size_t> MappingSpec::index_of(std::string_view name) const
{
    for (std::size_t i = 0; i < gats_.size(); ++i)
        if (gats_[i].name == name) return i;
    return std::nullopt;
}

const GatDefinition* MappingSpec::find(std::string_view name) const
{
    auto i = index_of(name);
    return i ? &gats_[*i] : nullptr;
}

std::vector<std::size_t> MappingSpec::attribute_indices(Entity entity) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < gats_.size(); ++i) {
        if (gats_[i].entity != entity) continue;
        if (gats_[i].role == Role::identifier || gats_[i].role == Role::age) continue;
        out.push_back(i);
    }
    return out;
}

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto p = s.find(sep, start);
        if (p == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, p - start));
        start = p + 1;
    }
}

}  // namespace

MappingSpec parse_mapping_file(std::string_view content, MonthLocale locale)
{
    // Skip a UTF-8 byte order mark if present.
    if (content.starts_with("\xEF\xBB\xBF")) content.remove_prefix(3);

    std::vector<GatDefinition> gats;
    bool header_seen = false;
    std::size_t line_no = 0;
    for (std::string_view raw_line : split(content, '\n')) {
        ++line_no;
        const std::string_view line = trim(raw_line);
        if (line.empty() || line.front() == '#') continue;

        if (!header_seen) {
            if (line != mapping_header)
                throw ParseError("expected header '" + std::string(mapping_header) + "'", line_no);
            header_seen = true;
            continue;
        }

        const auto cells = split(line, ';');
        if (cells.size() != 5)
            throw ParseError("expected 5 columns, found " + std::to_string(cells.size()), line_no);

        GatDefinition gat;
        gat.name = std::string(trim(cells[0]));
        for (std::string_view p : split(trim(cells[1]), '|')) {
            try {
                gat.paths.push_back(parse_json_path(trim(p)));
            } catch (const ParseError& e) {
                throw ParseError(e.what(), line_no);
            }
        }
        const auto type = parse_output_type(trim(cells[2]));
        const auto entity = parse_entity(trim(cells[3]));
        const auto role = parse_role(trim(cells[4]));
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (!type) throw ValidationError(where + "unknown output_type '" + std::string(trim(cells[2])) + "'");
        if (!entity) throw ValidationError(where + "unknown entity '" + std::string(trim(cells[3])) + "'");
        if (!role) throw ValidationError(where + "unknown role '" + std::string(trim(cells[4])) + "'");
        gat.output_type = *type;
        gat.entity = *entity;
        gat.role = *role;
        gats.push_back(std::move(gat));
    }

    if (!header_seen) throw ParseError("missing header '" + std::string(mapping_header) + "'");
    return MappingSpec(std::move(gats), locale);
}

std::string serialize_mapping_file(const MappingSpec& spec)
{
    std::ostringstream out;
    out << mapping_header << '\n';
    for (const auto& g : spec.gats()) {
        out << g.name << ';';
        for (std::size_t i = 0; i < g.paths.size(); ++i) {
            if (i) out << '|';
            out << g.paths[i].to_string();
        }
        out << ';' << to_string(g.output_type) << ';' << to_string(g.entity) << ';' << to_string(g.role)
            << '\n';
    }
    return out.str();
}

MappingSpec load_mapping_file(const std::string& path, MonthLocale locale)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open mapping file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_mapping_file(buf.str(), locale);
}

}  // namespace billprep
