#include "billprep/clean.hpp"

#include "billprep/csv.hpp"
#include "billprep/parallel.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <unordered_map>

namespace billprep {

namespace {

constexpr std::array<std::string_view, 12> english_months = {
    "january", "february", "march",     "april",   "may",      "june",
    "july",    "august",   "september", "october", "november", "december"};

constexpr std::array<std::string_view, 12> italian_months = {
    "gennaio", "febbraio", "marzo",     "aprile",  "maggio",   "giugno",
    "luglio",  "agosto",   "settembre", "ottobre", "novembre", "dicembre"};

constexpr std::array<std::string_view, 4> currency_symbols = {"\xE2\x82\xAC", "\xC2\xA3", "\xC2\xA5", "$"};

constexpr std::string_view nbsp = "\xC2\xA0";

bool is_ascii_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string_view trim(std::string_view s)
{
    for (;;) {
        if (!s.empty() && is_ascii_space(s.front())) s.remove_prefix(1);
        else if (s.starts_with(nbsp)) s.remove_prefix(nbsp.size());
        else break;
    }
    for (;;) {
        if (!s.empty() && is_ascii_space(s.back())) s.remove_suffix(1);
        else if (s.ends_with(nbsp)) s.remove_suffix(nbsp.size());
        else break;
    }
    return s;
}

// Removes at most one trailing unit token: a currency symbol or a run of
// ASCII letters, optionally separated from the number by whitespace.
std::string_view strip_unit(std::string_view s)
{
    s = trim(s);
    for (auto sym : currency_symbols) {
        if (s.ends_with(sym)) {
            s.remove_suffix(sym.size());
            return trim(s);
        }
    }
    std::size_t n = s.size();
    while (n > 0 && is_ascii_alpha(s[n - 1])) --n;
    if (n < s.size()) return trim(s.substr(0, n));
    return s;
}

bool all_digits(std::string_view s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
}

// True when `s` is digits grouped by '.' as thousands separators: a leading
// group of 1-3 digits without a leading zero, then groups of exactly 3.
bool is_thousands_grouping(std::string_view s)
{
    if (s.find('.') == std::string_view::npos) return false;
    std::size_t start = 0;
    bool first = true;
    for (;;) {
        const auto dot = s.find('.', start);
        const std::string_view group = s.substr(start, dot == std::string_view::npos ? s.npos : dot - start);
        if (!all_digits(group)) return false;
        if (first) {
            if (group.size() > 3 || group.front() == '0') return false;
            first = false;
        } else if (group.size() != 3) {
            return false;
        }
        if (dot == std::string_view::npos) return true;
        start = dot + 1;
    }
}

std::string remove_dots(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    for (char c : s)
        if (c != '.') out.push_back(c);
    return out;
}

struct NumberParts
{
    bool negative = false;
    std::string whole;     // digits only
    std::string fraction;  // digits only, may be empty
};

[[noreturn]] void reject(std::string_view what, std::string_view raw)
{
    throw CleanFailure(std::string(what) + " '" + std::string(raw) + "'");
}

NumberParts split_number(std::string_view raw, std::string_view kind)
{
    std::string_view s = strip_unit(raw);
    NumberParts parts;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        parts.negative = s.front() == '-';
        s.remove_prefix(1);
    }
    const std::string unparseable = "unparseable " + std::string(kind);
    if (s.empty()) reject(unparseable, raw);
    for (char c : s)
        if (!is_digit(c) && c != '.' && c != ',') reject(unparseable, raw);

    const auto commas = std::count(s.begin(), s.end(), ',');
    if (commas > 1) reject("more than one comma in " + std::string(kind), raw);
    if (commas == 1) {
        const auto comma = s.find(',');
        const std::string_view whole = s.substr(0, comma);
        const std::string_view frac = s.substr(comma + 1);
        if (!all_digits(frac)) reject(unparseable, raw);
        if (all_digits(whole)) parts.whole = std::string(whole);
        else if (is_thousands_grouping(whole)) parts.whole = remove_dots(whole);
        else reject(unparseable, raw);
        parts.fraction = std::string(frac);
        return parts;
    }

    const auto dots = std::count(s.begin(), s.end(), '.');
    if (dots == 0) {
        parts.whole = std::string(s);
    } else if (is_thousands_grouping(s)) {
        parts.whole = remove_dots(s);
    } else if (dots == 1) {
        const auto dot = s.find('.');
        if (!all_digits(s.substr(0, dot)) || !all_digits(s.substr(dot + 1))) reject(unparseable, raw);
        parts.whole = std::string(s.substr(0, dot));
        parts.fraction = std::string(s.substr(dot + 1));
    } else {
        reject(unparseable, raw);
    }
    return parts;
}

std::int64_t digits_to_int(std::string_view digits, std::string_view raw, std::string_view kind)
{
    while (digits.size() > 1 && digits.front() == '0') digits.remove_prefix(1);
    if (digits.size() > 16) reject(std::string(kind) + " out of range", raw);
    std::int64_t v = 0;
    std::from_chars(digits.data(), digits.data() + digits.size(), v);
    return v;
}

std::string to_lower_ascii(std::string_view s)
{
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_ascii_space(s[i])) ++i;
        std::size_t j = i;
        while (j < s.size() && !is_ascii_space(s[j])) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace

std::string Decimal::to_string() const
{
    const bool neg = minor < 0;
    const std::uint64_t mag = neg ? 0 - static_cast<std::uint64_t>(minor) : static_cast<std::uint64_t>(minor);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%llu.%02llu", neg ? "-" : "", static_cast<unsigned long long>(mag / 100),
                  static_cast<unsigned long long>(mag % 100));
    return buf;
}

std::string format_iso_date(const Date& d)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                  static_cast<unsigned>(d.day()));
    return buf;
}

std::string_view to_string(ValueTag tag)
{
    switch (tag) {
    case ValueTag::null: return "null";
    case ValueTag::decimal: return "decimal";
    case ValueTag::integer: return "integer";
    case ValueTag::date: return "date";
    case ValueTag::text: return "text";
    case ValueTag::hashed_text: return "hashed_text";
    }
    return "?";
}

std::optional<ValueTag> parse_value_tag(std::string_view s)
{
    for (auto t : {ValueTag::null, ValueTag::decimal, ValueTag::integer, ValueTag::date, ValueTag::text,
                   ValueTag::hashed_text})
        if (s == to_string(t)) return t;
    return std::nullopt;
}

std::optional<std::string> CleanValue::render() const
{
    switch (tag_) {
    case ValueTag::null: return std::nullopt;
    case ValueTag::decimal: return as_decimal().to_string();
    case ValueTag::integer: return std::to_string(as_integer());
    case ValueTag::date: return format_iso_date(as_date());
    case ValueTag::text:
    case ValueTag::hashed_text: return as_text();
    }
    return std::nullopt;
}

CleanValue parse_canonical(ValueTag tag, const std::optional<std::string>& text)
{
    if (tag == ValueTag::null) {
        if (text && !text->empty()) throw ParseError("null cell carries a value");
        return {};
    }
    if (!text) throw ParseError("missing value for " + std::string(to_string(tag)) + " cell");
    const std::string& s = *text;
    auto bad = [&]() -> ParseError {
        return ParseError("bad canonical " + std::string(to_string(tag)) + " '" + s + "'");
    };

    switch (tag) {
    case ValueTag::decimal: {
        std::string_view v = s;
        const bool neg = v.starts_with('-');
        if (neg) v.remove_prefix(1);
        const auto dot = v.find('.');
        if (dot == v.npos || v.size() - dot != 3 || !all_digits(v.substr(0, dot)) || !all_digits(v.substr(dot + 1)))
            throw bad();
        std::int64_t whole = 0, cents = 0;
        std::from_chars(v.data(), v.data() + dot, whole);
        std::from_chars(v.data() + dot + 1, v.data() + v.size(), cents);
        const std::int64_t minor = whole * 100 + cents;
        return CleanValue::make_decimal(Decimal{neg ? -minor : minor});
    }
    case ValueTag::integer: {
        std::int64_t v = 0;
        auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || end != s.data() + s.size()) throw bad();
        return CleanValue::make_integer(v);
    }
    case ValueTag::date: {
        int y = 0;
        unsigned m = 0, d = 0;
        if (s.size() != 10 || s[4] != '-' || s[7] != '-') throw bad();
        std::from_chars(s.data(), s.data() + 4, y);
        std::from_chars(s.data() + 5, s.data() + 7, m);
        std::from_chars(s.data() + 8, s.data() + 10, d);
        const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
        if (!date.ok() || format_iso_date(date) != s) throw bad();
        return CleanValue::make_date(date);
    }
    case ValueTag::text: return CleanValue::make_text(s);
    case ValueTag::hashed_text: return CleanValue::make_hashed(s);
    case ValueTag::null: break;
    }
    throw bad();
}

Decimal clean_decimal(std::string_view raw)
{
    const NumberParts parts = split_number(raw, "decimal");
    std::int64_t minor = digits_to_int(parts.whole, raw, "decimal") * 100;
    const std::string& f = parts.fraction;
    if (!f.empty()) minor += (f[0] - '0') * 10;
    if (f.size() > 1) minor += f[1] - '0';
    if (f.size() > 2 && f[2] >= '5') minor += 1;  // half away from zero on the magnitude
    return Decimal{parts.negative ? -minor : minor};
}

std::int64_t clean_integer(std::string_view raw)
{
    const NumberParts parts = split_number(raw, "integer");
    if (!parts.fraction.empty()) reject("fractional part in integer", raw);
    const std::int64_t v = digits_to_int(parts.whole, raw, "integer");
    return parts.negative ? -v : v;
}

Date clean_date(std::string_view raw, MonthLocale locale)
{
    const auto tokens = split_ws(trim(raw));
    if (tokens.size() != 3) reject("expected '<day> <month> <year>' date", raw);
    if (!all_digits(tokens[0]) || tokens[0].size() > 2) reject("non-numeric day in date", raw);
    if (!all_digits(tokens[2]) || tokens[2].size() > 4) reject("non-numeric year in date", raw);

    const auto& months = locale == MonthLocale::english ? english_months : italian_months;
    const std::string name = to_lower_ascii(tokens[1]);
    const auto it = std::find(months.begin(), months.end(), name);
    if (it == months.end()) reject("unknown month name in date", raw);

    unsigned day = 0;
    int year = 0;
    std::from_chars(tokens[0].data(), tokens[0].data() + tokens[0].size(), day);
    std::from_chars(tokens[2].data(), tokens[2].data() + tokens[2].size(), year);
    const auto month = static_cast<unsigned>(it - months.begin()) + 1;
    const Date d{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    if (year < 1 || !d.ok()) reject("day out of range in date", raw);
    return d;
}

std::string render_display_date(const Date& d, MonthLocale locale)
{
    const auto m = static_cast<unsigned>(d.month()) - 1;
    std::string name(locale == MonthLocale::english ? english_months[m] : italian_months[m]);
    if (locale == MonthLocale::english) name[0] = static_cast<char>(name[0] - 'a' + 'A');
    return std::to_string(static_cast<unsigned>(d.day())) + " " + name + " " +
           std::to_string(static_cast<int>(d.year()));
}

std::string hash_value(std::string_view raw, std::string_view salt)
{
    std::string input;
    input.reserve(salt.size() + raw.size());
    input.append(salt).append(raw);

    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(input.data(), input.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");

    static constexpr char hex[] = "0123456789abcdef";
    std::string out(2 * len, '0');
    for (unsigned i = 0; i < len; ++i) {
        out[2 * i] = hex[digest[i] >> 4];
        out[2 * i + 1] = hex[digest[i] & 0xF];
    }
    return out;
}

CleanOutcome clean_observation(const Observation& obs, const GatDefinition& gat, std::string_view salt,
                               MonthLocale locale)
{
    if (!obs.raw_value) return CleanValue{};
    const std::string& raw = *obs.raw_value;
    try {
        switch (gat.output_type) {
        case OutputType::decimal: return CleanValue::make_decimal(clean_decimal(raw));
        case OutputType::integer: return CleanValue::make_integer(clean_integer(raw));
        case OutputType::date: return CleanValue::make_date(clean_date(raw, locale));
        case OutputType::text: return CleanValue::make_text(std::string(trim(raw)));
        case OutputType::hashed_text: return CleanValue::make_hashed(hash_value(trim(raw), salt));
        }
    } catch (const std::exception& e) {
        return CleanError{obs.bill_id, obs.gat, raw, e.what()};
    }
    return CleanError{obs.bill_id, obs.gat, raw, "unknown output type"};
}

CleanResult clean_observations(const std::vector<Observation>& observations, const MappingSpec& spec,
                               std::string_view salt, unsigned workers)
{
    std::unordered_map<std::string_view, const GatDefinition*> by_name;
    for (const auto& g : spec.gats()) by_name.emplace(g.name, &g);
    for (const auto& obs : observations)
        if (!by_name.contains(obs.gat))
            throw ValidationError("observation for unknown GAT '" + obs.gat + "' in bill '" + obs.bill_id + "'");

    std::vector<CleanOutcome> outcomes(observations.size());
    constexpr std::size_t chunk = 4096;
    const std::size_t chunks = (observations.size() + chunk - 1) / chunk;
    parallel_for(chunks, workers, [&](std::size_t c) {
        const std::size_t end = std::min(observations.size(), (c + 1) * chunk);
        for (std::size_t i = c * chunk; i < end; ++i) {
            const auto& obs = observations[i];
            outcomes[i] = clean_observation(obs, *by_name.at(obs.gat), salt, spec.month_locale());
        }
    });

    CleanResult result;
    result.rows.reserve(observations.size());
    for (std::size_t i = 0; i < observations.size(); ++i) {
        CleanedRow row{observations[i].bill_id, observations[i].gat, {}};
        if (auto* v = std::get_if<CleanValue>(&outcomes[i])) row.value = std::move(*v);
        else result.errors.push_back(std::move(std::get<CleanError>(outcomes[i])));
        result.rows.push_back(std::move(row));
    }
    return result;
}

void write_cleaned_csv(std::ostream& out, const std::vector<CleanedRow>& rows)
{
    csv::write_header(out, cleaned_header);
    for (const auto& row : rows) {
        csv::write_field(out, std::string_view(row.bill_id));
        out.put(',');
        csv::write_field(out, std::string_view(row.gat));
        out.put(',');
        out << to_string(row.value.tag());
        out.put(',');
        if (auto text = row.value.render()) csv::write_field(out, std::string_view(*text));
        out.put('\n');
    }
}

std::vector<CleanedRow> read_cleaned_csv(std::istream& in)
{
    csv::Reader reader(in);
    csv::expect_header(reader, cleaned_header, "cleaned");
    std::vector<CleanedRow> out;
    csv::Row row;
    while (reader.next(row)) {
        if (row.size() != 4 || !row[0] || !row[1] || !row[2]) throw ParseError("cleaned: malformed row", reader.line());
        const auto tag = parse_value_tag(*row[2]);
        if (!tag) throw ParseError("cleaned: unknown type '" + *row[2] + "'", reader.line());
        try {
            out.push_back({std::move(*row[0]), std::move(*row[1]), parse_canonical(*tag, row[3])});
        } catch (const ParseError& e) {
            throw ParseError(std::string("cleaned: ") + e.what(), reader.line());
        }
    }
    return out;
}

void write_clean_errors_csv(std::ostream& out, const std::vector<CleanError>& errors)
{
    csv::write_header(out, clean_errors_header);
    for (const auto& e : errors) {
        const csv::Row row{e.bill_id, e.gat, e.raw_value, e.reason};
        csv::write_row(out, row);
    }
}

}  // namespace billprep
