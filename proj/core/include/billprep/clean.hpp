#pragma once

#include "billprep/error.hpp"
#include "billprep/extract.hpp"
#include "billprep/mapping.hpp"

#include <chrono>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace billprep {

// Fixed-point amount with two fractional digits, stored in minor units.
struct Decimal
{
    std::int64_t minor = 0;

    static constexpr Decimal from_units(std::int64_t units, std::int64_t cents = 0)
    {
        return Decimal{units * 100 + (units < 0 ? -cents : cents)};
    }
    double to_double() const { return static_cast<double>(minor) / 100.0; }
    std::string to_string() const;  // "-12345.67"

    friend constexpr auto operator<=>(Decimal, Decimal) = default;
    friend constexpr Decimal operator+(Decimal a, Decimal b) { return Decimal{a.minor + b.minor}; }
    Decimal& operator+=(Decimal o)
    {
        minor += o.minor;
        return *this;
    }
};

using Date = std::chrono::year_month_day;

std::string format_iso_date(const Date& d);

enum class ValueTag { null, decimal, integer, date, text, hashed_text };

std::string_view to_string(ValueTag tag);
std::optional<ValueTag> parse_value_tag(std::string_view s);

// Typed result of cleaning one raw string.
class CleanValue
{
public:
    CleanValue() = default;

    static CleanValue make_decimal(Decimal d) { return CleanValue(ValueTag::decimal, d); }
    static CleanValue make_integer(std::int64_t v) { return CleanValue(ValueTag::integer, v); }
    static CleanValue make_date(Date d) { return CleanValue(ValueTag::date, d); }
    static CleanValue make_text(std::string s) { return CleanValue(ValueTag::text, std::move(s)); }
    static CleanValue make_hashed(std::string s) { return CleanValue(ValueTag::hashed_text, std::move(s)); }

    ValueTag tag() const { return tag_; }
    bool is_null() const { return tag_ == ValueTag::null; }

    Decimal as_decimal() const { return std::get<Decimal>(payload_); }
    std::int64_t as_integer() const { return std::get<std::int64_t>(payload_); }
    Date as_date() const { return std::get<Date>(payload_); }
    const std::string& as_text() const { return std::get<std::string>(payload_); }

    // Canonical text: "1000.00", "2021-01-10", integers in decimal, text as-is.
    // Null renders as nullopt.
    std::optional<std::string> render() const;

    friend bool operator==(const CleanValue&, const CleanValue&) = default;

private:
    using Payload = std::variant<std::monostate, Decimal, std::int64_t, Date, std::string>;

    CleanValue(ValueTag tag, Payload payload)
        : tag_(tag)
        , payload_(std::move(payload))
    {
    }

    ValueTag tag_ = ValueTag::null;
    Payload payload_;
};

// Inverse of CleanValue::render for a known tag. Throws ParseError.
CleanValue parse_canonical(ValueTag tag, const std::optional<std::string>& text);

// Thrown by the individual cleaning functions.
struct CleanFailure : Error
{
    using Error::Error;
};

struct CleanError
{
    std::string bill_id;
    std::string gat;
    std::string raw_value;
    std::string reason;

    friend bool operator==(const CleanError&, const CleanError&) = default;
};

// "1.000,00 €" -> 1000.00. Strips one trailing unit token (currency symbol
// or letter run), '.' thousands separators, ',' decimal separator; rounds
// half away from zero to two digits. A lone '.' that cannot be a thousands
// separator ("1000.00") is read as a decimal point.
Decimal clean_decimal(std::string_view raw);

// "1.234" -> 1234. Same unit and separator handling, no fractional part.
std::int64_t clean_integer(std::string_view raw);

// "<day> <month-name> <year>" with locale month names, case-insensitive.
Date clean_date(std::string_view raw, MonthLocale locale);

// "10 January 2021" style rendering; inverse of clean_date.
std::string render_display_date(const Date& d, MonthLocale locale);

// Lowercase hex SHA-256 of salt || raw.
std::string hash_value(std::string_view raw, std::string_view salt);

inline constexpr std::size_t hash_hex_length = 64;

using CleanOutcome = std::variant<CleanValue, CleanError>;

// Null raw values map to CleanValue null; otherwise dispatches on the GAT's
// output type. Never throws for any raw string.
CleanOutcome clean_observation(const Observation& obs, const GatDefinition& gat, std::string_view salt,
                               MonthLocale locale);

struct CleanedRow
{
    std::string bill_id;
    std::string gat;
    CleanValue value;

    friend bool operator==(const CleanedRow&, const CleanedRow&) = default;
};

struct CleanResult
{
    std::vector<CleanedRow> rows;  // one per observation; failed cells become null
    std::vector<CleanError> errors;
};

// Cleans every observation. Throws ValidationError for observations whose GAT
// is not in the mapping. Row order follows the input.
CleanResult clean_observations(const std::vector<Observation>& observations, const MappingSpec& spec,
                               std::string_view salt, unsigned workers = 1);

inline const std::vector<std::string> cleaned_header = {"bill_id", "gat", "type", "value"};
inline const std::vector<std::string> clean_errors_header = {"bill_id", "gat", "raw_value", "reason"};

void write_cleaned_csv(std::ostream& out, const std::vector<CleanedRow>& rows);
std::vector<CleanedRow> read_cleaned_csv(std::istream& in);
void write_clean_errors_csv(std::ostream& out, const std::vector<CleanError>& errors);

}  // namespace billprep
