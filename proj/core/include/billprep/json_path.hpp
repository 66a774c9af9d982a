#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace billprep {

// One step of a path into a JSON document.
struct PathStep
{
    enum class Kind { key, index, wildcard };

    Kind kind = Kind::key;
    std::string key;        // Kind::key
    std::size_t index = 0;  // Kind::index

    static PathStep make_key(std::string k) { return {Kind::key, std::move(k), 0}; }
    static PathStep make_index(std::size_t i) { return {Kind::index, {}, i}; }
    static PathStep make_wildcard() { return {Kind::wildcard, {}, 0}; }

    friend bool operator==(const PathStep&, const PathStep&) = default;
};

// Dotted path with optional bracket steps: `a.b`, `items[0].amount`, `items[*].kwh`.
// Bracket steps follow a key (or another bracket step). At most one wildcard.
struct JsonPath
{
    std::vector<PathStep> steps;

    std::string to_string() const;

    friend bool operator==(const JsonPath&, const JsonPath&) = default;
};

// Throws ParseError for empty segments, unclosed or malformed brackets,
// negative or non-numeric indices, and repeated wildcards.
JsonPath parse_json_path(std::string_view text);

}  // namespace billprep
