#pragma once

#include "billprep/mapping.hpp"

#include "json.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace billprep {

// One (bill, GAT) cell of the long-format table.
struct Observation
{
    std::string bill_id;  // corpus-relative path, '/'-separated
    std::string gat;
    std::optional<std::string> raw_value;

    friend bool operator==(const Observation&, const Observation&) = default;
};

struct ExtractionReport
{
    std::size_t files_seen = 0;
    std::size_t files_failed = 0;
    std::vector<std::pair<std::string, std::string>> failures;  // (bill_id, reason)
    std::map<std::string, std::size_t> null_counts;               // GAT -> null observations

    nlohmann::json to_json() const;
};

struct ExtractionResult
{
    std::vector<Observation> observations;
    ExtractionReport report;
};

// Parses a bill. Number leaves are kept as strings holding their source text,
// so "1.50" does not turn into 1.5. Throws ParseError on malformed JSON.
nlohmann::json parse_document(std::string_view text);

// Follows `path` into `document`. Returns the scalar leaf as text (strings
// unquoted, numbers and booleans in JSON form) or nullopt when a step does not
// apply or the leaf is null, an object or an array.
std::optional<std::string> resolve_path(const nlohmann::json& document, const JsonPath& path);

// One observation per GAT, in mapping order.
std::vector<Observation> extract_bill(const std::string& bill_id, const nlohmann::json& document,
                                      const MappingSpec& spec);

// Corpus-relative bill id for `file` under `root`, with a lowercase extension.
std::string make_bill_id(const std::filesystem::path& root, const std::filesystem::path& file);

// Extracts every *.json file under `root` (any depth). Output is sorted by
// (bill_id, gat) whatever the worker count. Throws IoError if root is unreadable.
ExtractionResult extract_corpus(const std::filesystem::path& root, const MappingSpec& spec,
                                unsigned workers = 1);

void sort_observations(std::vector<Observation>& observations);

inline const std::vector<std::string> observations_header = {"bill_id", "gat", "raw_value"};

void write_observations_csv(std::ostream& out, const std::vector<Observation>& observations);
std::vector<Observation> read_observations_csv(std::istream& in);

}  // namespace billprep
