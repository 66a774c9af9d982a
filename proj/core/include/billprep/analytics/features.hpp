#pragma once

#include "billprep/clean.hpp"
#include "billprep/fuse.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace billprep::analytics {

// Ordinal codes 0..k-1 assigned in lexicographic order of the categories.
struct EncodingTable
{
    std::string column;
    std::map<std::string, int> codes;

    int code(const std::string& category) const;  // throws ValidationError if unknown

    friend bool operator==(const EncodingTable&, const EncodingTable&) = default;
};

struct Encoded
{
    std::vector<int> codes;
    EncodingTable table;
};

Encoded encode_categorical(std::span<const std::string> column, std::string name = {});

// One (POD, offer) pair. Null categories are encoded as the empty string.
struct FeatureVector
{
    std::string pod_id;
    int offer = 0;
    int sex = 0;
    std::optional<std::int64_t> age;  // years at the reference date
    int municipality = 0;
    Decimal total_consumption;
    Decimal total_amount;
    Decimal total_light_amount;
    std::int64_t billed_days = 0;
    int churn = 0;

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// Which GATs feed which feature. Offer and bill date come from GAT roles,
// year of birth from the users table.
struct FeatureBindings
{
    std::string sex = "sex";
    std::string municipality = "municipality";
    std::string total_consumption = "total_consumption";
    std::string total_amount = "total_amount";
    std::string total_light_amount = "total_light_amount";
    std::string billed_days = "billed_days";
};

struct FeatureSet
{
    std::vector<FeatureVector> vectors;  // sorted by (pod_id, offer code)
    EncodingTable offer;
    EncodingTable sex;
    EncodingTable municipality;
    std::optional<Date> reference_date;  // latest bill date; ages are relative to it
    std::vector<QuarantineEntry> ledger;  // bills without offer, PODs without vectors
};

// One vector per (pod_id, offer) seen in bills; the four numeric features are
// summed over that pair's bills. Throws ValidationError when the mapping lacks
// an offer GAT or a bound feature GAT.
FeatureSet build_feature_vectors(const EntityTables& tables, const MappingSpec& spec,
                                 const FeatureBindings& bindings = {});

struct DatedOffer
{
    Date bill_date;
    std::string bill_id;
    std::string offer;
};

// 1 when the POD's last bill (by date, then greatest bill_id) carries a
// different offer, else 0. `pod_bills` need not be sorted but must be non-empty.
int label_churn(std::span<const DatedOffer> pod_bills, std::string_view offer);

inline const std::vector<std::string> feature_header = {
    "pod_id",       "offer",        "sex",
    "age",          "municipality", "total_consumption",
    "total_amount", "total_light_amount", "billed_days",
    "churn"};

void write_features_csv(std::ostream& out, const std::vector<FeatureVector>& vectors);
std::vector<FeatureVector> read_features_csv(std::istream& in);

nlohmann::json encodings_to_json(const FeatureSet& set);

// Numeric design matrix, row-major. Missing age is encoded as -1.
struct Dataset
{
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> x;
    std::vector<int> y;
    std::vector<std::string> names;

    double at(std::size_t r, std::size_t c) const { return x[r * cols + c]; }
    const double* row(std::size_t r) const { return x.data() + r * cols; }
};

inline const std::vector<std::string> feature_columns = {
    "offer",        "sex",          "age",
    "municipality", "total_consumption", "total_amount",
    "total_light_amount", "billed_days"};

Dataset to_dataset(const std::vector<FeatureVector>& vectors);

Dataset subset(const Dataset& data, std::span<const std::size_t> rows);

}  // namespace billprep::analytics
