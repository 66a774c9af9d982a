#pragma once

#include "billprep/clean.hpp"
#include "billprep/mapping.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace billprep {

// Record excluded from a stage, with a machine-readable reason.
struct QuarantineEntry
{
    std::string kind;  // "bill", "pod" or "user"
    std::string key;
    std::string reason;

    friend bool operator==(const QuarantineEntry&, const QuarantineEntry&) = default;
};

// One bill after pivoting: every GAT in mapping order.
struct WideRecord
{
    std::string bill_id;
    std::vector<CleanValue> values;

    Date bill_date(const MappingSpec& spec) const { return values[spec.bill_date_index()].as_date(); }
};

struct PivotResult
{
    std::vector<WideRecord> records;  // sorted by bill_id
    std::vector<QuarantineEntry> quarantine;
};

// Long to wide. Records with a null bill date or null POD identifier are
// quarantined. Throws IntegrityError on a duplicate (bill_id, gat) or a GAT
// missing from the mapping.
PivotResult pivot(const std::vector<CleanedRow>& cleaned, const MappingSpec& spec);

struct GroupMember
{
    Date bill_date;
    std::string bill_id;
    std::vector<CleanValue> attributes;
};

// All partial records of one POD or user.
struct FusionGroup
{
    std::string key;
    std::vector<GroupMember> members;
};

struct BillRow
{
    std::string bill_id;
    std::string pod_id;
    std::vector<CleanValue> values;  // bill-entity GATs in mapping order

    friend bool operator==(const BillRow&, const BillRow&) = default;
};

// Column layout of the three tables, derived from a mapping.
struct EntityLayout
{
    explicit EntityLayout(const MappingSpec& spec);

    std::vector<std::size_t> bill_columns;  // every bill-entity GAT
    std::vector<std::size_t> pod_columns;   // pod GATs except the identifier
    std::vector<std::size_t> user_columns;  // user GATs except identifier and age

    std::vector<std::string> bill_header(const MappingSpec& spec) const;
    std::vector<std::string> pod_header(const MappingSpec& spec) const;
    std::vector<std::string> user_header(const MappingSpec& spec) const;
};

struct SplitResult
{
    std::vector<BillRow> bills;
    // Member attributes: [user_id, pod_columns...].
    std::vector<FusionGroup> pod_groups;
    // Member attributes: [age, user_columns...]; age is null when the mapping has none.
    std::vector<FusionGroup> user_groups;
    std::vector<QuarantineEntry> quarantine;
};

// Groups are sorted by key; a user's group spans all of that user's PODs.
SplitResult split_entities(const std::vector<WideRecord>& wide, const MappingSpec& spec);

// Per attribute, the value of the latest member (by bill date, then greatest
// bill_id) among members where it is non-null.
std::vector<CleanValue> resolve_most_recent_non_null(const FusionGroup& group);

// year(bill_date) - age. Throws CleanFailure unless 0 <= age <= 130.
std::int64_t year_of_birth(std::int64_t age, const Date& bill_date);

struct PodRow
{
    std::string pod_id;
    std::optional<std::string> user_id;
    std::vector<CleanValue> values;  // pod_columns

    friend bool operator==(const PodRow&, const PodRow&) = default;
};

struct UserRow
{
    std::string user_id;
    std::optional<std::int64_t> year_of_birth;
    std::vector<CleanValue> values;  // user_columns

    friend bool operator==(const UserRow&, const UserRow&) = default;
};

struct EntityTables
{
    std::vector<BillRow> bills;  // sorted by bill_id
    std::vector<PodRow> pods;    // sorted by pod_id
    std::vector<UserRow> users;  // sorted by user_id

    friend bool operator==(const EntityTables&, const EntityTables&) = default;
};

struct FuseResult
{
    EntityTables tables;
    std::vector<QuarantineEntry> quarantine;
};

// Fuses every group. Ages are turned into years of birth per member, using
// that member's bill date, before fusion. Throws IntegrityError if the
// result breaks referential integrity.
FuseResult build_tables(SplitResult split, unsigned workers = 1);

// pivot + split_entities + build_tables, with quarantines concatenated.
FuseResult fuse(const std::vector<CleanedRow>& cleaned, const MappingSpec& spec, unsigned workers = 1);

// Throws IntegrityError on duplicate keys or dangling foreign keys. A null
// pods.user_id is allowed.
void check_referential_integrity(const EntityTables& tables);

// Cells in the three normalized tables (key columns included).
std::size_t normalized_cell_count(const EntityTables& tables);
// Cells in the denormalized one-row-per-bill table: bill_id plus every GAT.
std::size_t wide_cell_count(std::size_t bills, const MappingSpec& spec);

// Table files. Cells use the canonical CleanValue rendering; null is an
// empty unquoted field.
void write_bills_csv(std::ostream& out, const EntityTables& tables, const MappingSpec& spec);
void write_pods_csv(std::ostream& out, const EntityTables& tables, const MappingSpec& spec);
void write_users_csv(std::ostream& out, const EntityTables& tables, const MappingSpec& spec);
void write_quarantine_csv(std::ostream& out, const std::vector<QuarantineEntry>& entries);
void write_sql_dump(std::ostream& out, const EntityTables& tables, const MappingSpec& spec);

// Writes bills.csv, pods.csv and users.csv into `dir`.
void write_tables(const std::filesystem::path& dir, const EntityTables& tables, const MappingSpec& spec);
EntityTables read_tables(const std::filesystem::path& dir, const MappingSpec& spec);

}  // namespace billprep
