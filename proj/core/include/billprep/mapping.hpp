#pragma once

#include "billprep/json_path.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace billprep {

enum class OutputType { decimal, integer, date, text, hashed_text };
enum class Entity { bill, pod, user };
enum class Role { identifier, attribute, bill_date, age, offer };
enum class MonthLocale { english, italian };

std::string_view to_string(OutputType t);
std::string_view to_string(Entity e);
std::string_view to_string(Role r);
std::string_view to_string(MonthLocale l);

std::optional<OutputType> parse_output_type(std::string_view s);
std::optional<Entity> parse_entity(std::string_view s);
std::optional<Role> parse_role(std::string_view s);
std::optional<MonthLocale> parse_month_locale(std::string_view s);

// A Global Attribute: one named field extracted from every bill.
struct GatDefinition
{
    std::string name;
    std::vector<JsonPath> paths;  // tried in order, first non-null wins
    OutputType output_type = OutputType::text;
    Entity entity = Entity::bill;
    Role role = Role::attribute;

    friend bool operator==(const GatDefinition&, const GatDefinition&) = default;
};

// Validated, immutable set of GATs in file order.
class MappingSpec
{
public:
    MappingSpec() = default;

    // Validates all cross-GAT invariants; throws ValidationError.
    MappingSpec(std::vector<GatDefinition> gats, MonthLocale locale = MonthLocale::english);

    const std::vector<GatDefinition>& gats() const { return gats_; }
    MonthLocale month_locale() const { return locale_; }

    std::optional<std::size_t> index_of(std::string_view name) const;
    const GatDefinition* find(std::string_view name) const;

    std::size_t bill_date_index() const { return bill_date_; }
    std::size_t pod_id_index() const { return pod_id_; }
    std::size_t user_id_index() const { return user_id_; }
    std::optional<std::size_t> age_index() const { return age_; }
    std::optional<std::size_t> offer_index() const { return offer_; }

    // Indices (mapping order) of GATs of the given entity, excluding that
    // entity's identifier and, for users, the age GAT.
    std::vector<std::size_t> attribute_indices(Entity entity) const;

    friend bool operator==(const MappingSpec& a, const MappingSpec& b)
    {
        return a.gats_ == b.gats_ && a.locale_ == b.locale_;
    }

private:
    std::vector<GatDefinition> gats_;
    MonthLocale locale_ = MonthLocale::english;
    std::size_t bill_date_ = 0;
    std::size_t pod_id_ = 0;
    std::size_t user_id_ = 0;
    std::optional<std::size_t> age_;
    std::optional<std::size_t> offer_;
};

inline constexpr std::string_view mapping_header = "name;paths;output_type;entity;role";

// Parses the `;`-separated mapping format. Row shape problems raise
// ParseError with the offending line; invariant breaches raise ValidationError.
MappingSpec parse_mapping_file(std::string_view content, MonthLocale locale = MonthLocale::english);

std::string serialize_mapping_file(const MappingSpec& spec);

MappingSpec load_mapping_file(const std::string& path, MonthLocale locale = MonthLocale::english);

}  // namespace billprep
