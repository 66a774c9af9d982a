#include "billprep/fuse.hpp"

#include "billprep/parallel.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

namespace billprep {

EntityLayout::EntityLayout(const MappingSpec& spec)
    : pod_columns(spec.attribute_indices(Entity::pod))
    , user_columns(spec.attribute_indices(Entity::user))
{
    for (std::size_t i = 0; i < spec.gats().size(); ++i)
        if (spec.gats()[i].entity == Entity::bill) bill_columns.push_back(i);
}

namespace {

std::vector<std::string> header_with(std::vector<std::string> keys, const std::vector<std::size_t>& cols,
                                     const MappingSpec& spec)
{
    for (auto i : cols) keys.push_back(spec.gats()[i].name);
    return keys;
}

}  // namespace

std::vector<std::string> EntityLayout::bill_header(const MappingSpec& spec) const
{
    return header_with({"bill_id", "pod_id"}, bill_columns, spec);
}

std::vector<std::string> EntityLayout::pod_header(const MappingSpec& spec) const
{
    return header_with({"pod_id", "user_id"}, pod_columns, spec);
}

std::vector<std::string> EntityLayout::user_header(const MappingSpec& spec) const
{
    return header_with({"user_id", "year_of_birth"}, user_columns, spec);
}

PivotResult pivot(const std::vector<CleanedRow>& cleaned, const MappingSpec& spec)
{
    std::unordered_map<std::string_view, std::size_t> gat_index;
    for (std::size_t i = 0; i < spec.gats().size(); ++i) gat_index.emplace(spec.gats()[i].name, i);

    std::vector<const CleanedRow*> order;
    order.reserve(cleaned.size());
    for (const auto& row : cleaned) order.push_back(&row);
    std::stable_sort(order.begin(), order.end(),
                     [](const CleanedRow* a, const CleanedRow* b) { return a->bill_id < b->bill_id; });

    PivotResult result;
    const std::size_t n_gats = spec.gats().size();
    std::vector<char> seen(n_gats);
    for (std::size_t i = 0; i < order.size();) {
        WideRecord record{order[i]->bill_id, std::vector<CleanValue>(n_gats)};
        std::fill(seen.begin(), seen.end(), 0);
        for (; i < order.size() && order[i]->bill_id == record.bill_id; ++i) {
            const auto it = gat_index.find(order[i]->gat);
            if (it == gat_index.end())
                throw IntegrityError("pivot: unknown GAT '" + order[i]->gat + "' in bill '" + record.bill_id + "'");
            if (seen[it->second])
                throw IntegrityError("pivot: duplicate cell (" + record.bill_id + ", " + order[i]->gat + ")");
            seen[it->second] = 1;
            record.values[it->second] = order[i]->value;
        }

        if (record.values[spec.bill_date_index()].is_null()) {
            result.quarantine.push_back({"bill", record.bill_id, "null bill date"});
            continue;
        }
        if (record.values[spec.bill_date_index()].tag() != ValueTag::date)
            throw IntegrityError("pivot: bill date of '" + record.bill_id + "' is not a date");
        if (record.values[spec.pod_id_index()].is_null()) {
            result.quarantine.push_back({"bill", record.bill_id, "null POD identifier"});
            continue;
        }
        result.records.push_back(std::move(record));
    }
    return result;
}

SplitResult split_entities(const std::vector<WideRecord>& wide, const MappingSpec& spec)
{
    const EntityLayout layout(spec);
    std::map<std::string, FusionGroup> pods;
    std::map<std::string, FusionGroup> users;
    SplitResult result;
    result.bills.reserve(wide.size());

    for (const auto& record : wide) {
        const Date date = record.bill_date(spec);
        const std::string pod_id = *record.values[spec.pod_id_index()].render();
        const CleanValue& user_value = record.values[spec.user_id_index()];

        BillRow bill{record.bill_id, pod_id, {}};
        for (auto i : layout.bill_columns) bill.values.push_back(record.values[i]);
        result.bills.push_back(std::move(bill));

        GroupMember pod_member{date, record.bill_id, {}};
        pod_member.attributes.push_back(user_value);
        for (auto i : layout.pod_columns) pod_member.attributes.push_back(record.values[i]);
        auto& pod_group = pods[pod_id];
        pod_group.key = pod_id;
        pod_group.members.push_back(std::move(pod_member));

        if (user_value.is_null()) {
            result.quarantine.push_back({"bill", record.bill_id, "null user identifier"});
            continue;
        }
        const std::string user_id = *user_value.render();
        GroupMember user_member{date, record.bill_id, {}};
        user_member.attributes.push_back(spec.age_index() ? record.values[*spec.age_index()] : CleanValue{});
        for (auto i : layout.user_columns) user_member.attributes.push_back(record.values[i]);
        auto& user_group = users[user_id];
        user_group.key = user_id;
        user_group.members.push_back(std::move(user_member));
    }

    std::sort(result.bills.begin(), result.bills.end(),
              [](const BillRow& a, const BillRow& b) { return a.bill_id < b.bill_id; });
    for (auto& [key, group] : pods) result.pod_groups.push_back(std::move(group));
    for (auto& [key, group] : users) result.user_groups.push_back(std::move(group));
    return result;
}

std::vector<CleanValue> resolve_most_recent_non_null(const FusionGroup& group)
{
    if (group.members.empty()) return {};
    const std::size_t width = group.members.front().attributes.size();
    std::vector<CleanValue> fused(width);
    for (std::size_t a = 0; a < width; ++a) {
        const GroupMember* best = nullptr;
        for (const auto& m : group.members) {
            if (m.attributes[a].is_null()) continue;
            if (!best || std::tie(m.bill_date, m.bill_id) > std::tie(best->bill_date, best->bill_id)) best = &m;
        }
        if (best) fused[a] = best->attributes[a];
    }
    return fused;
}

std::int64_t year_of_birth(std::int64_t age, const Date& bill_date)
{
    if (age < 0 || age > 130) throw CleanFailure("age " + std::to_string(age) + " out of range [0, 130]");
    return static_cast<int>(bill_date.year()) - age;
}

FuseResult build_tables(SplitResult split, unsigned workers)
{
    FuseResult result;
    result.quarantine = std::move(split.quarantine);
    auto& tables = result.tables;
    tables.bills = std::move(split.bills);

    tables.pods.resize(split.pod_groups.size());
    parallel_for(split.pod_groups.size(), workers, [&](std::size_t g) {
        auto fused = resolve_most_recent_non_null(split.pod_groups[g]);
        PodRow& row = tables.pods[g];
        row.pod_id = split.pod_groups[g].key;
        row.user_id = fused.front().render();
        row.values.assign(std::make_move_iterator(fused.begin() + 1), std::make_move_iterator(fused.end()));
    });

    // Age is converted per member before fusion; a bad age becomes null.
    std::vector<std::vector<QuarantineEntry>> age_issues(split.user_groups.size());
    tables.users.resize(split.user_groups.size());
    parallel_for(split.user_groups.size(), workers, [&](std::size_t g) {
        FusionGroup& group = split.user_groups[g];
        for (auto& m : group.members) {
            CleanValue& age = m.attributes.front();
            if (age.is_null()) continue;
            if (age.tag() != ValueTag::integer) {
                age_issues[g].push_back({"user", group.key, m.bill_id + ": age is not an integer"});
                age = CleanValue{};
                continue;
            }
            try {
                age = CleanValue::make_integer(year_of_birth(age.as_integer(), m.bill_date));
            } catch (const CleanFailure& e) {
                age_issues[g].push_back({"user", group.key, m.bill_id + ": " + e.what()});
                age = CleanValue{};
            }
        }
        auto fused = resolve_most_recent_non_null(group);
        UserRow& row = tables.users[g];
        row.user_id = group.key;
        if (!fused.front().is_null()) row.year_of_birth = fused.front().as_integer();
        row.values.assign(std::make_move_iterator(fused.begin() + 1), std::make_move_iterator(fused.end()));
    });
    for (auto& issues : age_issues)
        for (auto& q : issues) result.quarantine.push_back(std::move(q));

    check_referential_integrity(tables);
    return result;
}

FuseResult fuse(const std::vector<CleanedRow>& cleaned, const MappingSpec& spec, unsigned workers)
{
    PivotResult pivoted = pivot(cleaned, spec);
    SplitResult split = split_entities(pivoted.records, spec);
    std::vector<QuarantineEntry> quarantine = std::move(pivoted.quarantine);
    FuseResult result = build_tables(std::move(split), workers);
    quarantine.insert(quarantine.end(), std::make_move_iterator(result.quarantine.begin()),
                      std::make_move_iterator(result.quarantine.end()));
    result.quarantine = std::move(quarantine);
    return result;
}

void check_referential_integrity(const EntityTables& tables)
{
    std::set<std::string_view> user_ids;
    for (const auto& u : tables.users)
        if (!user_ids.insert(u.user_id).second) throw IntegrityError("duplicate user_id '" + u.user_id + "'");
    std::set<std::string_view> pod_ids;
    for (const auto& p : tables.pods) {
        if (!pod_ids.insert(p.pod_id).second) throw IntegrityError("duplicate pod_id '" + p.pod_id + "'");
        if (p.user_id && !user_ids.contains(*p.user_id))
            throw IntegrityError("pod '" + p.pod_id + "' references missing user '" + *p.user_id + "'");
    }
    std::set<std::string_view> bill_ids;
    for (const auto& b : tables.bills) {
        if (!bill_ids.insert(b.bill_id).second) throw IntegrityError("duplicate bill_id '" + b.bill_id + "'");
        if (!pod_ids.contains(b.pod_id))
            throw IntegrityError("bill '" + b.bill_id + "' references missing pod '" + b.pod_id + "'");
    }
}

std::size_t normalized_cell_count(const EntityTables& tables)
{
    std::size_t cells = 0;
    for (const auto& b : tables.bills) cells += 2 + b.values.size();
    for (const auto& p : tables.pods) cells += 2 + p.values.size();
    for (const auto& u : tables.users) cells += 2 + u.values.size();
    return cells;
}

std::size_t wide_cell_count(std::size_t bills, const MappingSpec& spec)
{
    return bills * (1 + spec.gats().size());
}

}  // namespace billprep
