#include "billprep/analytics/features.hpp"

#include "billprep/csv.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <tuple>
#include <unordered_map>

namespace billprep::analytics {

int EncodingTable::code(const std::string& category) const
{
    const auto it = codes.find(category);
    if (it == codes.end()) throw ValidationError("encoding '" + column + "': unknown category '" + category + "'");
    return it->second;
}

Encoded encode_categorical(std::span<const std::string> column, std::string name)
{
    Encoded out;
    out.table.column = std::move(name);
    const std::set<std::string> categories(column.begin(), column.end());
    int next = 0;
    for (const auto& c : categories) out.table.codes.emplace(c, next++);
    out.codes.reserve(column.size());
    for (const auto& v : column) out.codes.push_back(out.table.codes.at(v));
    return out;
}

int label_churn(std::span<const DatedOffer> pod_bills, std::string_view offer)
{
    if (pod_bills.empty()) throw ValidationError("label_churn: POD without bills");
    const DatedOffer* last = &pod_bills.front();
    for (const auto& b : pod_bills)
        if (std::tie(b.bill_date, b.bill_id) > std::tie(last->bill_date, last->bill_id)) last = &b;
    return last->offer != offer ? 1 : 0;
}

namespace {

// Position of the GAT named `name` within `columns`, checked for entity and type.
std::size_t bound_column(const MappingSpec& spec, const std::vector<std::size_t>& columns, const std::string& name,
                         Entity entity, std::optional<OutputType> type)
{
    const auto idx = spec.index_of(name);
    if (!idx) throw ValidationError("features: mapping has no GAT named '" + name + "'");
    const auto& gat = spec.gats()[*idx];
    if (gat.entity != entity)
        throw ValidationError("features: GAT '" + name + "' must belong to entity " + std::string(to_string(entity)));
    if (type && gat.output_type != *type)
        throw ValidationError("features: GAT '" + name + "' must have type " + std::string(to_string(*type)));
    const auto pos = std::find(columns.begin(), columns.end(), *idx);
    if (pos == columns.end()) throw ValidationError("features: GAT '" + name + "' is not a table column");
    return static_cast<std::size_t>(pos - columns.begin());
}

std::string category(const CleanValue& v) { return v.render().value_or(std::string()); }

Decimal decimal_or_zero(const CleanValue& v) { return v.is_null() ? Decimal{} : v.as_decimal(); }
std::int64_t integer_or_zero(const CleanValue& v) { return v.is_null() ? 0 : v.as_integer(); }

struct PairAccumulator
{
    std::string sex;
    std::optional<std::int64_t> age;
    std::string municipality;
    Decimal consumption, amount, light;
    std::int64_t billed_days = 0;
    int churn = 0;
};

}  // namespace

FeatureSet build_feature_vectors(const EntityTables& tables, const MappingSpec& spec, const FeatureBindings& bindings)
{
    if (!spec.offer_index()) throw ValidationError("features: mapping has no offer GAT");
    const EntityLayout layout(spec);
    const auto col_of = [&](std::size_t gat) {
        return static_cast<std::size_t>(std::find(layout.bill_columns.begin(), layout.bill_columns.end(), gat) -
                                        layout.bill_columns.begin());
    };
    const std::size_t offer_col = col_of(*spec.offer_index());
    const std::size_t date_col = col_of(spec.bill_date_index());
    const std::size_t consumption_col =
        bound_column(spec, layout.bill_columns, bindings.total_consumption, Entity::bill, OutputType::decimal);
    const std::size_t amount_col =
        bound_column(spec, layout.bill_columns, bindings.total_amount, Entity::bill, OutputType::decimal);
    const std::size_t light_col =
        bound_column(spec, layout.bill_columns, bindings.total_light_amount, Entity::bill, OutputType::decimal);
    const std::size_t days_col =
        bound_column(spec, layout.bill_columns, bindings.billed_days, Entity::bill, OutputType::integer);
    const std::size_t municipality_col =
        bound_column(spec, layout.pod_columns, bindings.municipality, Entity::pod, std::nullopt);
    const std::size_t sex_col = bound_column(spec, layout.user_columns, bindings.sex, Entity::user, std::nullopt);

    FeatureSet set;
    for (const auto& b : tables.bills) {
        if (b.values[date_col].tag() != ValueTag::date)
            throw ValidationError("features: bill '" + b.bill_id + "' has no bill date");
        const Date d = b.values[date_col].as_date();
        if (!set.reference_date || d > *set.reference_date) set.reference_date = d;
    }

    std::unordered_map<std::string_view, const PodRow*> pods;
    for (const auto& p : tables.pods) pods.emplace(p.pod_id, &p);
    std::unordered_map<std::string_view, const UserRow*> users;
    for (const auto& u : tables.users) users.emplace(u.user_id, &u);

    // Bills grouped per POD, in bill_id order.
    std::map<std::string_view, std::vector<const BillRow*>> by_pod;
    for (const auto& b : tables.bills) {
        if (b.values[offer_col].is_null()) {
            set.ledger.push_back({"bill", b.bill_id, "null offer"});
            by_pod.try_emplace(b.pod_id);
            continue;
        }
        by_pod[b.pod_id].push_back(&b);
    }

    struct Pending
    {
        std::string pod_id;
        std::string offer;
        PairAccumulator acc;
    };
    std::vector<Pending> pending;
    for (const auto& [pod_id, bills] : by_pod) {
        if (bills.empty()) {
            set.ledger.push_back({"pod", std::string(pod_id), "no bill with a non-null offer"});
            continue;
        }
        const PodRow* pod = pods.at(pod_id);
        const UserRow* user = nullptr;
        if (pod->user_id) user = users.at(*pod->user_id);

        std::vector<DatedOffer> dated;
        dated.reserve(bills.size());
        for (const BillRow* b : bills)
            dated.push_back({b->values[date_col].as_date(), b->bill_id, *b->values[offer_col].render()});

        std::map<std::string, PairAccumulator> pairs;
        for (std::size_t i = 0; i < bills.size(); ++i) {
            const BillRow& b = *bills[i];
            auto [it, inserted] = pairs.try_emplace(dated[i].offer);
            PairAccumulator& acc = it->second;
            if (inserted) {
                acc.municipality = category(pod->values[municipality_col]);
                if (user) {
                    acc.sex = category(user->values[sex_col]);
                    if (user->year_of_birth)
                        acc.age = static_cast<int>(set.reference_date->year()) - *user->year_of_birth;
                }
                acc.churn = label_churn(dated, dated[i].offer);
            }
            acc.consumption += decimal_or_zero(b.values[consumption_col]);
            acc.amount += decimal_or_zero(b.values[amount_col]);
            acc.light += decimal_or_zero(b.values[light_col]);
            acc.billed_days += integer_or_zero(b.values[days_col]);
        }
        for (auto& [offer, acc] : pairs) pending.push_back({std::string(pod_id), offer, std::move(acc)});
    }

    std::vector<std::string> offers, sexes, municipalities;
    for (const auto& p : pending) {
        offers.push_back(p.offer);
        sexes.push_back(p.acc.sex);
        municipalities.push_back(p.acc.municipality);
    }
    auto offer_enc = encode_categorical(offers, "offer");
    auto sex_enc = encode_categorical(sexes, "sex");
    auto municipality_enc = encode_categorical(municipalities, "municipality");

    set.vectors.reserve(pending.size());
    for (std::size_t i = 0; i < pending.size(); ++i) {
        const auto& acc = pending[i].acc;
        set.vectors.push_back({pending[i].pod_id, offer_enc.codes[i], sex_enc.codes[i], acc.age,
                               municipality_enc.codes[i], acc.consumption, acc.amount, acc.light, acc.billed_days,
                               acc.churn});
    }
    // Pairs were produced per POD in offer-string order, which is offer-code order.
    std::sort(set.vectors.begin(), set.vectors.end(), [](const FeatureVector& a, const FeatureVector& b) {
        return std::tie(a.pod_id, a.offer) < std::tie(b.pod_id, b.offer);
    });
    set.offer = std::move(offer_enc.table);
    set.sex = std::move(sex_enc.table);
    set.municipality = std::move(municipality_enc.table);
    return set;
}

void write_features_csv(std::ostream& out, const std::vector<FeatureVector>& vectors)
{
    csv::write_header(out, feature_header);
    for (const auto& v : vectors) {
        const csv::Row row{v.pod_id,
                           std::to_string(v.offer),
                           std::to_string(v.sex),
                           v.age ? csv::Field(std::to_string(*v.age)) : std::nullopt,
                           std::to_string(v.municipality),
                           v.total_consumption.to_string(),
                           v.total_amount.to_string(),
                           v.total_light_amount.to_string(),
                           std::to_string(v.billed_days),
                           std::to_string(v.churn)};
        csv::write_row(out, row);
    }
}

namespace {

template <typename T>
T parse_int_cell(const csv::Field& f, std::size_t line)
{
    if (!f) throw ParseError("features: missing integer", line);
    T v{};
    auto [end, ec] = std::from_chars(f->data(), f->data() + f->size(), v);
    if (ec != std::errc{} || end != f->data() + f->size()) throw ParseError("features: bad integer '" + *f + "'", line);
    return v;
}

Decimal parse_decimal_cell(const csv::Field& f, std::size_t line)
{
    try {
        return parse_canonical(ValueTag::decimal, f).as_decimal();
    } catch (const ParseError& e) {
        throw ParseError(std::string("features: ") + e.what(), line);
    }
}

}  // namespace

std::vector<FeatureVector> read_features_csv(std::istream& in)
{
    csv::Reader reader(in);
    csv::expect_header(reader, feature_header, "features");
    std::vector<FeatureVector> out;
    csv::Row row;
    while (reader.next(row)) {
        const auto line = reader.line();
        if (row.size() != feature_header.size() || !row[0]) throw ParseError("features: malformed row", line);
        FeatureVector v;
        v.pod_id = *row[0];
        v.offer = parse_int_cell<int>(row[1], line);
        v.sex = parse_int_cell<int>(row[2], line);
        if (row[3]) v.age = parse_int_cell<std::int64_t>(row[3], line);
        v.municipality = parse_int_cell<int>(row[4], line);
        v.total_consumption = parse_decimal_cell(row[5], line);
        v.total_amount = parse_decimal_cell(row[6], line);
        v.total_light_amount = parse_decimal_cell(row[7], line);
        v.billed_days = parse_int_cell<std::int64_t>(row[8], line);
        v.churn = parse_int_cell<int>(row[9], line);
        if (v.churn != 0 && v.churn != 1) throw ParseError("features: churn must be 0 or 1", line);
        out.push_back(std::move(v));
    }
    return out;
}

nlohmann::json encodings_to_json(const FeatureSet& set)
{
    return {{set.offer.column, set.offer.codes},
            {set.sex.column, set.sex.codes},
            {set.municipality.column, set.municipality.codes}};
}

Dataset to_dataset(const std::vector<FeatureVector>& vectors)
{
    Dataset d;
    d.rows = vectors.size();
    d.cols = feature_columns.size();
    d.names = feature_columns;
    d.x.reserve(d.rows * d.cols);
    d.y.reserve(d.rows);
    for (const auto& v : vectors) {
        d.x.push_back(v.offer);
        d.x.push_back(v.sex);
        d.x.push_back(v.age ? static_cast<double>(*v.age) : -1.0);
        d.x.push_back(v.municipality);
        d.x.push_back(v.total_consumption.to_double());
        d.x.push_back(v.total_amount.to_double());
        d.x.push_back(v.total_light_amount.to_double());
        d.x.push_back(static_cast<double>(v.billed_days));
        d.y.push_back(v.churn);
    }
    return d;
}

Dataset subset(const Dataset& data, std::span<const std::size_t> rows)
{
    Dataset out;
    out.rows = rows.size();
    out.cols = data.cols;
    out.names = data.names;
    out.x.reserve(out.rows * out.cols);
    out.y.reserve(out.rows);
    for (auto r : rows) {
        out.x.insert(out.x.end(), data.row(r), data.row(r) + data.cols);
        out.y.push_back(data.y[r]);
    }
    return out;
}

}  // namespace billprep::analytics
