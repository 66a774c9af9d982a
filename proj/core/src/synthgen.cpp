#include "billprep/synthgen.hpp"

#include "billprep/io.hpp"
#include "billprep/random.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

namespace billprep {

namespace fs = std::filesystem;
using analytics::FeatureSet;
using analytics::FeatureVector;

namespace {

struct Offer
{
    const char* code;
    std::int64_t price_milli;  // thousandths of a euro per kWh
    std::int64_t fee_minor;    // per two-month period
};

constexpr std::array<Offer, 8> offers = {{{"BASE", 210, 1200},
                                          {"FLEX", 232, 900},
                                          {"GREEN", 245, 1500},
                                          {"NIGHT", 198, 1800},
                                          {"PLUS", 226, 1100},
                                          {"PREMIUM", 268, 2400},
                                          {"SMART", 219, 1300},
                                          {"WEEKEND", 205, 1600}}};

constexpr std::array municipalities = {"Ancona",  "Bari",    "Bologna", "Cagliari", "Catania", "Como",
                                       "Firenze", "Forlì",   "Genova",  "Lecce",    "Milano",  "Modena",
                                       "Napoli",  "Padova",  "Palermo", "Parma",    "Perugia", "Pisa",
                                       "Roma",    "Salerno", "Torino",  "Trento",   "Venezia", "Verona"};

constexpr std::array first_names = {"Alessandro", "Anna",   "Chiara", "Davide", "Elena",  "Francesco",
                                    "Giulia",     "Luca",   "Marco",  "Maria",  "Matteo", "Paola",
                                    "Roberto",    "Sara",   "Simone", "Valentina"};

constexpr std::array surnames = {"Bianchi", "Colombo", "Conti",  "Costa",   "Esposito", "Ferrari", "Gallo",
                                 "Greco",   "Marino",  "Ricci",  "Romano",  "Rossi",    "Russo",   "Bruno"};

struct UserDraft
{
    std::string id;
    std::string holder;
    std::string sex;
    int birth_year = 0;
};

struct PodDraft
{
    std::string id;
    std::string municipality;
};

enum class FieldState { present, absent, null };

struct BillDraft
{
    std::string bill_id;
    std::string folder;
    Date date;
    std::size_t offer = 0;
    Decimal consumption, light, fee, total;
    std::int64_t days = 0;
    std::string number;
    bool v2 = false;
    FieldState sex = FieldState::present;
    bool has_age = true;
    bool pad_holder = false;
};

// What the pipeline will fuse for a user, known once all of its bills exist.
struct UserOutcome
{
    bool sex_seen = false;
    bool age_seen = false;
};

// Runs the generator, reporting every bill, the end of every POD and the
// end of every user. All random draws happen here, in a fixed order.
class World
{
public:
    explicit World(const SynthConfig& config)
        : c_(config)
        , eng_(rng::make_engine(config.seed))
    {
        config.validate();
    }

    template <typename OnBill, typename OnPod, typename OnUser>
    void run(OnBill&& on_bill, OnPod&& on_pod, OnUser&& on_user)
    {
        const double q = c_.churn_prevalence / (1.0 - c_.churn_prevalence);
        const auto cadence = static_cast<std::int64_t>(c_.cadence_months);
        std::size_t pod_seq = 0, bill_seq = 0;
        for (std::size_t u = 0; u < c_.users; ++u) {
            UserDraft user;
            user.id = hash_value("customer-" + std::to_string(u), "synth-" + std::to_string(c_.seed));
            user.holder = std::string(pick(first_names)) + " " + pick(surnames);
            user.sex = rng::bernoulli(eng_, 0.5) ? "F" : "M";
            user.birth_year = static_cast<int>(rng::between(eng_, c_.start_year - 86, c_.start_year - 18));
            UserOutcome outcome;

            const auto pods = rng::between(eng_, static_cast<std::int64_t>(c_.min_pods_per_user),
                                           static_cast<std::int64_t>(c_.max_pods_per_user));
            for (std::int64_t p = 0; p < pods; ++p) {
                PodDraft pod;
                char buf[32];
                std::snprintf(buf, sizeof buf, "IT001E%08zu", ++pod_seq);
                pod.id = buf;
                pod.municipality = pick(municipalities);
                const double scale = std::exp(0.5 * rng::normal(eng_));

                const auto months = static_cast<std::int64_t>(c_.months);
                const std::int64_t first =
                    rng::bernoulli(eng_, c_.late_start_probability)
                        ? static_cast<std::int64_t>(rng::below(eng_, c_.months))
                        : static_cast<std::int64_t>(rng::below(eng_, std::min(c_.cadence_months, c_.months)));
                const std::int64_t count = (months - first + cadence - 1) / cadence;

                const std::size_t offer0 = rng::below(eng_, offers.size());
                std::size_t offer1 = offer0;
                std::int64_t change_at = count;
                if (count >= 2 && rng::bernoulli(eng_, q)) {
                    change_at = rng::between(eng_, 1, count - 1);
                    offer1 = (offer0 + 1 + rng::below(eng_, offers.size() - 1)) % offers.size();
                }

                for (std::int64_t i = 0; i < count; ++i) {
                    BillDraft bill;
                    const bool abandoned = i < change_at && change_at < count;
                    bill.offer = i < change_at ? offer0 : offer1;

                    const std::int64_t month_index =
                        static_cast<std::int64_t>(c_.start_month) - 1 + first + i * cadence;
                    const int year = c_.start_year + static_cast<int>(month_index / 12);
                    const unsigned month = static_cast<unsigned>(month_index % 12) + 1;
                    const unsigned day = static_cast<unsigned>(rng::between(eng_, 1, 28));
                    bill.date = Date{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
                    std::snprintf(buf, sizeof buf, "%04d-%02u", year, month);
                    bill.folder = buf;

                    bill.days = rng::between(eng_, 28 * cadence + 2, 31 * cadence);
                    if (abandoned && c_.billed_days_dependence > 0)
                        bill.days -= rng::between(eng_, 0, std::llround(12.0 * c_.billed_days_dependence));

                    const Offer& offer = offers[bill.offer];
                    const double kwh = scale * std::exp(0.35 * rng::normal(eng_)) * 150.0 * static_cast<double>(cadence);
                    bill.consumption.minor = std::max<std::int64_t>(1, std::llround(kwh * 100.0));
                    bill.light.minor = (bill.consumption.minor * offer.price_milli + 500) / 1000;
                    bill.fee.minor = offer.fee_minor * cadence / 2 + rng::between(eng_, 0, 300);
                    bill.total = bill.light + bill.fee;

                    bill.v2 = rng::bernoulli(eng_, c_.layout_v2_probability);
                    if (rng::bernoulli(eng_, c_.inconsistency_probability))
                        bill.sex = rng::below(eng_, 2) ? FieldState::null : FieldState::absent;
                    bill.has_age = !rng::bernoulli(eng_, c_.inconsistency_probability);
                    bill.pad_holder = rng::bernoulli(eng_, c_.inconsistency_probability);

                    ++bill_seq;
                    std::snprintf(buf, sizeof buf, "bill_%06zu.json", bill_seq);
                    bill.bill_id = bill.folder + "/" + buf;
                    std::snprintf(buf, sizeof buf, "F%d-%07zu", year, bill_seq);
                    bill.number = buf;

                    outcome.sex_seen |= bill.sex == FieldState::present;
                    outcome.age_seen |= bill.has_age;
                    on_bill(user, pod, bill);
                }
                on_pod(user, pod);
            }
            on_user(user, outcome);
        }
    }

private:
    template <typename Array>
    const char* pick(const Array& items)
    {
        return items[rng::below(eng_, items.size())];
    }

    const SynthConfig& c_;
    rng::Engine eng_;
};

// Italian-style display amount: "1.234,56 €".
std::string display_amount(Decimal d, std::string_view unit)
{
    const bool negative = d.minor < 0;
    const std::uint64_t abs = negative ? 0 - static_cast<std::uint64_t>(d.minor) : static_cast<std::uint64_t>(d.minor);
    std::string units = std::to_string(abs / 100);
    std::string grouped;
    for (std::size_t i = 0; i < units.size(); ++i) {
        if (i && (units.size() - i) % 3 == 0) grouped += '.';
        grouped += units[i];
    }
    char cents[4];
    std::snprintf(cents, sizeof cents, "%02u", static_cast<unsigned>(abs % 100));
    return (negative ? "-" : "") + grouped + "," + cents + " " + std::string(unit);
}

std::string plain_amount(Decimal d, std::string_view unit) { return d.to_string() + " " + std::string(unit); }

std::string upper(std::string s)
{
    for (char& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return s;
}

nlohmann::ordered_json make_document(const SynthConfig& c, const UserDraft& user, const PodDraft& pod,
                                     const BillDraft& bill)
{
    nlohmann::ordered_json customer;
    customer["id"] = user.id;
    customer["holder"] = bill.pad_holder ? "  " + user.holder + " " : user.holder;
    if (bill.sex == FieldState::present) customer["sex"] = user.sex;
    else if (bill.sex == FieldState::null) customer["sex"] = nullptr;
    if (bill.has_age) customer["age"] = static_cast<int>(bill.date.year()) - user.birth_year;

    nlohmann::ordered_json supply;
    supply["pod"] = pod.id;
    supply["address"] = {{"municipality", pod.municipality}};

    const std::string date = render_display_date(bill.date, c.locale);
    const char* days_unit = c.locale == MonthLocale::italian ? " giorni" : " days";
    nlohmann::ordered_json doc;
    doc["number"] = bill.number;
    if (!bill.v2) {
        doc["issue_date"] = date;
        doc["offer"] = {{"code", offers[bill.offer].code}};
        doc["period"] = {{"billed_days", bill.days}};
        doc["summary"] = {{"total", display_amount(bill.total, "€")}, {"light_total", display_amount(bill.light, "€")}};
        doc["lines"] = nlohmann::ordered_json::array(
            {{{"kind", "energy"}, {"amount", display_amount(bill.light, "€")},
              {"consumption", display_amount(bill.consumption, "kWh")}},
             {{"kind", "fees"}, {"amount", display_amount(bill.fee, "€")}}});
    } else {
        doc["issued_on"] = upper(date);
        doc["offer"] = {{"code", offers[bill.offer].code}, {"revision", 2}};
        doc["period"] = {{"billed_days", std::to_string(bill.days) + days_unit}};
        doc["totals"] = {{"amount", plain_amount(bill.total, "EUR")}};
        doc["lines"] = nlohmann::ordered_json::array(
            {{{"kind", "energy"}, {"amount", plain_amount(bill.light, "EUR")}},
             {{"kind", "meter"}, {"consumption", plain_amount(bill.consumption, "kWh")}},
             {{"kind", "fees"}, {"amount", plain_amount(bill.fee, "EUR")}}});
    }

    nlohmann::ordered_json out;
    out["customer"] = std::move(customer);
    out["supply"] = std::move(supply);
    out["document"] = std::move(doc);
    return out;
}

// Builds the expected feature vectors the way the analytics stage does.
class FeatureTruth
{
public:
    void add_bill(const PodDraft& pod, const BillDraft& bill)
    {
        if (!reference_ || bill.date > *reference_) reference_ = bill.date;
        auto& acc = pod_pairs_[offers[bill.offer].code];
        if (acc.municipality.empty()) acc.municipality = pod.municipality;
        acc.consumption += bill.consumption;
        acc.amount += bill.total;
        acc.light += bill.light;
        acc.days += bill.days;
        last_offer_ = offers[bill.offer].code;
    }

    void end_pod(const PodDraft& pod)
    {
        for (auto& [offer, acc] : pod_pairs_) {
            acc.pod_id = pod.id;
            acc.offer = offer;
            acc.churn = offer != last_offer_ ? 1 : 0;
            user_pending_.push_back(std::move(acc));
        }
        pod_pairs_.clear();
    }

    void end_user(const UserDraft& user, const UserOutcome& outcome)
    {
        for (auto& p : user_pending_) {
            p.sex = outcome.sex_seen ? user.sex : std::string();
            if (outcome.age_seen) p.year_of_birth = user.birth_year;
            pending_.push_back(std::move(p));
        }
        user_pending_.clear();
    }

    FeatureSet finish()
    {
        FeatureSet set;
        set.reference_date = reference_;
        std::vector<std::string> offer_col, sex_col, municipality_col;
        for (const auto& p : pending_) {
            offer_col.push_back(p.offer);
            sex_col.push_back(p.sex);
            municipality_col.push_back(p.municipality);
        }
        auto offer_enc = analytics::encode_categorical(offer_col, "offer");
        auto sex_enc = analytics::encode_categorical(sex_col, "sex");
        auto municipality_enc = analytics::encode_categorical(municipality_col, "municipality");
        for (std::size_t i = 0; i < pending_.size(); ++i) {
            const auto& p = pending_[i];
            FeatureVector v;
            v.pod_id = p.pod_id;
            v.offer = offer_enc.codes[i];
            v.sex = sex_enc.codes[i];
            if (p.year_of_birth) v.age = static_cast<int>(reference_->year()) - *p.year_of_birth;
            v.municipality = municipality_enc.codes[i];
            v.total_consumption = p.consumption;
            v.total_amount = p.amount;
            v.total_light_amount = p.light;
            v.billed_days = p.days;
            v.churn = p.churn;
            set.vectors.push_back(std::move(v));
        }
        std::sort(set.vectors.begin(), set.vectors.end(), [](const FeatureVector& a, const FeatureVector& b) {
            return std::tie(a.pod_id, a.offer) < std::tie(b.pod_id, b.offer);
        });
        set.offer = std::move(offer_enc.table);
        set.sex = std::move(sex_enc.table);
        set.municipality = std::move(municipality_enc.table);
        return set;
    }

private:
    struct Pending
    {
        std::string pod_id, offer, sex, municipality;
        std::optional<std::int64_t> year_of_birth;
        Decimal consumption, amount, light;
        std::int64_t days = 0;
        int churn = 0;
    };

    std::map<std::string, Pending> pod_pairs_;
    std::string last_offer_;
    std::vector<Pending> user_pending_;
    std::vector<Pending> pending_;
    std::optional<Date> reference_;
};

class TableTruth
{
public:
    TableTruth(const MappingSpec& spec, std::string salt)
        : spec_(spec)
        , layout_(spec)
        , salt_(std::move(salt))
    {
    }

    void add_bill(const PodDraft& pod, const BillDraft& bill)
    {
        BillRow row;
        row.bill_id = bill.bill_id;
        row.pod_id = pod.id;
        for (auto col : layout_.bill_columns) row.values.push_back(bill_value(spec_.gats()[col].name, bill));
        tables_.bills.push_back(std::move(row));
    }

    void end_pod(const UserDraft& user, const PodDraft& pod)
    {
        PodRow row;
        row.pod_id = pod.id;
        row.user_id = user.id;
        for (auto col : layout_.pod_columns) {
            const auto& name = spec_.gats()[col].name;
            if (name != "municipality") throw ValidationError("synthgen: unexpected POD GAT '" + name + "'");
            row.values.push_back(CleanValue::make_text(pod.municipality));
        }
        tables_.pods.push_back(std::move(row));
    }

    void end_user(const UserDraft& user, const UserOutcome& outcome)
    {
        UserRow row;
        row.user_id = user.id;
        if (outcome.age_seen) row.year_of_birth = user.birth_year;
        for (auto col : layout_.user_columns) {
            const auto& name = spec_.gats()[col].name;
            if (name == "holder") row.values.push_back(CleanValue::make_hashed(hash_value(user.holder, salt_)));
            else if (name == "sex")
                row.values.push_back(outcome.sex_seen ? CleanValue::make_text(user.sex) : CleanValue());
            else throw ValidationError("synthgen: unexpected user GAT '" + name + "'");
        }
        tables_.users.push_back(std::move(row));
    }

    EntityTables finish()
    {
        auto by = [](auto member) { return [member](const auto& a, const auto& b) { return a.*member < b.*member; }; };
        std::sort(tables_.bills.begin(), tables_.bills.end(), by(&BillRow::bill_id));
        std::sort(tables_.pods.begin(), tables_.pods.end(), by(&PodRow::pod_id));
        std::sort(tables_.users.begin(), tables_.users.end(), by(&UserRow::user_id));
        return std::move(tables_);
    }

private:
    static CleanValue bill_value(const std::string& name, const BillDraft& bill)
    {
        if (name == "issue_date") return CleanValue::make_date(bill.date);
        if (name == "document_number") return CleanValue::make_text(bill.number);
        if (name == "offer") return CleanValue::make_text(offers[bill.offer].code);
        if (name == "total_amount") return CleanValue::make_decimal(bill.total);
        if (name == "total_light_amount") return CleanValue::make_decimal(bill.light);
        if (name == "total_consumption") return CleanValue::make_decimal(bill.consumption);
        if (name == "billed_days") return CleanValue::make_integer(bill.days);
        throw ValidationError("synthgen: unexpected bill GAT '" + name + "'");
    }

    const MappingSpec& spec_;
    EntityLayout layout_;
    std::string salt_;
    EntityTables tables_;
};

GroundTruth simulate(const SynthConfig& config, const fs::path* corpus)
{
    const MappingSpec spec = default_mapping_spec(config.locale);
    World world(config);
    TableTruth tables(spec, config.salt);
    FeatureTruth features;
    std::set<std::string> folders;
    GroundTruth truth;

    world.run(
        [&](const UserDraft& user, const PodDraft& pod, const BillDraft& bill) {
            ++truth.bill_count;
            tables.add_bill(pod, bill);
            features.add_bill(pod, bill);
            if (!corpus) return;
            const fs::path dir = *corpus / bill.folder;
            if (folders.insert(bill.folder).second) {
                std::error_code ec;
                fs::create_directories(dir, ec);
                if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
            }
            const fs::path file = *corpus / bill.bill_id;
            std::ofstream out(file, std::ios::binary | std::ios::trunc);
            out << make_document(config, user, pod, bill).dump(2) << '\n';
            if (!out) throw IoError("cannot write '" + file.string() + "'");
        },
        [&](const UserDraft& user, const PodDraft& pod) {
            tables.end_pod(user, pod);
            features.end_pod(pod);
        },
        [&](const UserDraft& user, const UserOutcome& outcome) {
            tables.end_user(user, outcome);
            features.end_user(user, outcome);
        });

    truth.tables = tables.finish();
    truth.features = features.finish();
    return truth;
}

void write_text(const fs::path& path, const std::string& text)
{
    write_file_atomically(path, [&](std::ostream& out) { out << text; });
}

}  // namespace

void SynthConfig::validate() const
{
    auto probability = [](double p, const char* what) {
        if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(std::string("synth: ") + what + " must be in [0, 1]");
    };
    probability(churn_prevalence, "churn_prevalence");
    probability(inconsistency_probability, "inconsistency_probability");
    probability(billed_days_dependence, "billed_days_dependence");
    probability(late_start_probability, "late_start_probability");
    probability(layout_v2_probability, "layout_v2_probability");
    if (churn_prevalence >= 0.5) throw ValidationError("synth: churn_prevalence must be below 0.5");
    if (users < 1) throw ValidationError("synth: users must be >= 1");
    if (min_pods_per_user < 1 || max_pods_per_user < min_pods_per_user)
        throw ValidationError("synth: need 1 <= min_pods_per_user <= max_pods_per_user");
    if (months < 1 || months > 480) throw ValidationError("synth: months must be in 1..480");
    if (cadence_months < 1) throw ValidationError("synth: cadence_months must be >= 1");
    if (start_month < 1 || start_month > 12) throw ValidationError("synth: start_month must be in 1..12");
    if (start_year < 1900 || start_year > 9000) throw ValidationError("synth: start_year out of range");
}

nlohmann::json SynthConfig::to_json() const
{
    return {{"users", users},
            {"min_pods_per_user", min_pods_per_user},
            {"max_pods_per_user", max_pods_per_user},
            {"start_year", start_year},
            {"start_month", start_month},
            {"months", months},
            {"cadence_months", cadence_months},
            {"churn_prevalence", churn_prevalence},
            {"inconsistency_probability", inconsistency_probability},
            {"billed_days_dependence", billed_days_dependence},
            {"late_start_probability", late_start_probability},
            {"layout_v2_probability", layout_v2_probability},
            {"locale", std::string(to_string(locale))},
            {"salt", salt},
            {"seed", seed}};
}

SynthConfig SynthConfig::from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw ParseError("synth config: expected a JSON object");
    static const std::set<std::string> known = {
        "users",  "min_pods_per_user", "max_pods_per_user", "start_year", "start_month",
        "months", "cadence_months",    "churn_prevalence",  "inconsistency_probability",
        "billed_days_dependence",      "late_start_probability", "layout_v2_probability",
        "locale", "salt",              "seed"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw ValidationError("synth config: unknown key '" + key + "'");
    SynthConfig c;
    try {
        c.users = j.value("users", c.users);
        c.min_pods_per_user = j.value("min_pods_per_user", c.min_pods_per_user);
        c.max_pods_per_user = j.value("max_pods_per_user", c.max_pods_per_user);
        c.start_year = j.value("start_year", c.start_year);
        c.start_month = j.value("start_month", c.start_month);
        c.months = j.value("months", c.months);
        c.cadence_months = j.value("cadence_months", c.cadence_months);
        c.churn_prevalence = j.value("churn_prevalence", c.churn_prevalence);
        c.inconsistency_probability = j.value("inconsistency_probability", c.inconsistency_probability);
        c.billed_days_dependence = j.value("billed_days_dependence", c.billed_days_dependence);
        c.late_start_probability = j.value("late_start_probability", c.late_start_probability);
        c.layout_v2_probability = j.value("layout_v2_probability", c.layout_v2_probability);
        c.salt = j.value("salt", c.salt);
        c.seed = j.value("seed", c.seed);
        if (j.contains("locale")) {
            const auto locale = parse_month_locale(j.at("locale").get<std::string>());
            if (!locale) throw ValidationError("synth config: locale must be english or italian");
            c.locale = *locale;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("synth config: ") + e.what());
    }
    c.validate();
    return c;
}

MappingSpec default_mapping_spec(MonthLocale locale)
{
    auto gat = [](std::string name, std::initializer_list<const char*> paths, OutputType type, Entity entity,
                  Role role) {
        GatDefinition g;
        g.name = std::move(name);
        for (const char* p : paths) g.paths.push_back(parse_json_path(p));
        g.output_type = type;
        g.entity = entity;
        g.role = role;
        return g;
    };
    using T = OutputType;
    using E = Entity;
    using R = Role;
    return MappingSpec(
        {gat("issue_date", {"document.issue_date", "document.issued_on"}, T::date, E::bill, R::bill_date),
         gat("document_number", {"document.number"}, T::text, E::bill, R::attribute),
         gat("offer", {"document.offer.code"}, T::text, E::bill, R::offer),
         gat("total_amount", {"document.summary.total", "document.totals.amount"}, T::decimal, E::bill, R::attribute),
         gat("total_light_amount", {"document.summary.light_total", "document.lines[0].amount"}, T::decimal, E::bill,
             R::attribute),
         gat("total_consumption", {"document.lines[*].consumption"}, T::decimal, E::bill, R::attribute),
         gat("billed_days", {"document.period.billed_days"}, T::integer, E::bill, R::attribute),
         gat("pod_id", {"supply.pod"}, T::text, E::pod, R::identifier),
         gat("municipality", {"supply.address.municipality"}, T::text, E::pod, R::attribute),
         gat("user_id", {"customer.id"}, T::text, E::user, R::identifier),
         gat("holder", {"customer.holder"}, T::hashed_text, E::user, R::attribute),
         gat("sex", {"customer.sex"}, T::text, E::user, R::attribute),
         gat("age", {"customer.age"}, T::integer, E::user, R::age)},
        locale);
}

GroundTruth simulate_corpus(const SynthConfig& config) { return simulate(config, nullptr); }

GroundTruth generate_corpus(const SynthConfig& config, const fs::path& out)
{
    config.validate();
    const fs::path corpus = out / "corpus";
    const fs::path truth_dir = out / "truth";
    std::error_code ec;
    fs::create_directories(corpus, ec);
    if (!ec) fs::create_directories(truth_dir, ec);
    if (ec) throw IoError("cannot create '" + out.string() + "': " + ec.message());

    GroundTruth truth = simulate(config, &corpus);
    const MappingSpec spec = default_mapping_spec(config.locale);
    write_text(out / "mapping.csv", serialize_mapping_file(spec));
    write_text(out / "synth.json", config.to_json().dump(2) + "\n");
    write_tables(truth_dir, truth.tables, spec);
    write_file_atomically(truth_dir / "quarantine.csv",
                          [&](std::ostream& o) { write_quarantine_csv(o, {}); });
    write_file_atomically(truth_dir / "features.csv",
                          [&](std::ostream& o) { analytics::write_features_csv(o, truth.features.vectors); });
    write_text(truth_dir / "encodings.json", analytics::encodings_to_json(truth.features).dump(2) + "\n");
    return truth;
}

FeatureSet synthesize_feature_set(const SynthConfig& config)
{
    World world(config);
    FeatureTruth features;
    world.run([&](const UserDraft&, const PodDraft& pod, const BillDraft& bill) { features.add_bill(pod, bill); },
              [&](const UserDraft&, const PodDraft& pod) { features.end_pod(pod); },
              [&](const UserDraft& user, const UserOutcome& outcome) { features.end_user(user, outcome); });
    return features.finish();
}

}  // namespace billprep
