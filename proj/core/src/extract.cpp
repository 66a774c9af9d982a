#include "billprep/extract.hpp"

#include "billprep/csv.hpp"
#include "billprep/error.hpp"
#include "billprep/parallel.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace billprep {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// SAX handler that builds a DOM in which every number is stored as the string
// of its source token.
class DocumentBuilder final : public nlohmann::json_sax<json>
{
public:
    json take() { return std::move(root_); }

    bool null() override { return put(nullptr) != nullptr; }
    bool boolean(bool val) override { return put(val) != nullptr; }
    bool number_integer(number_integer_t val) override { return put(std::to_string(val)) != nullptr; }
    bool number_unsigned(number_unsigned_t val) override { return put(std::to_string(val)) != nullptr; }
    bool number_float(number_float_t, const string_t& s) override { return put(s) != nullptr; }
    bool string(string_t& val) override { return put(std::move(val)) != nullptr; }
    bool binary(binary_t&) override { return put(nullptr) != nullptr; }

    bool start_object(std::size_t) override
    {
        stack_.push_back(put(json::object()));
        return true;
    }
    bool key(string_t& val) override
    {
        key_ = std::move(val);
        return true;
    }
    bool end_object() override
    {
        stack_.pop_back();
        return true;
    }
    bool start_array(std::size_t) override
    {
        stack_.push_back(put(json::array()));
        return true;
    }
    bool end_array() override
    {
        stack_.pop_back();
        return true;
    }

    bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception& ex) override
    {
        throw ParseError(ex.what());
    }

private:
    json* put(json value)
    {
        if (stack_.empty()) {
            root_ = std::move(value);
            return &root_;
        }
        json* top = stack_.back();
        if (top->is_object()) {
            json& slot = (*top)[key_];
            slot = std::move(value);
            return &slot;
        }
        top->push_back(std::move(value));
        return &top->back();
    }

    json root_;
    std::vector<json*> stack_;
    std::string key_;
};

std::optional<std::string> leaf_text(const json& node)
{
    switch (node.type()) {
    case json::value_t::string: return node.get<std::string>();
    case json::value_t::boolean:
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
    case json::value_t::number_float: return node.dump();
    default: return std::nullopt;
    }
}

std::optional<std::string> resolve_from(const json& node, const std::vector<PathStep>& steps,
                                        std::size_t at)
{
    const json* cur = &node;
    for (std::size_t i = at; i < steps.size(); ++i) {
        const PathStep& step = steps[i];
        switch (step.kind) {
        case PathStep::Kind::key: {
            if (!cur->is_object()) return std::nullopt;
            auto it = cur->find(step.key);
            if (it == cur->end()) return std::nullopt;
            cur = &*it;
            break;
        }
        case PathStep::Kind::index:
            if (!cur->is_array() || step.index >= cur->size()) return std::nullopt;
            cur = &(*cur)[step.index];
            break;
        case PathStep::Kind::wildcard:
            if (!cur->is_array()) return std::nullopt;
            for (const json& element : *cur)
                if (auto v = resolve_from(element, steps, i + 1)) return v;
            return std::nullopt;
        }
    }
    return leaf_text(*cur);
}

bool has_json_extension(const fs::path& p)
{
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".json";
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open '" + p.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read error on '" + p.string() + "'");
    return buf.str();
}

}  // namespace

nlohmann::json parse_document(std::string_view text)
{
    DocumentBuilder builder;
    json::sax_parse(text.begin(), text.end(), &builder);
    return builder.take();
}

std::optional<std::string> resolve_path(const nlohmann::json& document, const JsonPath& path)
{
    return resolve_from(document, path.steps, 0);
}

std::vector<Observation> extract_bill(const std::string& bill_id, const nlohmann::json& document,
                                      const MappingSpec& spec)
{
    std::vector<Observation> out;
    out.reserve(spec.gats().size());
    for (const auto& gat : spec.gats()) {
        std::optional<std::string> value;
        for (const auto& path : gat.paths) {
            value = resolve_path(document, path);
            if (value) break;
        }
        out.push_back({bill_id, gat.name, std::move(value)});
    }
    return out;
}

std::string make_bill_id(const fs::path& root, const fs::path& file)
{
    fs::path rel = file.lexically_relative(root);
    if (rel.empty()) rel = file;
    std::string ext = rel.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    rel.replace_extension(ext);
    return rel.generic_string();
}

void sort_observations(std::vector<Observation>& observations)
{
    std::sort(observations.begin(), observations.end(), [](const Observation& a, const Observation& b) {
        if (a.bill_id != b.bill_id) return a.bill_id < b.bill_id;
        return a.gat < b.gat;
    });
}

ExtractionResult extract_corpus(const fs::path& root, const MappingSpec& spec, unsigned workers)
{
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw IoError("corpus root '" + root.string() + "' is not a readable directory");

    struct Item
    {
        std::string bill_id;
        fs::path file;
    };
    std::vector<Item> items;
    try {
        for (const auto& entry : fs::recursive_directory_iterator(root)) {
            if (!entry.is_regular_file() || !has_json_extension(entry.path())) continue;
            items.push_back({make_bill_id(root, entry.path()), entry.path()});
        }
    } catch (const fs::filesystem_error& e) {
        throw IoError(std::string("cannot walk corpus: ") + e.what());
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.bill_id < b.bill_id; });

    struct Slot
    {
        std::vector<Observation> observations;
        std::optional<std::string> failure;
    };
    std::vector<Slot> slots(items.size());
    parallel_for(items.size(), workers, [&](std::size_t i) {
        if (i > 0 && items[i].bill_id == items[i - 1].bill_id) {
            slots[i].failure = "duplicate bill id after extension normalization";
            return;
        }
        try {
            const json doc = parse_document(read_file(items[i].file));
            slots[i].observations = extract_bill(items[i].bill_id, doc, spec);
        } catch (const Error& e) {
            slots[i].failure = e.what();
        }
    });

    ExtractionResult result;
    auto& report = result.report;
    report.files_seen = items.size();
    for (const auto& gat : spec.gats()) report.null_counts[gat.name] = 0;
    std::size_t total = 0;
    for (const auto& slot : slots) total += slot.observations.size();
    result.observations.reserve(total);
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].failure) {
            ++report.files_failed;
            report.failures.emplace_back(items[i].bill_id, *slots[i].failure);
            continue;
        }
        for (auto& obs : slots[i].observations) {
            if (!obs.raw_value) ++report.null_counts[obs.gat];
            result.observations.push_back(std::move(obs));
        }
    }
    sort_observations(result.observations);
    return result;
}

nlohmann::json ExtractionReport::to_json() const
{
    json failures_json = json::array();
    for (const auto& [bill_id, reason] : failures) failures_json.push_back({{"bill_id", bill_id}, {"reason", reason}});
    return {
        {"files_seen", files_seen},
        {"files_succeeded", files_seen - files_failed},
        {"files_failed", files_failed},
        {"failures", std::move(failures_json)},
        {"null_counts", null_counts},
    };
}

void write_observations_csv(std::ostream& out, const std::vector<Observation>& observations)
{
    csv::write_header(out, observations_header);
    for (const auto& obs : observations) {
        csv::write_field(out, std::string_view(obs.bill_id));
        out.put(',');
        csv::write_field(out, std::string_view(obs.gat));
        out.put(',');
        if (obs.raw_value) csv::write_field(out, std::string_view(*obs.raw_value));
        out.put('\n');
    }
}

std::vector<Observation> read_observations_csv(std::istream& in)
{
    csv::Reader reader(in);
    csv::expect_header(reader, observations_header, "observations");
    std::vector<Observation> out;
    csv::Row row;
    while (reader.next(row)) {
        if (row.size() != 3 || !row[0] || !row[1])
            throw ParseError("observations: malformed row", reader.line());
        out.push_back({std::move(*row[0]), std::move(*row[1]), std::move(row[2])});
    }
    return out;
}

}  // namespace billprep
