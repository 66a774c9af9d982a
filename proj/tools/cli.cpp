#include "cli.hpp"

#include "billprep/analytics/features.hpp"
#include "billprep/analytics/stats.hpp"
#include "billprep/clean.hpp"
#include "billprep/extract.hpp"
#include "billprep/fuse.hpp"
#include "billprep/io.hpp"
#include "billprep/parallel.hpp"
#include "billprep/synthgen.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <set>
#include <vector>

namespace billprep::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Stage outputs are written as <name>.partial and renamed together on commit;
// anything not committed is removed.
class OutputSet
{
public:
    explicit OutputSet(fs::path dir)
        : dir_(std::move(dir))
    {
    }
    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;

    ~OutputSet()
    {
        std::error_code ec;
        for (const auto& name : names_) fs::remove(partial(name), ec);
    }

    void add(const std::string& name, const std::function<void(std::ostream&)>& fill)
    {
        names_.push_back(name);
        std::ofstream out(partial(name), std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot create '" + partial(name).string() + "'");
        fill(out);
        out.flush();
        if (!out) throw IoError("write failed on '" + partial(name).string() + "'");
    }

    void add_text(const std::string& name, const std::string& text)
    {
        add(name, [&](std::ostream& o) { o << text; });
    }

    void commit()
    {
        for (const auto& name : names_) fs::rename(partial(name), dir_ / name);
        names_.clear();
    }

private:
    fs::path partial(const std::string& name) const { return dir_ / (name + ".partial"); }

    fs::path dir_;
    std::vector<std::string> names_;
};

std::ifstream open_input(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return in;
}

json load_json_file(const fs::path& path)
{
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("'" + path.string() + "': " + e.what());
    }
}

MonthLocale locale_from(const std::string& s)
{
    const auto l = parse_month_locale(s);
    if (!l) throw ValidationError("locale must be 'english' or 'italian', got '" + s + "'");
    return *l;
}

fs::path resolve(const fs::path& base, const std::string& p) { return p.empty() ? fs::path() : base / p; }

struct Context
{
    const PipelineConfig& config;
    const MappingSpec* spec = nullptr;

    fs::path file(const char* name) const { return config.out / name; }
};

using Stage = json (*)(const Context&);

json stage_extract(const Context& ctx)
{
    auto result = extract_corpus(ctx.config.corpus, *ctx.spec, ctx.config.workers);
    OutputSet outputs(ctx.config.out);
    outputs.add("observations.csv", [&](std::ostream& o) { write_observations_csv(o, result.observations); });
    outputs.add_text("extract_report.json", result.report.to_json().dump(2) + "\n");
    outputs.commit();
    return {{"files_seen", result.report.files_seen},
            {"files_failed", result.report.files_failed},
            {"observations", result.observations.size()}};
}

json stage_clean(const Context& ctx)
{
    auto in = open_input(ctx.file("observations.csv"));
    const auto observations = read_observations_csv(in);
    const auto result = clean_observations(observations, *ctx.spec, ctx.config.salt, ctx.config.workers);
    OutputSet outputs(ctx.config.out);
    outputs.add("cleaned.csv", [&](std::ostream& o) { write_cleaned_csv(o, result.rows); });
    outputs.add("clean_errors.csv", [&](std::ostream& o) { write_clean_errors_csv(o, result.errors); });
    outputs.commit();
    return {{"cells", result.rows.size()}, {"clean_errors", result.errors.size()}};
}

json stage_fuse(const Context& ctx)
{
    auto in = open_input(ctx.file("cleaned.csv"));
    const auto cleaned = read_cleaned_csv(in);
    const auto result = fuse(cleaned, *ctx.spec, ctx.config.workers);
    const auto& t = result.tables;
    const auto& spec = *ctx.spec;
    OutputSet outputs(ctx.config.out);
    outputs.add("bills.csv", [&](std::ostream& o) { write_bills_csv(o, t, spec); });
    outputs.add("pods.csv", [&](std::ostream& o) { write_pods_csv(o, t, spec); });
    outputs.add("users.csv", [&](std::ostream& o) { write_users_csv(o, t, spec); });
    outputs.add("quarantine.csv", [&](std::ostream& o) { write_quarantine_csv(o, result.quarantine); });
    if (ctx.config.sql_dump) outputs.add("tables.sql", [&](std::ostream& o) { write_sql_dump(o, t, spec); });
    outputs.commit();
    return {{"bills", t.bills.size()},
            {"pods", t.pods.size()},
            {"users", t.users.size()},
            {"quarantine", result.quarantine.size()},
            {"normalized_cells", normalized_cell_count(t)},
            {"wide_cells", wide_cell_count(t.bills.size(), spec)}};
}

json stage_features(const Context& ctx)
{
    const auto tables = read_tables(ctx.config.out, *ctx.spec);
    const auto set = analytics::build_feature_vectors(tables, *ctx.spec);
    OutputSet outputs(ctx.config.out);
    outputs.add("features.csv", [&](std::ostream& o) { analytics::write_features_csv(o, set.vectors); });
    outputs.add_text("encodings.json", analytics::encodings_to_json(set).dump(2) + "\n");
    outputs.add("feature_ledger.csv", [&](std::ostream& o) { write_quarantine_csv(o, set.ledger); });
    outputs.commit();
    std::size_t positives = 0;
    for (const auto& v : set.vectors) positives += static_cast<std::size_t>(v.churn);
    return {{"vectors", set.vectors.size()}, {"positives", positives}, {"ledger", set.ledger.size()}};
}

analytics::Dataset load_dataset(const Context& ctx)
{
    auto in = open_input(ctx.file("features.csv"));
    return analytics::to_dataset(analytics::read_features_csv(in));
}

json stage_correlate(const Context& ctx)
{
    const auto report = analytics::correlation_report(load_dataset(ctx));
    OutputSet outputs(ctx.config.out);
    outputs.add("correlations.csv", [&](std::ostream& o) { analytics::write_correlations_csv(o, report); });
    outputs.commit();
    std::size_t undefined = 0;
    for (const auto& e : report) undefined += e.r ? 0 : 1;
    return {{"features", report.size()}, {"undefined", undefined}};
}

json stage_evaluate(const Context& ctx)
{
    auto params = ctx.config.analytics;
    params.seed = *ctx.config.seed;
    const auto result = analytics::cross_validate(load_dataset(ctx), params, ctx.config.workers);
    json metrics = result.to_json();
    metrics["model"] = std::string(analytics::to_string(params.train.kind));
    metrics["stratified"] = params.stratified;
    metrics["undersample_ratio"] = params.undersample_ratio ? json(*params.undersample_ratio) : json(nullptr);
    metrics["seed"] = params.seed;
    OutputSet outputs(ctx.config.out);
    outputs.add_text("metrics.json", metrics.dump(2) + "\n");
    outputs.commit();
    return {{"accuracy", result.pooled.accuracy}, {"recall_churn", result.pooled.classes[1].recall}};
}

json stage_train(const Context& ctx)
{
    auto params = ctx.config.analytics.train;
    params.forest.seed = *ctx.config.seed;
    const auto data = load_dataset(ctx);
    const auto model = analytics::train_classifier(data, params, ctx.config.workers);
    OutputSet outputs(ctx.config.out);
    outputs.add_text("model.json", model.to_json().dump() + "\n");
    outputs.commit();
    return {{"rows", data.rows}, {"model", std::string(analytics::to_string(params.kind))}};
}


struct Command
{
    const char* name;
    const char* help;
    Stage stage;
    bool needs_corpus;
    bool needs_mapping;
    bool needs_seed;
    std::vector<const char*> inputs;  // files expected in the output directory
};

const std::vector<Command>& commands()
{
    static const std::vector<Command> list = {
        {"extract", "Extract GAT observations from a JSON bill corpus", stage_extract, true, true, false, {}},
        {"clean", "Clean observations into typed values", stage_clean, false, true, false, {"observations.csv"}},
        {"fuse", "Pivot, fuse and normalize into bill/POD/user tables", stage_fuse, false, true, false,
         {"cleaned.csv"}},
        {"features", "Build per-(POD, offer) feature vectors", stage_features, false, true, false,
         {"bills.csv", "pods.csv", "users.csv"}},
        {"correlate", "Pearson correlation of each feature with churn", stage_correlate, false, false, false,
         {"features.csv"}},
        {"evaluate", "Cross-validate a classifier on the feature vectors", stage_evaluate, false, false, true,
         {"features.csv"}},
        {"train", "Train a classifier on all feature vectors", stage_train, false, false, true, {"features.csv"}},
    };
    return list;
}

const Command& command(std::string_view name)
{
    for (const auto& c : commands())
        if (name == c.name) return c;
    throw ValidationError("unknown command '" + std::string(name) + "'");
}

struct Flags
{
    std::string config, out, salt, locale, corpus, mapping, model;
    unsigned workers = 1;
    std::uint64_t seed = 0;
    bool sql_dump = false;
    std::size_t folds = 5;
    double undersample = 1.0;
    std::size_t users = 0;
};

void add_common_flags(CLI::App* sub, Flags& f)
{
    sub->add_option("--config", f.config, "JSON config file");
    sub->add_option("--out", f.out, "Output directory for stage files");
    sub->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", f.seed, "Master seed");
    sub->add_option("--salt", f.salt, "Salt for hashed_text values");
    sub->add_option("--locale", f.locale, "Month-name locale")->check(CLI::IsMember({"english", "italian"}));
}

void add_pipeline_flags(CLI::App* sub, Flags& f)
{
    add_common_flags(sub, f);
    sub->add_flag("--sql-dump", f.sql_dump, "Also write tables.sql");
    sub->add_option("--corpus", f.corpus, "Corpus root directory");
    sub->add_option("--mapping", f.mapping, "Mapping file");
    sub->add_option("--model", f.model, "random_forest, logistic_regression or majority")
        ->check(CLI::IsMember({"random_forest", "logistic_regression", "majority"}));
    sub->add_option("--folds", f.folds, "Cross-validation folds")->check(CLI::Range(2, 1000));
    sub->add_option("--undersample", f.undersample, "Majority:minority ratio for training folds")
        ->check(CLI::Range(1.0, 1e9));
}

PipelineConfig build_config(const Flags& f, const CLI::App& sub)
{
    PipelineConfig c;
    c.workers = default_workers();
    if (sub.count("--config")) {
        const fs::path path = f.config;
        if (!fs::is_regular_file(path)) throw ValidationError("config file '" + f.config + "' does not exist");
        c = PipelineConfig::from_json(load_json_file(path), path.parent_path());
    }
    if (sub.count("--out")) c.out = f.out;
    if (sub.count("--workers")) c.workers = f.workers;
    if (sub.count("--seed")) c.seed = f.seed;
    if (sub.count("--salt")) c.salt = f.salt;
    if (sub.count("--locale")) c.locale = locale_from(f.locale);
    if (sub.count("--sql-dump")) c.sql_dump = f.sql_dump;
    if (sub.count("--corpus")) c.corpus = f.corpus;
    if (sub.count("--mapping")) c.mapping = f.mapping;
    if (sub.count("--model")) c.analytics.train.kind = analytics::parse_model_kind(f.model);
    if (sub.count("--folds")) c.analytics.folds = f.folds;
    if (sub.count("--undersample")) c.analytics.undersample_ratio = f.undersample;
    return c;
}

void require_inputs(const Command& cmd, const PipelineConfig& c)
{
    if (cmd.needs_corpus) {
        if (c.corpus.empty()) throw ValidationError(std::string(cmd.name) + ": no corpus given");
        if (!fs::is_directory(c.corpus))
            throw ValidationError("corpus directory '" + c.corpus.string() + "' does not exist");
    }
    if (cmd.needs_mapping) {
        if (c.mapping.empty()) throw ValidationError(std::string(cmd.name) + ": no mapping file given");
        if (!fs::is_regular_file(c.mapping))
            throw ValidationError("mapping file '" + c.mapping.string() + "' does not exist");
    }
    if (cmd.needs_seed && !c.seed) throw ValidationError(std::string(cmd.name) + ": a seed is required");
    for (const char* name : cmd.inputs)
        if (!fs::is_regular_file(c.out / name))
            throw ValidationError(std::string(cmd.name) + ": missing input '" + (c.out / name).string() + "'");
}

std::vector<const Command*> pipeline_commands(const PipelineConfig& c)
{
    std::vector<const Command*> list = {&command("extract"), &command("clean"), &command("fuse")};
    const auto& s = c.stages;
    if ((s.correlate || s.evaluate || s.train) && !s.features)
        throw ValidationError("pipeline: analytics stages need the features stage");
    if (s.features) list.push_back(&command("features"));
    if (s.correlate) list.push_back(&command("correlate"));
    if (s.evaluate) list.push_back(&command("evaluate"));
    if (s.train) list.push_back(&command("train"));
    return list;
}

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const ParseError*>(&e)) return invalid;
    return fatal;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_report(const fs::path& dir, const json& report)
{
    write_file_atomically(dir / "report.json", [&](std::ostream& o) { o << report.dump(2) << '\n'; });
}

int run_stages(const std::string& name, const PipelineConfig& config, std::ostream& out, std::ostream& err)
{
    std::vector<const Command*> stages;
    MappingSpec spec;
    try {
        if (name == "pipeline") {
            stages = pipeline_commands(config);
            const Command& first = command("extract");
            require_inputs(first, config);
            if (config.stages.evaluate || config.stages.train)
                if (!config.seed) throw ValidationError("pipeline: a seed is required for analytics stages");
        } else {
            stages = {&command(name)};
            require_inputs(*stages.front(), config);
        }
        bool needs_mapping = false;
        for (const Command* c : stages) needs_mapping |= c->needs_mapping;
        if (needs_mapping) spec = load_mapping_file(config.mapping.string(), config.locale);
        std::error_code ec;
        fs::create_directories(config.out, ec);
        if (ec) throw IoError("cannot create output directory '" + config.out.string() + "': " + ec.message());
    } catch (const std::exception& e) {
        err << "billprep " << name << ": " << e.what() << '\n';
        return dynamic_cast<const IoError*>(&e) ? fatal : invalid;
    }

    json report = {{"command", name}, {"workers", config.workers}, {"config", config.to_json()}};
    report["stages"] = json::array();
    const Context ctx{config, &spec};
    const auto start = std::chrono::steady_clock::now();
    int code = ok;
    for (const Command* c : stages) {
        const auto stage_start = std::chrono::steady_clock::now();
        try {
            json counts = c->stage(ctx);
            const double secs = seconds_since(stage_start);
            out << c->name << ": " << counts.dump() << '\n';
            report["stages"].push_back({{"stage", c->name}, {"seconds", secs}, {"counts", std::move(counts)}});
        } catch (const std::exception& e) {
            code = exit_code_for(e);
            err << "billprep " << c->name << ": " << e.what() << '\n';
            report["stages"].push_back({{"stage", c->name}, {"seconds", seconds_since(stage_start)}, {"error", e.what()}});
            break;
        }
    }
    report["status"] = code == ok ? "ok" : "error";
    report["exit_code"] = code;
    report["seconds"] = seconds_since(start);
    try {
        write_report(config.out, report);
    } catch (const std::exception& e) {
        err << "billprep: cannot write report: " << e.what() << '\n';
        return fatal;
    }
    return code;
}

int run_synth(const Flags& f, const CLI::App& sub, std::ostream& out, std::ostream& err)
{
    SynthConfig config;
    fs::path dir = ".";
    try {
        if (sub.count("--config")) {
            if (!fs::is_regular_file(f.config))
                throw ValidationError("config file '" + f.config + "' does not exist");
            config = SynthConfig::from_json(load_json_file(f.config));
        }
        if (sub.count("--seed")) config.seed = f.seed;
        if (sub.count("--salt")) config.salt = f.salt;
        if (sub.count("--locale")) config.locale = locale_from(f.locale);
        if (sub.count("--users")) config.users = f.users;
        if (sub.count("--out")) dir = f.out;
        config.validate();
    } catch (const std::exception& e) {
        err << "billprep synth: " << e.what() << '\n';
        return invalid;
    }

    const auto start = std::chrono::steady_clock::now();
    json report = {{"command", "synth"}, {"config", config.to_json()}};
    int code = ok;
    try {
        const GroundTruth truth = generate_corpus(config, dir);
        std::size_t positives = 0;
        for (const auto& v : truth.features.vectors) positives += static_cast<std::size_t>(v.churn);
        const json counts = {{"bills", truth.bill_count},
                             {"pods", truth.tables.pods.size()},
                             {"users", truth.tables.users.size()},
                             {"vectors", truth.features.vectors.size()},
                             {"positives", positives}};
        out << "synth: " << counts.dump() << '\n';
        report["counts"] = counts;
    } catch (const std::exception& e) {
        code = exit_code_for(e);
        err << "billprep synth: " << e.what() << '\n';
        report["error"] = e.what();
    }
    report["status"] = code == ok ? "ok" : "error";
    report["exit_code"] = code;
    report["seconds"] = seconds_since(start);
    try {
        std::error_code ec;
        fs::create_directories(dir, ec);
        write_report(dir, report);
    } catch (const std::exception& e) {
        err << "billprep: cannot write report: " << e.what() << '\n';
        return fatal;
    }
    return code;
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j, const fs::path& base_dir)
{
    if (!j.is_object()) throw ParseError("config: expected a JSON object");
    static const std::set<std::string> known = {"corpus", "mapping",  "out",       "salt",  "locale",
                                                "workers", "seed",    "sql_dump",  "analytics", "stages"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw ValidationError("config: unknown key '" + key + "'");

    PipelineConfig c;
    c.workers = default_workers();
    try {
        c.corpus = resolve(base_dir, j.value("corpus", std::string()));
        c.mapping = resolve(base_dir, j.value("mapping", std::string()));
        if (j.contains("out")) c.out = resolve(base_dir, j.at("out").get<std::string>());
        c.salt = j.value("salt", c.salt);
        if (j.contains("locale")) c.locale = locale_from(j.at("locale").get<std::string>());
        c.workers = j.value("workers", c.workers);
        if (c.workers == 0) throw ValidationError("config: workers must be >= 1");
        if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
        c.sql_dump = j.value("sql_dump", c.sql_dump);

        if (j.contains("analytics")) {
            const auto& a = j.at("analytics");
            auto& p = c.analytics;
            if (a.contains("model")) p.train.kind = analytics::parse_model_kind(a.at("model").get<std::string>());
            p.folds = a.value("folds", p.folds);
            p.stratified = a.value("stratified", p.stratified);
            if (a.contains("undersample_ratio") && !a.at("undersample_ratio").is_null())
                p.undersample_ratio = a.at("undersample_ratio").get<double>();
            if (a.contains("forest")) p.train.forest = analytics::ForestParams::from_json(a.at("forest"));
            if (a.contains("logistic")) p.train.logistic = analytics::LogisticParams::from_json(a.at("logistic"));
        }
        if (j.contains("stages")) {
            const auto& s = j.at("stages");
            c.stages.features = s.value("features", c.stages.features);
            c.stages.correlate = s.value("correlate", c.stages.correlate);
            c.stages.evaluate = s.value("evaluate", c.stages.evaluate);
            c.stages.train = s.value("train", c.stages.train);
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    if (c.analytics.folds < 2) throw ValidationError("config: analytics.folds must be >= 2");
    if (c.analytics.undersample_ratio && !(*c.analytics.undersample_ratio >= 1.0))
        throw ValidationError("config: analytics.undersample_ratio must be >= 1");
    return c;
}

json PipelineConfig::to_json() const
{
    const auto& a = analytics;
    return {{"corpus", corpus.generic_string()},
            {"mapping", mapping.generic_string()},
            {"out", out.generic_string()},
            {"salt", salt},
            {"locale", std::string(billprep::to_string(locale))},
            {"workers", workers},
            {"seed", seed ? json(*seed) : json(nullptr)},
            {"sql_dump", sql_dump},
            {"analytics",
             {{"model", std::string(analytics::to_string(a.train.kind))},
              {"folds", a.folds},
              {"stratified", a.stratified},
              {"undersample_ratio", a.undersample_ratio ? json(*a.undersample_ratio) : json(nullptr)},
              {"forest", a.train.forest.to_json()},
              {"logistic", a.train.logistic.to_json()}}},
            {"stages",
             {{"features", stages.features},
              {"correlate", stages.correlate},
              {"evaluate", stages.evaluate},
              {"train", stages.train}}}};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Turn folders of JSON bills into clean relational tables and churn features."};
    app.name("billprep");
    app.require_subcommand(1, 1);

    Flags flags;
    std::vector<CLI::App*> subs;
    for (const auto& c : commands()) add_pipeline_flags(subs.emplace_back(app.add_subcommand(c.name, c.help)), flags);
    add_pipeline_flags(subs.emplace_back(app.add_subcommand("pipeline", "Run every stage end to end")), flags);
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
    add_common_flags(synth, flags);
    synth->add_option("--users", flags.users, "Number of users")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return ok;
        }
        err << "error: " << e.what() << "\n\n" << app.help();
        return invalid;
    }

    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "synth") return run_synth(flags, *sub, out, err);

    PipelineConfig config;
    try {
        config = build_config(flags, *sub);
    } catch (const std::exception& e) {
        err << "billprep " << name << ": " << e.what() << '\n';
        return invalid;
    }
    return run_stages(name, config, out, err);
}

}  // namespace billprep::cli
