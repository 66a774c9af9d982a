#include "billprep/clean.hpp"
#include "billprep/error.hpp"
#include "billprep/synthgen.hpp"

#include "doctest.h"
#include "test_support.hpp"

#include <sstream>

using namespace billprep;
using billprep::testing::read_file;
using billprep::testing::TempDir;

namespace {

std::string digest(const std::filesystem::path& root)
{
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(root))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::string all;
    for (const auto& f : files) all += std::filesystem::relative(f, root).generic_string() + "\n" + read_file(f);
    return hash_value(all, "");
}

}  // namespace

TEST_CASE("minimal corpus: one user, one POD, one bill")
{
    SynthConfig c;
    c.users = 1;
    c.min_pods_per_user = c.max_pods_per_user = 1;
    c.months = 1;
    c.late_start_probability = 0;
    c.seed = 4;
    TempDir dir;
    const auto truth = generate_corpus(c, dir.path());
    CHECK(truth.bill_count == 1);
    CHECK(truth.tables.bills.size() == 1);
    CHECK(truth.tables.pods.size() == 1);
    CHECK(truth.tables.users.size() == 1);
    CHECK(truth.features.vectors.size() == 1);
    CHECK(truth.features.vectors[0].churn == 0);
    CHECK(std::filesystem::exists(dir / "mapping.csv"));
    CHECK(std::filesystem::exists(dir / "truth/features.csv"));
    CHECK(load_mapping_file((dir / "mapping.csv").string()) == default_mapping_spec());
}

TEST_CASE("equal configs give identical corpora")
{
    SynthConfig c;
    c.users = 15;
    c.seed = 77;
    c.salt = "s";
    TempDir a, b;
    generate_corpus(c, a.path());
    generate_corpus(c, b.path());
    CHECK(digest(a.path()) == digest(b.path()));
    c.seed = 78;
    TempDir d;
    generate_corpus(c, d.path());
    CHECK(digest(a.path()) != digest(d.path()));
}

TEST_CASE("simulation paths agree")
{
    SynthConfig c;
    c.users = 40;
    c.seed = 5;
    const auto sim = simulate_corpus(c);
    const auto fs = synthesize_feature_set(c);
    CHECK(sim.features.vectors == fs.vectors);
    CHECK(sim.features.offer == fs.offer);
    TempDir dir;
    CHECK(generate_corpus(c, dir.path()).tables == sim.tables);
}

TEST_CASE("churn prevalence is close to the target")
{
    SynthConfig c;
    c.users = 5000;  // about 10^4 PODs
    c.seed = 19;
    const auto set = synthesize_feature_set(c);
    std::size_t pos = 0;
    for (const auto& v : set.vectors) pos += v.churn;
    const double prevalence = static_cast<double>(pos) / static_cast<double>(set.vectors.size());
    CHECK(prevalence == doctest::Approx(c.churn_prevalence).epsilon(0.004 / c.churn_prevalence));
}

TEST_CASE("default mapping is valid and complete")
{
    for (auto loc : {MonthLocale::english, MonthLocale::italian}) {
        const auto spec = default_mapping_spec(loc);
        CHECK(spec.gats().size() == 13);
        CHECK(spec.offer_index().has_value());
        CHECK(spec.age_index().has_value());
        CHECK(parse_mapping_file(serialize_mapping_file(spec), loc) == spec);
    }
    std::string text = serialize_mapping_file(default_mapping_spec());
    std::istringstream in(text);
    std::string line, without_date;
    while (std::getline(in, line))
        if (line.find("bill_date") == std::string::npos) without_date += line + "\n";
    CHECK_THROWS_AS(parse_mapping_file(without_date), ValidationError);
}

TEST_CASE("config validation and JSON")
{
    SynthConfig c;
    CHECK(SynthConfig::from_json(c.to_json()).to_json() == c.to_json());
    auto j = c.to_json();
    j["bogus"] = 1;
    CHECK_THROWS_AS(SynthConfig::from_json(j), ValidationError);
    c.min_pods_per_user = 4;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = {};
    c.churn_prevalence = 0.7;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}
