#include "billprep/error.hpp"
#include "billprep/extract.hpp"

#include "doctest.h"
#include "test_support.hpp"

#include <sstream>

using namespace billprep;
using billprep::testing::small_spec;
using billprep::testing::TempDir;
using billprep::testing::write_file;

namespace {
std::optional<std::string> resolve(const std::string& doc, const std::string& path)
{
    return resolve_path(parse_document(doc), parse_json_path(path));
}
}  // namespace

TEST_CASE("resolve_path examples")
{
    CHECK(resolve(R"({"a":{"b":"x"}})", "a.b") == "x");
    CHECK(resolve(R"({"a":[{"v":1},{"v":2}]})", "a[*].v") == "1");
    CHECK(resolve(R"({"a":{}})", "a.b") == std::nullopt);
}

TEST_CASE("resolve_path leaf and step rules")
{
    CHECK(resolve(R"({"n":1.50})", "n") == "1.50");
    CHECK(resolve(R"({"n":-2e3})", "n") == "-2e3");
    CHECK(resolve(R"({"b":true})", "b") == "true");
    CHECK(resolve(R"({"z":null})", "z") == std::nullopt);
    CHECK(resolve(R"({"o":{"k":1}})", "o") == std::nullopt);
    CHECK(resolve(R"({"o":[1,2]})", "o") == std::nullopt);
    CHECK(resolve(R"({"o":[1,2]})", "o[1]") == "2");
    CHECK(resolve(R"({"o":[1,2]})", "o[2]") == std::nullopt);
    CHECK(resolve(R"({"o":"s"})", "o.k") == std::nullopt);
    CHECK(resolve(R"({"o":{"k":1}})", "o[0]") == std::nullopt);
    CHECK(resolve(R"({"a":[{"w":1},{"v":null},{"v":"third"}]})", "a[*].v") == "third");
    CHECK(resolve(R"({"a":[[1],[2,3]]})", "a[*][1]") == "3");
}

TEST_CASE("malformed documents raise ParseError")
{
    CHECK_THROWS_AS(parse_document("{\"a\":"), ParseError);
    CHECK_THROWS_AS(parse_document(""), ParseError);
}

TEST_CASE("extract_bill emits one observation per GAT with fallbacks")
{
    const auto spec = small_spec("x;a|b;text;bill;attribute\n");
    SUBCASE("missing GAT gives null")
    {
        const auto obs = extract_bill("f.json", parse_document(R"({"d":"1 May 2020","p":"P"})"), spec);
        REQUIRE(obs.size() == 4);
        CHECK(obs[0].gat == "date");
        CHECK(obs[1].raw_value == "P");
        CHECK(obs[2].raw_value == std::nullopt);
        CHECK(obs[3].raw_value == std::nullopt);
    }
    SUBCASE("only the second path resolves")
    {
        const auto obs = extract_bill("f.json", parse_document(R"({"a":null,"b":"second"})"), spec);
        CHECK(obs[3].raw_value == "second");
    }
    SUBCASE("first path wins")
    {
        const auto obs = extract_bill("f.json", parse_document(R"({"a":"first","b":"second"})"), spec);
        CHECK(obs[3].raw_value == "first");
    }
    SUBCASE("empty document")
    {
        for (const auto& o : extract_bill("f.json", parse_document("{}"), spec)) CHECK_FALSE(o.raw_value);
    }
}

TEST_CASE("extract_corpus counts, failures, ordering")
{
    TempDir dir;
    const auto spec = parse_mapping_file(std::string(mapping_header) +
                                         "\nd;d;date;bill;bill_date\n"
                                         "p;p;text;pod;identifier\n"
                                         "u;p;text;user;identifier\n");
    SUBCASE("2 folders x 2 files, 3 GATs")
    {
        for (const char* f : {"2021-02/b.json", "2021-02/a.json", "2021-01/z.JSON", "2021-01/y.json"})
            write_file(dir / f, R"({"d":"1 May 2020","p":"P"})");
        write_file(dir / "2021-01/notes.txt", "ignored");
        const auto r = extract_corpus(dir.path(), spec, 2);
        CHECK(r.report.files_seen == 4);
        CHECK(r.report.files_failed == 0);
        CHECK(r.observations.size() == 12);
        CHECK(r.observations.front().bill_id == "2021-01/y.json");
        CHECK(r.observations[3].bill_id == "2021-01/z.json");
        CHECK(std::is_sorted(r.observations.begin(), r.observations.end(), [](const auto& a, const auto& b) {
            return std::tie(a.bill_id, a.gat) < std::tie(b.bill_id, b.gat);
        }));
    }
    SUBCASE("malformed file is reported and skipped")
    {
        write_file(dir / "m/ok.json", R"({"p":"P"})");
        write_file(dir / "m/bad.json", R"({"p":)");
        const auto r = extract_corpus(dir.path(), spec);
        CHECK(r.report.files_seen == 2);
        CHECK(r.report.files_failed == 1);
        REQUIRE(r.report.failures.size() == 1);
        CHECK(r.report.failures[0].first == "m/bad.json");
        CHECK(r.observations.size() == 3);
        CHECK(r.report.null_counts.at("d") == 1);
        const auto j = r.report.to_json();
        CHECK(j["files_seen"] == 2);
    }
    SUBCASE("empty corpus")
    {
        const auto r = extract_corpus(dir.path(), spec);
        CHECK(r.observations.empty());
        CHECK(r.report.files_seen == 0);
    }
    SUBCASE("missing root") { CHECK_THROWS_AS(extract_corpus(dir / "nope", spec), IoError); }
}

TEST_CASE("worker count does not change the output")
{
    TempDir dir;
    const auto spec = small_spec("v;a[*].v;text;bill;attribute\n");
    for (int i = 0; i < 60; ++i)
        write_file(dir / ("m" + std::to_string(i % 7) + "/f" + std::to_string(i) + ".json"),
                   R"({"d":"1 May 2020","p":"P)" + std::to_string(i) + R"(","a":[{"v":)" + std::to_string(i) + "}]}");
    const auto one = extract_corpus(dir.path(), spec, 1);
    const auto four = extract_corpus(dir.path(), spec, 4);
    CHECK(one.observations == four.observations);
    std::ostringstream a, b;
    write_observations_csv(a, one.observations);
    write_observations_csv(b, four.observations);
    CHECK(a.str() == b.str());
}

TEST_CASE("observation CSV round trip")
{
    const std::vector<Observation> obs = {{"a/b.json", "g", std::nullopt},
                                          {"a/b.json", "h", std::string()},
                                          {"a/c.json", "g", std::string("1.000,00 \xE2\x82\xAC")},
                                          {"a/c.json", "h", std::string("quoted \"x\", y")}};
    std::ostringstream out;
    write_observations_csv(out, obs);
    std::istringstream in(out.str());
    CHECK(read_observations_csv(in) == obs);
}

TEST_CASE("bill ids are relative with a lowercase extension")
{
    CHECK(make_bill_id("/data/corpus", "/data/corpus/2021-01/X.JSON") == "2021-01/X.json");
}
