#include "cli.hpp"

#include "doctest.h"
#include "test_support.hpp"

#include "billprep/synthgen.hpp"

#include <sstream>

namespace fs = std::filesystem;
using billprep::testing::read_file;
using billprep::testing::TempDir;

namespace {

struct Result
{
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "billprep");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = billprep::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> listing(const fs::path& dir)
{
    std::vector<std::string> names;
    if (!fs::exists(dir)) return names;
    for (const auto& e : fs::directory_iterator(dir)) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
}

const std::vector<std::string> compared = {"observations.csv", "cleaned.csv", "clean_errors.csv", "bills.csv",
                                           "pods.csv",         "users.csv",   "quarantine.csv",   "features.csv",
                                           "encodings.json",   "correlations.csv", "extract_report.json"};

}  // namespace

TEST_CASE("usage errors exit 1")
{
    CHECK(run({"--bogus"}).code == 1);
    CHECK(run({"extract", "--nope"}).code == 1);
    CHECK(run({}).code == 1);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("missing inputs exit 1 without writing anything")
{
    TempDir dir;
    const auto out = dir / "out";
    auto r = run({"extract", "--corpus", dir.path().string(), "--mapping", (dir / "none.csv").string(), "--out",
                  out.string()});
    CHECK(r.code == 1);
    CHECK_FALSE(r.err.empty());
    CHECK(listing(out).empty());

    r = run({"clean", "--mapping", (dir / "none.csv").string(), "--out", out.string()});
    CHECK(r.code == 1);
    CHECK(listing(out).empty());

    billprep::testing::write_file(dir / "bad.csv", "not a mapping\n");
    r = run({"extract", "--corpus", dir.path().string(), "--mapping", (dir / "bad.csv").string(), "--out",
             out.string()});
    CHECK(r.code == 1);
    CHECK(listing(out).empty());
}

TEST_CASE("pipeline equals the composed subcommands and is repeatable")
{
    TempDir dir;
    const auto synth = dir / "synth";
    auto r = run({"synth", "--out", synth.string(), "--seed", "3", "--users", "30", "--salt", "pepper"});
    REQUIRE(r.code == 0);
    const std::vector<std::string> common = {"--corpus",  (synth / "corpus").string(),
                                             "--mapping", (synth / "mapping.csv").string(),
                                             "--salt",    "pepper",
                                             "--seed",    "9"};
    auto with = [&](std::vector<std::string> head, const fs::path& out) {
        head.insert(head.end(), common.begin(), common.end());
        head.insert(head.end(), {"--out", out.string()});
        return head;
    };

    const auto p1 = dir / "p1";
    const auto p2 = dir / "p2";
    r = run(with({"pipeline", "--folds", "2"}, p1));
    REQUIRE_MESSAGE(r.code == 0, r.err);
    r = run(with({"pipeline", "--folds", "2", "--workers", "3"}, p2));
    REQUIRE_MESSAGE(r.code == 0, r.err);

    const auto s = dir / "steps";
    for (const char* step : {"extract", "clean", "fuse", "features", "correlate"}) {
        r = run(with({step}, s));
        REQUIRE_MESSAGE(r.code == 0, r.err);
    }
    r = run(with({"evaluate", "--folds", "2"}, s));
    REQUIRE_MESSAGE(r.code == 0, r.err);
    r = run(with({"train"}, s));
    REQUIRE_MESSAGE(r.code == 0, r.err);

    for (const auto& f : compared) {
        CAPTURE(f);
        CHECK(read_file(p1 / f) == read_file(p2 / f));
        CHECK(read_file(p1 / f) == read_file(s / f));
    }
    CHECK(read_file(p1 / "model.json") == read_file(s / "model.json"));
    CHECK(read_file(p1 / "metrics.json") == read_file(s / "metrics.json"));
    for (const char* f : {"bills.csv", "pods.csv", "users.csv", "features.csv", "encodings.json"})
        CHECK(read_file(p1 / f) == read_file(synth / "truth" / f));

    const auto report = nlohmann::json::parse(read_file(p1 / "report.json"));
    CHECK(report["status"] == "ok");
    CHECK(report["exit_code"] == 0);
    CHECK(report["stages"].size() == 7);
    const auto& fuse = report["stages"][2];
    CHECK(fuse["stage"] == "fuse");
    CHECK(fuse["counts"]["bills"].get<std::size_t>() ==
          report["stages"][0]["counts"]["files_seen"].get<std::size_t>());
    for (const auto& name : listing(p1)) CHECK(name.find(".partial") == std::string::npos);
}

TEST_CASE("config file with relative paths")
{
    TempDir dir;
    REQUIRE(run({"synth", "--out", (dir / "s").string(), "--seed", "1", "--users", "5"}).code == 0);
    billprep::testing::write_file(dir / "cfg.json", R"({"corpus": "s/corpus", "mapping": "s/mapping.csv", "out": "o",
        "stages": {"correlate": false, "evaluate": false, "train": false}})");
    auto r = run({"pipeline", "--config", (dir / "cfg.json").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(fs::exists(dir / "o/features.csv"));
    CHECK_FALSE(fs::exists(dir / "o/model.json"));
    CHECK(read_file(dir / "o/users.csv") == read_file(dir / "s/truth/users.csv"));

    billprep::testing::write_file(dir / "bad.json", R"({"corpus": 1})");
    CHECK(run({"pipeline", "--config", (dir / "bad.json").string()}).code == 1);
    billprep::testing::write_file(dir / "broken.json", "{");
    CHECK(run({"pipeline", "--config", (dir / "broken.json").string()}).code == 1);
}
