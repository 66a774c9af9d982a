#include "billprep/error.hpp"
#include "billprep/json_path.hpp"

#include "doctest.h"

#include <random>

using namespace billprep;
using Kind = PathStep::Kind;

TEST_CASE("dotted keys")
{
    const auto p = parse_json_path("a.b.c");
    REQUIRE(p.steps.size() == 3);
    for (const auto& s : p.steps) CHECK(s.kind == Kind::key);
    CHECK(p.steps[2].key == "c");
}

TEST_CASE("wildcard and index steps")
{
    const auto p = parse_json_path("items[*].amount");
    REQUIRE(p.steps.size() == 3);
    CHECK(p.steps[0] == PathStep::make_key("items"));
    CHECK(p.steps[1].kind == Kind::wildcard);
    CHECK(p.steps[2] == PathStep::make_key("amount"));

    const auto q = parse_json_path("c[0].d");
    REQUIRE(q.steps.size() == 3);
    CHECK(q.steps[1] == PathStep::make_index(0));

    const auto nested = parse_json_path("m[1][2]");
    REQUIRE(nested.steps.size() == 3);
    CHECK(nested.steps[2] == PathStep::make_index(2));
}

TEST_CASE("malformed paths are rejected")
{
    for (const char* bad : {"", "a..b", ".a", "a.", "a[", "a[]", "a[-1]", "a[x]", "a[*].b[*]", "a]", "a[0]b",
                            "a|b", "a;b", "[0]"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_json_path(bad), ParseError);
    }
}

TEST_CASE("to_string round trips on generated valid paths")
{
    std::mt19937 gen(7);
    const char* keys[] = {"a", "items", "doc_2", "x-y"};
    for (int i = 0; i < 500; ++i) {
        std::string text;
        bool wildcard_used = false;
        const int segments = 1 + static_cast<int>(gen() % 4);
        for (int s = 0; s < segments; ++s) {
            if (s) text += '.';
            text += keys[gen() % 4];
            const int brackets = static_cast<int>(gen() % 3);
            for (int b = 0; b < brackets; ++b) {
                if (!wildcard_used && gen() % 3 == 0) {
                    text += "[*]";
                    wildcard_used = true;
                } else {
                    text += "[" + std::to_string(gen() % 20) + "]";
                }
            }
        }
        CAPTURE(text);
        const auto p = parse_json_path(text);
        CHECK(p.to_string() == text);
        CHECK(parse_json_path(p.to_string()) == p);
    }
}
