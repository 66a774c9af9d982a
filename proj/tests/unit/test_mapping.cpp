#include "billprep/error.hpp"
#include "billprep/mapping.hpp"

#include "doctest.h"
#include "test_support.hpp"

using namespace billprep;
using billprep::testing::small_spec;

namespace {
std::string with_header(const std::string& body) { return std::string(mapping_header) + "\n" + body; }
}  // namespace

TEST_CASE("a lone attribute row parses its path but fails validation")
{
    const std::string text = with_header("total_amount;doc.summary.total;decimal;bill;attribute\n");
    try {
        parse_mapping_file(text);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("bill_date") != std::string::npos);
    }
    // The same row inside a complete mapping.
    const auto spec = small_spec("total_amount;doc.summary.total;decimal;bill;attribute\n");
    const auto* g = spec.find("total_amount");
    REQUIRE(g);
    REQUIRE(g->paths.size() == 1);
    CHECK(g->paths[0].steps.size() == 3);
    CHECK(g->output_type == OutputType::decimal);
}

TEST_CASE("header only is rejected")
{
    CHECK_THROWS_AS(parse_mapping_file(with_header("")), ValidationError);
}

TEST_CASE("fallback paths keep their order")
{
    const auto spec = small_spec("x;a.b|c[0].d;text;bill;attribute\n");
    const auto* g = spec.find("x");
    REQUIRE(g);
    REQUIRE(g->paths.size() == 2);
    CHECK(g->paths[0].to_string() == "a.b");
    CHECK(g->paths[1].steps[1] == PathStep::make_index(0));
}

TEST_CASE("structural and invariant errors")
{
    SUBCASE("wrong column count carries the line number")
    {
        try {
            parse_mapping_file(with_header("date;d;date;bill\n"));
            FAIL("expected parse error");
        } catch (const ParseError& e) {
            CHECK(e.line == 2);
        }
    }
    SUBCASE("wrong header") { CHECK_THROWS_AS(parse_mapping_file("name,paths\n"), ParseError); }
    SUBCASE("duplicate name") { CHECK_THROWS_AS(small_spec("pod;q;text;pod;attribute\n"), ValidationError); }
    SUBCASE("unknown tokens")
    {
        CHECK_THROWS_AS(small_spec("x;a;money;bill;attribute\n"), ValidationError);
        CHECK_THROWS_AS(small_spec("x;a;text;shop;attribute\n"), ValidationError);
        CHECK_THROWS_AS(small_spec("x;a;text;bill;boss\n"), ValidationError);
    }
    SUBCASE("second bill date") { CHECK_THROWS_AS(small_spec("d2;e;date;bill;bill_date\n"), ValidationError); }
    SUBCASE("second POD identifier") { CHECK_THROWS_AS(small_spec("p2;q;text;pod;identifier\n"), ValidationError); }
    SUBCASE("age must be a user integer")
    {
        CHECK_THROWS_AS(small_spec("age;a;text;user;age\n"), ValidationError);
        CHECK_THROWS_AS(small_spec("age;a;integer;bill;age\n"), ValidationError);
        CHECK_NOTHROW(small_spec("age;a;integer;user;age\n"));
    }
    SUBCASE("offer must be a bill GAT") { CHECK_THROWS_AS(small_spec("o;a;text;pod;offer\n"), ValidationError); }
    SUBCASE("reserved column names") { CHECK_THROWS_AS(small_spec("year_of_birth;a;integer;user;attribute\n"), ValidationError); }
    SUBCASE("bad path") { CHECK_THROWS_AS(small_spec("x;a..b;text;bill;attribute\n"), ParseError); }
}

TEST_CASE("comments, blank lines and BOM are ignored")
{
    const std::string text = "\xEF\xBB\xBF" + with_header("# comment\n\ndate;d;date;bill;bill_date\n"
                                                           "pod;p;text;pod;identifier\n"
                                                           "user;u;text;user;identifier\n");
    const auto spec = parse_mapping_file(text);
    CHECK(spec.gats().size() == 3);
    CHECK(spec.bill_date_index() == 0);
    CHECK(spec.pod_id_index() == 1);
    CHECK(spec.user_id_index() == 2);
}

TEST_CASE("serialize then parse is the identity")
{
    const auto spec = small_spec("amount;s.t|lines[*].v;decimal;bill;attribute\n"
                                 "offer;o.code;text;bill;offer\n"
                                 "age;c.age;integer;user;age\n"
                                 "holder;c.h;hashed_text;user;attribute\n"
                                 "town;s.addr[0].town;text;pod;attribute\n");
    const auto text = serialize_mapping_file(spec);
    CHECK(parse_mapping_file(text) == spec);
    CHECK(serialize_mapping_file(parse_mapping_file(text)) == text);
}

TEST_CASE("attribute indices exclude identifiers and age")
{
    const auto spec = small_spec("age;c.age;integer;user;age\n"
                                 "sex;c.sex;text;user;attribute\n"
                                 "town;s.town;text;pod;attribute\n");
    CHECK(spec.attribute_indices(Entity::user) == std::vector<std::size_t>{4});
    CHECK(spec.attribute_indices(Entity::pod) == std::vector<std::size_t>{5});
    CHECK(spec.attribute_indices(Entity::bill) == std::vector<std::size_t>{0});
}

TEST_CASE("missing mapping file is an I/O error")
{
    CHECK_THROWS_AS(load_mapping_file("/nonexistent/mapping.csv"), IoError);
}
