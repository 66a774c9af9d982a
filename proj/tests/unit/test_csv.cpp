#include "billprep/csv.hpp"
#include "billprep/error.hpp"

#include "doctest.h"

#include <sstream>

using namespace billprep;

TEST_CASE("null and empty string survive a round trip")
{
    std::ostringstream out;
    const csv::Row row{std::nullopt, std::string(), std::string("x")};
    csv::write_row(out, row);
    CHECK(out.str() == ",\"\",x\n");

    std::istringstream in(out.str());
    csv::Reader reader(in);
    csv::Row back;
    REQUIRE(reader.next(back));
    CHECK(back == row);
    CHECK_FALSE(reader.next(back));
}

TEST_CASE("quoting of separators, quotes and newlines")
{
    const csv::Row row{std::string("a,b"), std::string("say \"hi\""), std::string("two\nlines"), std::string("plain")};
    std::ostringstream out;
    csv::write_row(out, row);
    CHECK(out.str() == "\"a,b\",\"say \"\"hi\"\"\",\"two\nlines\",plain\n");

    std::istringstream in(out.str() + "next,row\n");
    csv::Reader reader(in);
    csv::Row back;
    REQUIRE(reader.next(back));
    CHECK(back == row);
    CHECK(reader.line() == 1);
    REQUIRE(reader.next(back));
    CHECK(reader.line() == 3);
    CHECK(back == csv::Row{std::string("next"), std::string("row")});
}

TEST_CASE("CRLF line endings are accepted")
{
    std::istringstream in("a,b\r\n1,\r\n");
    const auto rows = csv::read_all(in);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1] == csv::Row{std::string("1"), std::nullopt});
}

TEST_CASE("unterminated quote is a parse error")
{
    std::istringstream in("\"open,field\n");
    csv::Reader reader(in);
    csv::Row row;
    CHECK_THROWS_AS(reader.next(row), ParseError);
}

TEST_CASE("header mismatch is reported")
{
    const std::vector<std::string> expected = {"a", "b"};
    std::istringstream good("a,b\n");
    csv::Reader r1(good);
    CHECK_NOTHROW(csv::expect_header(r1, expected, "test"));
    std::istringstream bad("a,c\n");
    csv::Reader r2(bad);
    CHECK_THROWS_AS(csv::expect_header(r2, expected, "test"), ParseError);
}
