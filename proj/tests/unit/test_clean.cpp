#include "billprep/clean.hpp"

#include "doctest.h"
#include "test_support.hpp"

#include <random>
#include <set>
#include <sstream>

using namespace billprep;
using namespace std::chrono;

TEST_CASE("clean_decimal spec examples")
{
    CHECK(clean_decimal("1.000,00 \xE2\x82\xAC") == Decimal{100000});
    CHECK(clean_decimal("0,00 kWh") == Decimal{0});
    CHECK(clean_decimal("-12.345,67 \xE2\x82\xAC") == Decimal{-1234567});
}

TEST_CASE("clean_decimal rounds half away from zero")
{
    CHECK(clean_decimal("0,005") == Decimal{1});
    CHECK(clean_decimal("0,004") == Decimal{0});
    CHECK(clean_decimal("-0,005") == Decimal{-1});
    CHECK(clean_decimal("2,675") == Decimal{268});
    CHECK(clean_decimal("9,999") == Decimal{1000});
}

TEST_CASE("clean_decimal is idempotent on rendered output")
{
    std::mt19937_64 gen(3);
    for (int i = 0; i < 2000; ++i) {
        const Decimal d{static_cast<std::int64_t>(gen() % 2000000000) - 1000000000};
        CAPTURE(d.to_string());
        CHECK(clean_decimal(d.to_string()) == d);
    }
}

TEST_CASE("clean_decimal rejections")
{
    for (const char* bad : {"", "abc", "1,2,3", "1..0", "12a3", "\xE2\x82\xAC", "1.2.3,4", "--1", "1 2"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(clean_decimal(bad), CleanFailure);
    }
}

TEST_CASE("clean_integer examples")
{
    CHECK(clean_integer("21") == 21);
    CHECK(clean_integer("1.234") == 1234);
    CHECK_THROWS_AS(clean_integer("21,5"), CleanFailure);
    CHECK(clean_integer(" 61 days") == 61);
    CHECK(clean_integer("-7") == -7);
    CHECK_THROWS_AS(clean_integer("12345678901234567"), CleanFailure);
}

TEST_CASE("clean_date examples")
{
    CHECK(clean_date("10 January 2021", MonthLocale::english) == year_month_day{2021y, January, 10d});
    CHECK_THROWS_AS(clean_date("29 February 2021", MonthLocale::english), CleanFailure);
    CHECK(clean_date("29 february 2020", MonthLocale::english) == year_month_day{2020y, February, 29d});
    CHECK(clean_date("1 gennaio 2021", MonthLocale::italian) == year_month_day{2021y, January, 1d});
    CHECK_THROWS_AS(clean_date("1 gennaio 2021", MonthLocale::english), CleanFailure);
    CHECK_THROWS_AS(clean_date("x March 2021", MonthLocale::english), CleanFailure);
    CHECK_THROWS_AS(clean_date("10 March", MonthLocale::english), CleanFailure);
}

TEST_CASE("render then clean is the identity for both locales")
{
    const sys_days start = year_month_day{1999y, January, 1d};
    for (int i = 0; i < 9000; i += 7) {
        const year_month_day d{start + days{i}};
        for (auto loc : {MonthLocale::english, MonthLocale::italian}) {
            const auto text = render_display_date(d, loc);
            CAPTURE(text);
            CHECK(clean_date(text, loc) == d);
        }
    }
}

TEST_CASE("hash_value properties")
{
    const auto a = hash_value("alice", "s");
    CHECK(a == hash_value("alice", "s"));
    CHECK(a != hash_value("bob", "s"));
    CHECK(a.size() == hash_hex_length);
    CHECK(a.find_first_not_of("0123456789abcdef") == std::string::npos);
    // SHA-256("abc"), FIPS 180-2 test vector.
    CHECK(hash_value("bc", "a") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");

    std::mt19937_64 gen(11);
    std::set<std::string> seen;
    for (int i = 0; i < 10000; ++i) {
        const std::string x = std::to_string(gen());
        const auto h1 = hash_value(x, "salt-one");
        const auto h2 = hash_value(x, "salt-two");
        CHECK(h1 != h2);
        seen.insert(h1);
        seen.insert(h2);
    }
    CHECK(seen.size() == 20000);
}

TEST_CASE("clean_observation dispatch")
{
    GatDefinition g;
    g.name = "g";
    const Observation null_obs{"b", "g", std::nullopt};
    for (auto t : {OutputType::decimal, OutputType::integer, OutputType::date, OutputType::text, OutputType::hashed_text}) {
        g.output_type = t;
        CHECK(std::get<CleanValue>(clean_observation(null_obs, g, "", MonthLocale::english)).is_null());
    }
    g.output_type = OutputType::decimal;
    CHECK(std::get<CleanValue>(clean_observation({"b", "g", "1.000,00 \xE2\x82\xAC"}, g, "", MonthLocale::english)) ==
          CleanValue::make_decimal(Decimal{100000}));
    g.output_type = OutputType::date;
    CHECK(std::get<CleanValue>(clean_observation({"b", "g", "10 January 2021"}, g, "", MonthLocale::english)) ==
          CleanValue::make_date(year_month_day{2021y, January, 10d}));
    g.output_type = OutputType::hashed_text;
    CHECK(std::get<CleanValue>(clean_observation({"b", "g", "  Ada "}, g, "s", MonthLocale::english)) ==
          CleanValue::make_hashed(hash_value("Ada", "s")));
    g.output_type = OutputType::integer;
    const auto err = std::get<CleanError>(clean_observation({"b", "g", "2,5"}, g, "", MonthLocale::english));
    CHECK(err.bill_id == "b");
    CHECK(err.raw_value == "2,5");
    CHECK_FALSE(err.reason.empty());
}

TEST_CASE("clean_observation is total on random strings")
{
    std::mt19937_64 gen(5);
    const std::string alphabet = "0123456789.,-+ \t\xE2\x82\xAC$abkWhJanuary\xC2\xA0";
    GatDefinition g;
    g.name = "g";
    for (int i = 0; i < 20000; ++i) {
        std::string raw;
        const auto len = gen() % 24;
        for (std::size_t k = 0; k < len; ++k) raw += alphabet[gen() % alphabet.size()];
        for (auto t : {OutputType::decimal, OutputType::integer, OutputType::date, OutputType::text}) {
            g.output_type = t;
            CHECK_NOTHROW(clean_observation({"b", "g", raw}, g, "", MonthLocale::english));
        }
    }
}

TEST_CASE("canonical parsing inverts render")
{
    const std::vector<CleanValue> values = {CleanValue{},
                                            CleanValue::make_decimal(Decimal{-5}),
                                            CleanValue::make_decimal(Decimal{123456}),
                                            CleanValue::make_integer(-42),
                                            CleanValue::make_date(year_month_day{2024y, February, 29d}),
                                            CleanValue::make_text(""),
                                            CleanValue::make_text("a,b"),
                                            CleanValue::make_hashed(hash_value("x", ""))};
    for (const auto& v : values) CHECK(parse_canonical(v.tag(), v.render()) == v);
    CHECK_THROWS_AS(parse_canonical(ValueTag::date, std::string("2021-02-30")), ParseError);
    CHECK_THROWS_AS(parse_canonical(ValueTag::decimal, std::string("1.5")), ParseError);
}

TEST_CASE("clean_observations keeps order, nulls failures and is worker independent")
{
    const auto spec = billprep::testing::small_spec("n;n;integer;bill;attribute\n");
    std::vector<Observation> obs;
    for (int i = 0; i < 10000; ++i) obs.push_back({"b" + std::to_string(i), "n", i % 97 ? std::to_string(i) : "x"});
    const auto one = clean_observations(obs, spec, "", 1);
    const auto four = clean_observations(obs, spec, "", 4);
    CHECK(one.rows == four.rows);
    CHECK(one.errors == four.errors);
    CHECK(one.rows.size() == obs.size());
    CHECK(one.errors.size() == 104);
    CHECK(one.rows[0].value.is_null());
    CHECK(one.rows[1].value == CleanValue::make_integer(1));

    std::ostringstream out;
    write_cleaned_csv(out, one.rows);
    std::istringstream in(out.str());
    CHECK(read_cleaned_csv(in) == one.rows);

    obs.push_back({"b", "unknown", "1"});
    CHECK_THROWS_AS(clean_observations(obs, spec, ""), ValidationError);
}
