#include <doctest.h>

#include "contractcad/value.hpp"
#include "gen.hpp"

using namespace ccad;

TEST_CASE("decimal normalization") {
    CHECK(Decimal::parse("007.500")->str() == "7.5");
    CHECK(Decimal::parse("-0.00")->str() == "0");
    CHECK(Decimal::parse("+3")->str() == "3");
    CHECK_FALSE(Decimal::parse("12."));
    CHECK_FALSE(Decimal::parse(""));
    CHECK_FALSE(Decimal::parse("1e3"));
    CHECK_FALSE(Decimal::parse(".5"));
    CHECK_FALSE(Decimal::parse("1,5"));
}

TEST_CASE("decimal ordering agrees with scaled integers") {
    testing::Rng rng(7);
    auto make = [&](long long scaled) {
        const bool neg = scaled < 0;
        const long long mag = neg ? -scaled : scaled;
        std::string s = (neg ? "-" : "") + std::to_string(mag / 1000) + "." + std::to_string(1000 + mag % 1000).substr(1);
        return *Decimal::parse(s);
    };
    for (int i = 0; i < 2000; ++i) {
        const long long a = static_cast<long long>(testing::uniform(rng, 0, 40000)) - 20000;
        const long long b = static_cast<long long>(testing::uniform(rng, 0, 40000)) - 20000;
        CHECK(((make(a) <=> make(b)) == (a <=> b)));
        CHECK((make(a) == make(b)) == (a == b));
    }
}

TEST_CASE("dates") {
    CHECK(Date::parse("2024-02-29"));
    CHECK_FALSE(Date::parse("2023-02-29"));
    CHECK_FALSE(Date::parse("1900-02-29"));
    CHECK(Date::parse("2000-02-29"));
    CHECK_FALSE(Date::parse("2024-13-01"));
    CHECK_FALSE(Date::parse("2024-1-01"));
    CHECK(Date::parse("2024-03-01")->str() == "2024-03-01");
    CHECK(*Date::parse("2023-12-31") < *Date::parse("2024-01-01"));
}

TEST_CASE("money") {
    auto m = Money::parse("12500.00 GBP");
    REQUIRE(m);
    CHECK(m->str() == "12500 GBP");
    CHECK_FALSE(Money::parse("10 gbp"));
    CHECK_FALSE(Money::parse("10GBP"));
    CHECK_FALSE(Money::parse("10 EURO"));
}

TEST_CASE("parse_value by kind") {
    CHECK(parse_value({ParamKind::Integer, {}}, "+42")->canonical() == "42");
    CHECK_FALSE(parse_value({ParamKind::Integer, {}}, "4.2"));
    CHECK_FALSE(parse_value({ParamKind::Integer, {}}, ""));
    CHECK_FALSE(parse_value({ParamKind::Party, {}}, ""));
    CHECK(parse_value({ParamKind::Text, {}}, "")->canonical().empty());
    ParamType tier{ParamKind::Enum, {"gold", "silver"}};
    CHECK(parse_value(tier, "gold"));
    CHECK_FALSE(parse_value(tier, "bronze"));
    CHECK(value_matches(tier, *parse_value(tier, "silver")));
    CHECK_FALSE(value_matches({ParamKind::Enum, {"gold"}}, *parse_value(tier, "silver")));
}

TEST_CASE("canonical text re-parses to the same value") {
    testing::Rng rng(11);
    for (auto kind : {ParamKind::Text, ParamKind::Integer, ParamKind::Decimal, ParamKind::Date, ParamKind::Money,
                      ParamKind::Party}) {
        ParamType t{kind, {}};
        for (int i = 0; i < 50; ++i) {
            const ParamValue v = testing::random_value(rng, t);
            CHECK(parse_value(t, v.canonical()) == v);
        }
    }
}

TEST_CASE("comparisons") {
    auto money = [](const char* s) { return *parse_value({ParamKind::Money, {}}, s); };
    CHECK(compare_values(money("10 EUR"), money("9.99 EUR")) == std::strong_ordering::greater);
    CHECK_FALSE(compare_values(money("10 EUR"), money("10 USD")));
    CHECK_FALSE(compare_values(ParamValue::integer(1), ParamValue::text("1")));
    CHECK(compare_values(ParamValue::party("Acme"), ParamValue::party("Acme")) == std::strong_ordering::equal);
}
