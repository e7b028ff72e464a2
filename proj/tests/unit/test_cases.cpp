#include <doctest.h>

#include "contractcad/cases.hpp"
#include "contractcad/error.hpp"
#include "fixtures.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using namespace ccad;

namespace {

std::vector<std::string> labels(const CaseSet& set, const Case& c) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < c.size(); ++i) out.push_back(set.factors[i].domain[c[i]]);
    return out;
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::Io;
}

} // namespace

TEST_CASE("pricing table") {
    const auto set = parse_case_rules(fixtures::read_text(fixtures::dir() / "pricing.rules"));
    REQUIRE(set.factors.size() == 3);
    REQUIRE(set.rules.size() == 6);

    const auto completeness = check_completeness(set);
    CHECK(completeness.universe == 24);
    CHECK(completeness.uncovered_total == 5);
    std::vector<std::string> uncovered;
    for (const auto& c : completeness.uncovered) uncovered.push_back(describe_case(set.factors, c));
    CHECK(uncovered == std::vector<std::string>{
                           "delivery=late, volume=low, quarter=q3",
                           "delivery=late, volume=low, quarter=q4",
                           "delivery=late, volume=mid, quarter=q3",
                           "delivery=late, volume=mid, quarter=q4",
                           "delivery=late, volume=high, quarter=q4",
                       });

    const auto consistency = check_consistency(set);
    CHECK(consistency.conflict_total == 2);
    REQUIRE(consistency.conflicts.size() == 2);
    CHECK(describe_case(set.factors, consistency.conflicts[0].c) == "delivery=on-time, volume=mid, quarter=q4");
    CHECK(consistency.conflicts[0].rules == std::vector<std::string>{"r1", "r5"});
    CHECK(describe_case(set.factors, consistency.conflicts[1].c) == "delivery=late, volume=high, quarter=q2");
    CHECK(consistency.conflicts[1].rules == std::vector<std::string>{"r3", "r4"});

    // r3 and r6 overlap on late/high/q1 with the same outcome
    const auto answer = oracle::brute_force_cases(set);
    CHECK(answer.uncovered.size() == 5);
    CHECK(answer.conflicts.size() == 2);
}

TEST_CASE("listing limit keeps the totals") {
    const auto set = parse_case_rules("factor a = x | y\nfactor b = p | q | r\n");
    const auto report = check_completeness(set, 2);
    CHECK(report.uncovered_total == 6);
    CHECK(report.uncovered.size() == 2);
    CHECK(report.uncovered[1] == Case{0, 1});
}

TEST_CASE("rule file errors name the line") {
    for (const auto& [text, needle] : std::vector<std::pair<std::string, std::string>>{
             {"factor a = x | y\nrule r1 a in {x} -> o\n", "line 2"},
             {"factor a = x\n", "a"},
             {"factor a = x | x\n", "a"},
             {"factor a = x | y\nrule r1: b in {x} -> o\n", "b"},
             {"factor a = x | y\nrule r1: a in {z} -> o\n", "z"},
             {"factor a = x | y\nrule r1: a in {x} -> o\nrule r1: a in {y} -> o\n", "r1"},
             {"frobnicate\n", "line 1"},
             {"factor a = x | y\nrule r1: a in * -> \n", "r1"},
         }) {
        try {
            parse_case_rules(text);
            FAIL("accepted: " << text);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::InvalidRule);
            CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos, e.what());
        }
    }
}

TEST_CASE("universe size limit") {
    std::vector<Factor> factors;
    for (int i = 0; i < 7; ++i) factors.push_back({"f" + std::to_string(i), {"a", "b", "c", "d", "e", "f", "g", "h"}});
    CHECK(kind_of([&] { universe_size(factors); }) == ErrorKind::TooLarge);
    factors.pop_back();
    CHECK(universe_size(factors) == 262144);
}

TEST_CASE("agrees with brute force on random tables") {
    testing::Rng rng(12);
    for (int i = 0; i < 300; ++i) {
        const auto set = testing::random_case_set(rng);
        const auto answer = oracle::brute_force_cases(set);
        const auto completeness = check_completeness(set, 1000);
        const auto consistency = check_consistency(set, 1000);
        REQUIRE(completeness.uncovered_total == answer.uncovered.size());
        REQUIRE(consistency.conflict_total == answer.conflicts.size());
        for (std::size_t k = 0; k < completeness.uncovered.size(); ++k)
            CHECK(labels(set, completeness.uncovered[k]) == answer.uncovered[k]);
        for (std::size_t k = 0; k < consistency.conflicts.size(); ++k) {
            CHECK(labels(set, consistency.conflicts[k].c) == answer.conflicts[k].first);
            CHECK(consistency.conflicts[k].rules == answer.conflicts[k].second);
        }
    }
}
