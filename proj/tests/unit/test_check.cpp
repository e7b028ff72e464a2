#include <doctest.h>

#include "contractcad/error.hpp"
#include "contractcad/engine.hpp"
#include "fixtures.hpp"
#include "gen.hpp"

using namespace ccad;

namespace doctest {
template <>
struct StringMaker<std::vector<std::pair<GapKind, std::string>>> {
    static String convert(const std::vector<std::pair<GapKind, std::string>>& gaps) {
        std::string out;
        for (const auto& [k, s] : gaps) out += std::string(to_string(k)) + " " + s + "; ";
        return out.c_str();
    }
};
} // namespace doctest

namespace {

std::vector<std::string> violation_ids(const CheckReport& r) {
    std::vector<std::string> out;
    for (const auto& v : r.violations) out.push_back(v.constraint_id);
    return out;
}

std::vector<std::pair<GapKind, std::string>> gap_keys(const CheckReport& r) {
    std::vector<std::pair<GapKind, std::string>> out;
    for (const auto& g : r.gaps) out.emplace_back(g.kind, g.subject);
    return out;
}

ParamValue date(const char* s) { return *parse_value({ParamKind::Date, {}}, s); }

} // namespace

TEST_CASE("complete sale instance is clean") {
    const auto ctx = CheckContext::build(fixtures::sale_document());
    const auto inst = fixtures::sale_instance(ctx->doc());
    CHECK(check_full(*ctx, inst).clean());
}

TEST_CASE("domain rules: distinct parties and ordered dates") {
    const auto ctx = CheckContext::build(fixtures::sale_document());
    auto inst = fixtures::sale_instance(ctx->doc());

    inst.bindings["seller"] = inst.bindings.at("buyer");
    auto report = check_full(*ctx, inst);
    REQUIRE(violation_ids(report) == std::vector<std::string>{"distinct-parties"});
    CHECK(report.violations[0].params == std::vector<std::string>{"buyer", "seller"});
    CHECK(report.gaps.empty());

    inst.bindings["seller"] = ParamValue::party("Contoso Ltd");
    inst.bindings["effectiveDate"] = date("2024-03-01");  // same day as drafting
    report = check_full(*ctx, inst);
    CHECK(violation_ids(report) == std::vector<std::string>{"dates-ordered"});
    inst.bindings["effectiveDate"] = date("2024-01-15");
    CHECK(violation_ids(check_full(*ctx, inst)) == std::vector<std::string>{"dates-ordered"});

    inst.bindings["effectiveDate"] = date("2024-03-02");
    CHECK(check_full(*ctx, inst).clean());
}

TEST_CASE("gaps of a fresh instance") {
    const auto ctx = CheckContext::build(fixtures::sale_document());
    auto inst = DocumentInstance::create(ctx->doc(), "fresh");
    auto report = check_full(*ctx, inst);
    CHECK(report.violations.empty());
    CHECK(gap_keys(report) == std::vector<std::pair<GapKind, std::string>>{
                                  {GapKind::EmptyExclusiveGroup, "one-law"},
                                  {GapKind::MandatoryUnitMissing, "commencement"},
                                  {GapKind::MandatoryUnitMissing, "parties"},
                                  {GapKind::RequiredParameter, "effectiveDate"},
                              });

    apply_delta(*ctx, inst, Delta::include("parties"));
    report = check_full(*ctx, inst);
    const auto first = gap_keys(report);
    CHECK(std::count(first.begin(), first.end(), std::pair{GapKind::MissingSelection, std::string("parties")}) == 1);

    apply_delta(*ctx, inst, Delta::select("parties", "parties:v1"));
    report = check_full(*ctx, inst);
    const auto keys = gap_keys(report);
    CHECK(std::find(keys.begin(), keys.end(), std::pair{GapKind::UnboundParameter, std::string("buyer")}) != keys.end());
    CHECK(std::find(keys.begin(), keys.end(), std::pair{GapKind::UnboundParameter, std::string("seller")}) != keys.end());
    CHECK(std::find(keys.begin(), keys.end(), std::pair{GapKind::MissingSelection, std::string("parties")}) == keys.end());
}

TEST_CASE("exclusive alternatives and dependencies") {
    const auto ctx = CheckContext::build(fixtures::sale_document());
    auto inst = fixtures::sale_instance(ctx->doc());
    apply_delta(*ctx, inst, Delta::include("law-sc"));
    apply_delta(*ctx, inst, Delta::select("law-sc", "law-sc:v1"));
    auto report = check_full(*ctx, inst);
    REQUIRE(violation_ids(report) == std::vector<std::string>{"one-law"});
    CHECK(report.violations[0].atoms == std::vector<Atom>{Atom::unit("law-en"), Atom::unit("law-sc")});
    apply_delta(*ctx, inst, Delta::exclude("law-en"));
    apply_delta(*ctx, inst, Delta::include("third-party"));
    apply_delta(*ctx, inst, Delta::select("third-party", "third-party:v1"));
    report = check_full(*ctx, inst);
    REQUIRE(violation_ids(report) == std::vector<std::string>{"third-party-liability"});
    CHECK(report.violations[0].message == "subcontracting needs a liability provision");
}

TEST_CASE("cross-references need their targets") {
    const auto ctx = CheckContext::build(fixtures::iee_document());
    auto inst = fixtures::iee_golden_instance(ctx->doc());
    CHECK(check_full(*ctx, inst).clean());
    apply_delta(*ctx, inst, Delta::exclude("part-33"));
    auto report = check_full(*ctx, inst);
    REQUIRE(violation_ids(report) == std::vector<std::string>{"xref:cl-14-6:v1->cl-33-1"});
    CHECK(report.violations[0].message.find("cross-references") != std::string::npos);
    CHECK(report.violations[0].message.find("Extension of Time") != std::string::npos);
    apply_delta(*ctx, inst, Delta::select("cl-14-6", "cl-14-6:v2"));
    CHECK(violation_ids(check_full(*ctx, inst)) == std::vector<std::string>{"xref:cl-14-6:v2->cl-33-1"});
}

TEST_CASE("a selection covers the whole subtree") {
    auto doc = fixtures::iee_document();
    add_version(doc, "part-14", {"Whole of Part 14.", "consolidated", "desk", {}, {}, {}});
    const auto ctx = CheckContext::build(doc);
    auto inst = fixtures::iee_golden_instance(doc);
    inst.selections.erase("part-14");
    for (int s = 1; s <= 6; ++s) inst.selections.erase("cl-14-" + std::to_string(s));
    CHECK(gap_keys(check_full(*ctx, inst)) ==
          std::vector<std::pair<GapKind, std::string>>{{GapKind::MissingSelection, "cl-14-1"},
                                                       {GapKind::MissingSelection, "cl-14-2"},
                                                       {GapKind::MissingSelection, "cl-14-3"},
                                                       {GapKind::MissingSelection, "cl-14-4"},
                                                       {GapKind::MissingSelection, "cl-14-5"},
                                                       {GapKind::MissingSelection, "cl-14-6"},
                                                       {GapKind::MissingSelection, "part-14"}});
    inst.selections["part-14"] = "part-14:v1";
    CHECK(check_full(*ctx, inst).clean());
}

TEST_CASE("incremental check equals full check along random walks") {
    testing::Rng rng(2024);
    for (int doc_i = 0; doc_i < 60; ++doc_i) {
        const auto ctx = CheckContext::build(testing::random_document(rng));
        auto inst = DocumentInstance::create(ctx->doc(), "walk");
        auto report = check_full(*ctx, inst);
        for (int step = 0; step < 80; ++step) {
            const Delta d = testing::random_delta(rng, *ctx, inst);
            apply_delta(*ctx, inst, d);
            report = check_incremental(*ctx, inst, d, report);
            const auto full = check_full(*ctx, inst);
            REQUIRE_MESSAGE(same_findings(report, full), "doc " << doc_i << " step " << step << " " << d.str());
            CHECK_FALSE(report.full_recheck);
        }
    }
}

TEST_CASE("stale reports fall back to a full check") {
    const auto ctx = CheckContext::build(fixtures::sale_document());
    auto inst = fixtures::sale_instance(ctx->doc());
    const auto before = check_full(*ctx, inst);
    apply_delta(*ctx, inst, Delta::unbind("buyer"));
    apply_delta(*ctx, inst, Delta::unbind("seller"));
    const auto report = check_incremental(*ctx, inst, Delta::unbind("seller"), before);
    CHECK(report.full_recheck);
    CHECK(same_findings(report, check_full(*ctx, inst)));
}

TEST_CASE("explanations") {
    const auto ctx = CheckContext::build(fixtures::iee_document());
    auto inst = fixtures::iee_golden_instance(ctx->doc());
    apply_delta(*ctx, inst, Delta::exclude("cl-33-1"));
    const auto report = check_full(*ctx, inst);
    REQUIRE(report.violations.size() == 1);
    const auto text = explain(*ctx, inst, report, 0);
    CHECK(text.find("derived from a cross-reference in version cl-14-6:v1") != std::string::npos);
    CHECK(text.find("'14-6 Rate of Progress'") != std::string::npos);
    CHECK(text.find("(not included)") != std::string::npos);
    try {
        explain(*ctx, inst, report, 1);
        FAIL("explained a missing violation");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BadIndex);
    }

    const auto sale = CheckContext::build(fixtures::sale_document());
    auto s = fixtures::sale_instance(sale->doc());
    s.bindings["seller"] = s.bindings.at("buyer");
    const auto text2 = explain(*sale, s, check_full(*sale, s), 0);
    CHECK(text2.find("buyer = \"Northwind Traders\"") != std::string::npos);
    CHECK(text2.find("Author's note: buyer and seller must be different parties") != std::string::npos);
}
