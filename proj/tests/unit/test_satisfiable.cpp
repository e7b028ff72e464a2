#include <doctest.h>

#include "contractcad/engine.hpp"
#include "fixtures.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using namespace ccad;

namespace {

bool structurally_clean(const CheckContext& ctx, const DocumentInstance& inst) {
    const auto report = check_full(ctx, inst);
    if (!std::all_of(report.violations.begin(), report.violations.end(),
                     [](const Violation& v) { return v.kind == ConstraintKind::ParamRule; }))
        return false;
    return std::none_of(report.gaps.begin(), report.gaps.end(), structural_gap);
}

} // namespace

TEST_CASE("fixtures are satisfiable") {
    for (auto doc : {fixtures::sale_document(), fixtures::iee_document()}) {
        const auto ctx = CheckContext::build(doc);
        const auto result = satisfiable(*ctx, {100, 100});
        REQUIRE(result.status == SatResult::Status::Satisfiable);
        REQUIRE(result.witness);
        CHECK(validate_instance(doc, *result.witness).empty());
        CHECK(structurally_clean(*ctx, *result.witness));
    }
}

TEST_CASE("contradictory mandatory units") {
    auto doc = fixtures::sale_document();
    add_constraint(doc, Constraint::requires_rule("needs-sc", Atom::unit("root"), "law-sc"));
    add_constraint(doc, Constraint::requires_rule("needs-en", Atom::unit("root"), "law-en"));
    const auto ctx = CheckContext::build(doc);
    const auto result = satisfiable(*ctx);
    CHECK(result.status == SatResult::Status::Unsatisfiable);
    CHECK_FALSE(result.witness);
    CHECK_FALSE(oracle::exhaustive_satisfiable(doc, ctx->constraints()).satisfiable);
}

TEST_CASE("a version reference can force the only alternative out") {
    auto doc = GenericDocument::create("refs", "Refs");
    append_unit(doc, "root", UnitKind::Part, "A", "a");
    append_unit(doc, "root", UnitKind::Part, "B", "b");
    add_version(doc, "a", {"See {{ref b}}.", "", "desk", {}, {}, {}});
    add_version(doc, "a", {"Also see {{ref b}}.", "", "desk", {}, {}, {}});
    add_version(doc, "b", {"B.", "", "desk", {}, {}, {}});
    add_constraint(doc, Constraint::requires_rule("need-a", Atom::unit("root"), "a"));
    auto ctx = CheckContext::build(doc);
    CHECK(satisfiable(*ctx).status == SatResult::Status::Satisfiable);
    // every version of a references b
    add_constraint(doc, Constraint::excludes("no-b", Atom::unit("a"), Atom::unit("b")));
    ctx = CheckContext::build(doc);
    CHECK(satisfiable(*ctx).status == SatResult::Status::Unsatisfiable);
    CHECK_FALSE(oracle::exhaustive_satisfiable(doc, ctx->constraints()).satisfiable);
}

TEST_CASE("size limit") {
    const auto ctx = CheckContext::build(fixtures::iee_document());
    CHECK(satisfiable(*ctx).status == SatResult::Status::TooLarge);
    CHECK(satisfiable(*ctx, {10, 25}).status == SatResult::Status::TooLarge);
    CHECK(satisfiable(*ctx, {100, 5}).status == SatResult::Status::TooLarge);
}

TEST_CASE("search agrees with exhaustive enumeration") {
    testing::Rng rng(31);
    testing::GenOptions opts;
    opts.max_units = 8;
    opts.max_versions = 2;
    opts.max_constraints = 10;
    opts.crossref_probability = 0.2;
    int sat = 0, unsat = 0;
    for (int i = 0; i < 300; ++i) {
        const auto doc = testing::random_document(rng, opts);
        const auto ctx = CheckContext::build(doc);
        const auto got = satisfiable(*ctx);
        const auto want = oracle::exhaustive_satisfiable(doc, ctx->constraints());
        REQUIRE(got.status != SatResult::Status::TooLarge);
        REQUIRE_MESSAGE((got.status == SatResult::Status::Satisfiable) == want.satisfiable, "document " << i);
        if (got.witness) {
            ++sat;
            CHECK(validate_instance(doc, *got.witness).empty());
            CHECK(structurally_clean(*ctx, *got.witness));
            CHECK(oracle::structurally_complete(doc, ctx->constraints(), *got.witness));
        } else {
            ++unsat;
        }
    }
    CHECK(sat > 20);
    CHECK(unsat > 20);
}
