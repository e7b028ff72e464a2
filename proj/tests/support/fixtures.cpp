#include "fixtures.hpp"

#include <fstream>
#include <sstream>

namespace ccad::fixtures {

std::filesystem::path dir() { return CCAD_FIXTURE_DIR; }

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

void version(GenericDocument& doc, const std::string& unit, std::string text, std::string rationale,
             std::string provenance, std::optional<std::string> from = std::nullopt) {
    VersionSpec spec;
    spec.source = std::move(text);
    spec.rationale = std::move(rationale);
    spec.provenance = std::move(provenance);
    spec.derived_from = std::move(from);
    spec.created_at = "1988-01-01";
    add_version(doc, unit, std::move(spec));
}

const char* const k41Original =
    "Unless otherwise provided in the Contract the Conditions as amended by the Letter of Acceptance shall prevail "
    "over any other document forming part of the Contract and in the case of conflict between the General "
    "Conditions the Special Conditions shall prevail. Subject thereto the Specification shall prevail over any "
    "other document forming part of the Contract.";

const char* const k41Modified =
    "The documents forming the Contract are to be taken as mutually explanatory of one another and in the case of "
    "ambiguities or discrepancies the same shall be explained and adjusted by the Engineer who shall thereupon "
    "issue to the Contractor appropriate instructions in writing.";

const char* const k146Original =
    "The Engineer shall notify the Contractor if the Engineer decides that the rate of progress of the Works or of "
    "any Section is too slow to meet the Time for Completion and that this is not due to a circumstance for which "
    "the Contractor is entitled to an extension of time under Sub-Clause {{ref cl-33-1}}.";

const char* const k146Modified =
    "The Engineer may notify the Contractor if the Engineer considers that the rate of progress of the Works or of "
    "any Section is too slow to meet the Time for Completion and that this is not due to a circumstance for which "
    "the Contractor is entitled to an extension of time under Sub-Clause {{ref cl-33-1}}.";

} // namespace

GenericDocument iee_document() {
    GenericDocument doc = GenericDocument::create("iee", "General Conditions of Contract");
    const std::string model = "IEE model form 1988";
    for (int n = 1; n <= 33; ++n) {
        const std::string part = "part-" + std::to_string(n);
        append_unit(doc, doc.root_id, UnitKind::Part, "Part " + std::to_string(n), part);
        if (n == 4) {
            append_unit(doc, part, UnitKind::Section, "Precedence of Documents", "cl-4-1", {RoleTag::SecondaryCondition});
            version(doc, "cl-4-1", k41Original, "model form wording", model);
            version(doc, "cl-4-1", k41Modified, "documents read together, conflicts settled by the Engineer",
                    "executed contract", "cl-4-1:v1");
        } else if (n == 14) {
            for (int s = 1; s <= 5; ++s) {
                const std::string id = "cl-14-" + std::to_string(s);
                append_unit(doc, part, UnitKind::Section, "Programme item " + std::to_string(s), id);
                version(doc, id, "Text of Sub-Clause 14-" + std::to_string(s) + ".", "model form wording", model);
            }
            append_unit(doc, part, UnitKind::Section, "Rate of Progress", "cl-14-6", {RoleTag::Procedure});
            version(doc, "cl-14-6", k146Original, "model form wording", model);
            version(doc, "cl-14-6", k146Modified, "notice left to the Engineer's discretion", "executed contract",
                    "cl-14-6:v1");
        } else if (n == 33) {
            append_unit(doc, part, UnitKind::Section, "Extension of Time", "cl-33-1", {RoleTag::Procedure});
            version(doc, "cl-33-1", "Text of Sub-Clause 33-1.", "model form wording", model);
        } else {
            version(doc, part, "Text of Part " + std::to_string(n) + ".", "model form wording", model);
        }
    }
    return doc;
}

DocumentInstance iee_golden_instance(const GenericDocument& doc) {
    DocumentInstance inst = DocumentInstance::create(doc, "golden");
    for (const auto& [id, unit] : doc.units) inst.included.insert(id);
    for (const auto& [unit, versions] : doc.versions) inst.selections[unit] = versions.front().id;
    inst.selections["cl-4-1"] = "cl-4-1:v2";
    inst.selections["cl-14-6"] = "cl-14-6:v1";
    return inst;
}

GenericDocument sale_document() {
    GenericDocument doc = GenericDocument::create("sale", "Agreement for the Sale of Goods");
    const std::string src = "house precedent";
    declare_parameter(doc, {"buyer", {ParamKind::Party, {}}, "purchasing party"});
    declare_parameter(doc, {"seller", {ParamKind::Party, {}}, "selling party"});
    declare_parameter(doc, {"draftDate", {ParamKind::Date, {}}, "date the agreement was drafted"});
    declare_parameter(doc, {"effectiveDate", {ParamKind::Date, {}}, "date the agreement takes effect"});
    declare_parameter(doc, {"price", {ParamKind::Money, {}}, "contract price"});

    append_unit(doc, "root", UnitKind::Part, "Parties", "parties", {RoleTag::Definition});
    version(doc, "parties", "This agreement is made between {{param seller}} (the Seller) and {{param buyer}} (the Buyer).",
            "standard recital", src);
    append_unit(doc, "root", UnitKind::Part, "Commencement", "commencement");
    version(doc, "commencement",
            "Drafted on {{param draftDate}}. This agreement has effect from {{param effectiveDate}}.",
            "standard commencement", src);
    append_unit(doc, "root", UnitKind::Part, "Price", "price", {RoleTag::Prescription});
    version(doc, "price", "The Buyer shall pay {{param price}} on delivery.", "payment on delivery", src);
    version(doc, "price", "The Buyer shall pay {{param price}} within 30 days of invoice.", "credit terms", src,
            "price:v1");
    append_unit(doc, "root", UnitKind::Part, "Third Party Agreements", "third-party");
    version(doc, "third-party", "The Seller may subcontract delivery.", "subcontracting allowed", src);
    append_unit(doc, "root", UnitKind::Part, "Third Party Liability", "liability");
    version(doc, "liability",
            "The Seller remains liable for any subcontractor engaged under {{ref third-party}}.", "liability stays",
            src);
    append_unit(doc, "root", UnitKind::Part, "Governing Law", "law");
    append_unit(doc, "law", UnitKind::Section, "English Law", "law-en");
    version(doc, "law-en", "This agreement is governed by English law.", "default forum", src);
    append_unit(doc, "law", UnitKind::Section, "Scots Law", "law-sc");
    version(doc, "law-sc", "This agreement is governed by Scots law.", "northern deliveries", src);

    add_constraint(doc, Constraint::param_rule("distinct-parties", ParamExpr::parse("distinct(buyer,seller)"),
                                               "buyer and seller must be different parties"));
    add_constraint(doc, Constraint::param_rule("dates-ordered", ParamExpr::parse("draftDate < effectiveDate"),
                                               "the agreement must take effect after it was drafted"));
    add_constraint(doc, Constraint::param_rule("effective-date", ParamExpr::parse("defined(effectiveDate)")));
    add_constraint(doc, Constraint::requires_rule("needs-parties", Atom::unit("root"), "parties"));
    add_constraint(doc, Constraint::requires_rule("needs-commencement", Atom::unit("root"), "commencement"));
    add_constraint(doc, Constraint::requires_rule("third-party-liability", Atom::unit("third-party"), "liability",
                                                  "subcontracting needs a liability provision"));
    add_constraint(doc, Constraint::exactly_one("one-law", {"law-en", "law-sc"}));
    return doc;
}

DocumentInstance sale_instance(const GenericDocument& doc, std::string id) {
    DocumentInstance inst = DocumentInstance::create(doc, std::move(id));
    for (const char* u : {"parties", "commencement", "price", "law", "law-en"}) inst.included.insert(u);
    inst.selections = {{"parties", "parties:v1"},
                       {"commencement", "commencement:v1"},
                       {"price", "price:v2"},
                       {"law-en", "law-en:v1"}};
    const auto& decl = [&](const char* n) { return doc.find_parameter(n)->type; };
    inst.bindings.emplace("buyer", *parse_value(decl("buyer"), "Northwind Traders"));
    inst.bindings.emplace("seller", *parse_value(decl("seller"), "Contoso Ltd"));
    inst.bindings.emplace("draftDate", *parse_value(decl("draftDate"), "2024-03-01"));
    inst.bindings.emplace("effectiveDate", *parse_value(decl("effectiveDate"), "2024-04-01"));
    inst.bindings.emplace("price", *parse_value(decl("price"), "12500.00 GBP"));
    return inst;
}

} // namespace ccad::fixtures
