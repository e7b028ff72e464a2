#include "gen.hpp"

#include "contractcad/error.hpp"

namespace ccad::testing {

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

namespace {

const std::vector<std::string> kWords = {"the", "Contractor", "shall", "deliver", "Works", "within", "period",
                                         "of",  "notice",     "Engineer", "may", "price", "à", "§"};

const std::vector<ParameterDecl>& params() {
    static const std::vector<ParameterDecl> decls = {
        {"p0", {ParamKind::Party, {}}, "first party"},
        {"p1", {ParamKind::Party, {}}, "second party"},
        {"p2", {ParamKind::Date, {}}, "a date"},
        {"p3", {ParamKind::Integer, {}}, "a count"},
    };
    return decls;
}

std::string random_template(Rng& rng, const std::vector<std::string>& units, const GenOptions& o) {
    std::string text;
    const std::size_t words = uniform(rng, 1, 6);
    for (std::size_t i = 0; i < words; ++i) {
        if (i) text += ' ';
        text += pick(rng, kWords);
        if (chance(rng, o.param_probability / static_cast<double>(words)))
            text += " {{param " + pick(rng, params()).name + "}}";
        if (chance(rng, o.crossref_probability / static_cast<double>(words))) text += " {{ref " + pick(rng, units) + "}}";
    }
    if (chance(rng, 0.1)) text += " \\{{literal}}";
    return text;
}

Atom random_atom(Rng& rng, const std::vector<std::string>& units, const std::vector<std::string>& versions) {
    if (!versions.empty() && chance(rng, 0.35)) return Atom::version(pick(rng, versions));
    return Atom::unit(pick(rng, units));
}

ParamExpr random_expr(Rng& rng) {
    static const std::vector<std::string> forms = {
        "distinct(p0,p1)", "p2 < \"2024-06-01\"", "p3 <= \"3\"",  "defined(p0)", "p0 != \"Acme\"",
        "defined(p2) && p3 < \"4\"", "p3 = \"2\"", "distinct(p0,p1) && defined(p1)",
    };
    return ParamExpr::parse(pick(rng, forms));
}

} // namespace

ParamValue random_value(Rng& rng, const ParamType& type) {
    static const std::vector<std::string> parties = {"Acme", "Globex", "Initech"};
    static const std::vector<std::string> dates = {"2023-12-31", "2024-06-01", "2024-02-29"};
    std::string text;
    switch (type.kind) {
    case ParamKind::Party:
    case ParamKind::Text: text = pick(rng, parties); break;
    case ParamKind::Date: text = pick(rng, dates); break;
    case ParamKind::Integer: text = std::to_string(uniform(rng, 0, 5)); break;
    case ParamKind::Decimal: text = std::to_string(uniform(rng, 0, 9)) + ".5"; break;
    case ParamKind::Money: text = std::to_string(uniform(rng, 1, 9)) + "00 EUR"; break;
    case ParamKind::Enum: text = pick(rng, type.enum_values); break;
    }
    return parse_value(type, text).value();
}

GenericDocument random_document(Rng& rng, const GenOptions& o) {
    GenericDocument doc = GenericDocument::create("gen", "Generated");
    std::vector<std::string> units = {doc.root_id};
    const std::size_t n = uniform(rng, o.min_units, o.max_units);
    for (std::size_t i = 1; i <= n; ++i) {
        std::vector<std::string> parents;
        for (const auto& u : units)
            if (doc.unit(u).kind != UnitKind::Sentence) parents.push_back(u);
        const std::string& parent = pick(rng, parents);
        const int lo = rank(doc.unit(parent).kind) + 1;
        const int kind = static_cast<int>(uniform(rng, static_cast<std::size_t>(lo), static_cast<std::size_t>(std::min(lo + 1, 4))));
        const std::size_t pos = uniform(rng, 0, doc.unit(parent).children.size());
        units.push_back(add_unit(doc, parent, static_cast<UnitKind>(kind), "Heading " + std::to_string(i), pos,
                                 "u" + std::to_string(i)));
    }
    for (const auto& p : params()) declare_parameter(doc, p);

    std::vector<std::string> versions;
    for (const auto& u : units) {
        if (!chance(rng, o.version_probability)) continue;
        const std::size_t k = uniform(rng, 1, std::max<std::size_t>(1, o.max_versions));
        for (std::size_t j = 0; j < k; ++j) {
            VersionSpec spec;
            spec.source = random_template(rng, units, o);
            spec.rationale = "r" + std::to_string(j);
            spec.provenance = "generated";
            if (j > 0 && chance(rng, 0.5)) spec.derived_from = doc.versions_of(u).back().id;
            versions.push_back(add_version(doc, u, spec));
        }
    }

    std::vector<std::string> non_root(units.begin() + 1, units.end());
    const std::size_t m = uniform(rng, 0, o.max_constraints);
    for (std::size_t i = 0; i < m && !non_root.empty(); ++i) {
        const std::size_t kind = uniform(rng, 0, o.param_rules ? 3 : 2);
        try {
            switch (kind) {
            case 0: {
                Atom a = random_atom(rng, units, versions);
                if (o.mandatory_rules && chance(rng, 0.1)) a = Atom::unit(doc.root_id);
                add_constraint(doc, Constraint::requires_rule({}, a, pick(rng, non_root)));
                break;
            }
            case 1:
                add_constraint(doc, Constraint::excludes({}, random_atom(rng, non_root, versions),
                                                         random_atom(rng, non_root, versions)));
                break;
            case 2: {
                std::vector<std::string> group;
                const std::size_t g = uniform(rng, 2, 3);
                for (std::size_t j = 0; j < g; ++j) {
                    const std::string& u = pick(rng, non_root);
                    if (std::find(group.begin(), group.end(), u) == group.end()) group.push_back(u);
                }
                if (group.size() < 2) break;
                add_constraint(doc, Constraint::exactly_one({}, group));
                break;
            }
            default: add_constraint(doc, Constraint::param_rule({}, random_expr(rng))); break;
            }
        } catch (const Error&) {
            // rejected shapes (e.g. an atom excluding itself) are simply skipped
        }
    }
    return doc;
}

Delta random_delta(Rng& rng, const CheckContext& ctx, const DocumentInstance& inst) {
    const auto& units = ctx.preorder();
    std::vector<std::string> included(inst.included.begin(), inst.included.end());
    const std::size_t roll = uniform(rng, 0, 99);
    if (roll < 30) return Delta::include(pick(rng, units));
    if (roll < 40) {
        if (units.size() > 1) return Delta::exclude(units[uniform(rng, 1, units.size() - 1)]);
        return Delta::include(ctx.root());
    }
    if (roll < 65) {
        std::vector<std::string> versioned;
        for (const auto& u : included)
            if (!ctx.doc().versions_of(u).empty()) versioned.push_back(u);
        if (versioned.empty()) return Delta::include(pick(rng, units));
        const std::string& u = pick(rng, versioned);
        return Delta::select(u, pick(rng, ctx.doc().versions_of(u)).id);
    }
    if (roll < 73) return Delta::deselect(pick(rng, included));
    const auto& decl = pick(rng, ctx.doc().parameters);
    if (roll < 93) return Delta::bind(decl.name, random_value(rng, decl.type));
    return Delta::unbind(decl.name);
}

DocumentInstance random_instance(Rng& rng, const CheckContext& ctx, std::size_t steps, std::string id) {
    DocumentInstance inst = DocumentInstance::create(ctx.doc(), std::move(id));
    for (std::size_t i = 0; i < steps; ++i) apply_delta(ctx, inst, random_delta(rng, ctx, inst));
    return inst;
}

CaseSet random_case_set(Rng& rng, std::size_t max_factors, std::size_t max_domain, std::size_t max_rules) {
    CaseSet set;
    const std::size_t nf = uniform(rng, 1, max_factors);
    for (std::size_t f = 0; f < nf; ++f) {
        Factor factor{"f" + std::to_string(f), {}};
        const std::size_t d = uniform(rng, 2, max_domain);
        for (std::size_t v = 0; v < d; ++v) factor.domain.push_back("v" + std::to_string(v));
        set.factors.push_back(std::move(factor));
    }
    static const std::vector<std::string> outcomes = {"pay", "refund", "penalty"};
    const std::size_t nr = uniform(rng, 0, max_rules);
    for (std::size_t r = 0; r < nr; ++r) {
        CaseRule rule{"r" + std::to_string(r), {}, pick(rng, outcomes)};
        for (const auto& factor : set.factors) {
            if (!chance(rng, 0.6)) continue;
            CaseLiteral lit{factor.name, {}};
            for (const auto& v : factor.domain)
                if (chance(rng, 0.5)) lit.allowed.push_back(v);
            if (lit.allowed.empty()) lit.allowed.push_back(pick(rng, factor.domain));
            rule.condition.push_back(std::move(lit));
        }
        set.rules.push_back(std::move(rule));
    }
    return set;
}

} // namespace ccad::testing
