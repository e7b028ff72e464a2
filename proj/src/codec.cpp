#include "contractcad/codec.hpp"

#include "contractcad/error.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>

namespace ccad {

std::string sha256_hex(std::string_view bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> md(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (!md || EVP_DigestInit_ex(md.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(md.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(md.get(), digest.data(), &len) != 1)
        throw Error(ErrorKind::Io, "SHA-256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::ManifestParse, what); }

const json& field(const json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) bad(std::string("missing field '") + name + "'");
    return j.at(name);
}

std::string text_field(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_string()) bad(std::string("field '") + name + "' must be a string");
    return v.get<std::string>();
}

Atom atom_field(const json& j, const char* name) {
    auto atom = Atom::parse(text_field(j, name));
    if (!atom) bad(std::string("field '") + name + "' is not an atom");
    return *atom;
}

} // namespace

json constraint_json(const Constraint& c) {
    json j{{"id", c.id}, {"kind", to_string(c.kind())}, {"origin", to_string(c.origin)}, {"message", c.message}};
    std::visit(
        [&](const auto& rule) {
            using T = std::decay_t<decltype(rule)>;
            if constexpr (std::is_same_v<T, RequiresRule>) {
                j["antecedent"] = rule.antecedent.str();
                j["consequent"] = rule.consequent;
            } else if constexpr (std::is_same_v<T, ExcludesRule>) {
                j["a"] = rule.a.str();
                j["b"] = rule.b.str();
            } else if constexpr (std::is_same_v<T, ExactlyOneRule>) {
                j["group"] = rule.group;
            } else {
                j["expr"] = rule.expr.str();
            }
        },
        c.body);
    if (c.origin == Origin::DerivedTextual) j["sourceVersion"] = c.source_version;
    return j;
}

Constraint constraint_from_json(const json& j) {
    Constraint c;
    c.id = text_field(j, "id");
    const auto kind = constraint_kind_from_string(text_field(j, "kind"));
    if (!kind) bad("constraint " + c.id + ": unknown kind");
    if (j.contains("message")) c.message = text_field(j, "message");
    if (j.contains("origin")) {
        const std::string origin = text_field(j, "origin");
        if (origin == "authored") c.origin = Origin::Authored;
        else if (origin == "derived-textual") c.origin = Origin::DerivedTextual;
        else bad("constraint " + c.id + ": unknown origin");
    }
    if (j.contains("sourceVersion")) c.source_version = text_field(j, "sourceVersion");
    switch (*kind) {
    case ConstraintKind::Requires:
        c.body = RequiresRule{atom_field(j, "antecedent"), text_field(j, "consequent")};
        break;
    case ConstraintKind::Excludes: c.body = ExcludesRule{atom_field(j, "a"), atom_field(j, "b")}; break;
    case ConstraintKind::ExactlyOne: {
        const json& g = field(j, "group");
        if (!g.is_array()) bad("constraint " + c.id + ": group must be an array");
        ExactlyOneRule rule;
        for (const auto& u : g) rule.group.push_back(u.get<std::string>());
        std::sort(rule.group.begin(), rule.group.end());
        c.body = std::move(rule);
        break;
    }
    case ConstraintKind::ParamRule: {
        try {
            c.body = ParamRule{ParamExpr::parse(text_field(j, "expr"))};
        } catch (const Error& e) {
            bad("constraint " + c.id + ": " + e.what());
        }
        break;
    }
    }
    return c;
}

json manifest_json(const GenericDocument& doc) {
    json units = json::array();
    for (const auto& [id, u] : doc.units) {
        json roles = json::array();
        for (auto r : u.roles) roles.push_back(to_string(r));
        units.push_back({{"id", u.id}, {"kind", to_string(u.kind)}, {"heading", u.heading},
                         {"children", u.children}, {"roleTags", roles}});
    }
    json params = json::array();
    for (const auto& p : doc.parameters) {
        json jp{{"name", p.name}, {"ptype", to_string(p.type.kind)}, {"description", p.description}};
        if (p.type.kind == ParamKind::Enum) jp["enumValues"] = p.type.enum_values;
        params.push_back(std::move(jp));
    }
    json versions = json::array();
    for (const auto& [unit_id, list] : doc.versions) {
        for (const auto& v : list) {
            json jv{{"id", v.id},
                    {"unitId", v.unit_id},
                    {"fragmentSha256", sha256_hex(v.source)},
                    {"rationale", v.rationale},
                    {"provenance", v.provenance},
                    {"createdAt", v.created_at}};
            if (v.derived_from) jv["derivedFrom"] = *v.derived_from;
            versions.push_back(std::move(jv));
        }
    }
    json constraints = json::array();
    for (const auto& c : doc.constraints) constraints.push_back(constraint_json(c));
    return {{"id", doc.id},          {"title", doc.title},       {"schemaVersion", doc.schema_version},
            {"rootId", doc.root_id}, {"units", units},           {"parameters", params},
            {"versions", versions},  {"constraints", constraints}};
}

std::string manifest_text(const GenericDocument& doc) { return manifest_json(doc).dump(2) + "\n"; }

std::string generic_digest(const GenericDocument& doc) { return sha256_hex(manifest_text(doc)); }

GenericDocument generic_from_manifest(const json& m,
                                      const std::function<std::string(const json& version)>& fragment) {
    if (!m.is_object()) bad("manifest must be a JSON object");
    const json& schema = field(m, "schemaVersion");
    if (!schema.is_number_integer()) bad("schemaVersion must be an integer");
    if (schema.get<int>() != kSchemaVersion)
        throw Error(ErrorKind::UnsupportedSchema, "unsupported schemaVersion " + std::to_string(schema.get<int>()) +
                                                      " (expected " + std::to_string(kSchemaVersion) + ")");
    GenericDocument doc;
    try {
        doc.id = text_field(m, "id");
        doc.title = text_field(m, "title");
        doc.root_id = text_field(m, "rootId");
        for (const auto& ju : field(m, "units")) {
            Unit u;
            u.id = text_field(ju, "id");
            auto kind = unit_kind_from_string(text_field(ju, "kind"));
            if (!kind) bad("unit " + u.id + ": unknown kind");
            u.kind = *kind;
            u.heading = text_field(ju, "heading");
            u.children = field(ju, "children").get<std::vector<std::string>>();
            for (const auto& r : field(ju, "roleTags")) {
                auto tag = role_tag_from_string(r.get<std::string>());
                if (!tag) bad("unit " + u.id + ": unknown role tag");
                u.roles.insert(*tag);
            }
            doc.units.emplace(u.id, std::move(u));
        }
        for (const auto& jp : field(m, "parameters")) {
            ParameterDecl p;
            p.name = text_field(jp, "name");
            auto kind = param_kind_from_string(text_field(jp, "ptype"));
            if (!kind) bad("parameter " + p.name + ": unknown ptype");
            p.type.kind = *kind;
            if (jp.contains("enumValues")) p.type.enum_values = jp.at("enumValues").get<std::vector<std::string>>();
            p.description = text_field(jp, "description");
            doc.parameters.push_back(std::move(p));
        }
        for (const auto& jv : field(m, "versions")) {
            Version v;
            v.id = text_field(jv, "id");
            v.unit_id = text_field(jv, "unitId");
            v.rationale = text_field(jv, "rationale");
            v.provenance = text_field(jv, "provenance");
            v.created_at = text_field(jv, "createdAt");
            if (jv.contains("derivedFrom")) v.derived_from = text_field(jv, "derivedFrom");
            text_field(jv, "fragmentSha256");
            v.source = fragment(jv);
            doc.versions[v.unit_id].push_back(std::move(v));
        }
        for (const auto& jc : field(m, "constraints")) doc.constraints.push_back(constraint_from_json(jc));
    } catch (const json::exception& e) {
        bad(std::string("malformed manifest: ") + e.what());
    }
    return doc;
}

json instance_json(const DocumentInstance& inst, const std::string& generic_sha256, bool finalized) {
    json bindings = json::object();
    for (const auto& [name, value] : inst.bindings) bindings[name] = value.canonical();
    return {{"id", inst.id},
            {"genericId", inst.generic_id},
            {"genericSha256", generic_sha256},
            {"schemaVersion", inst.generic_schema_version},
            {"mode", to_string(inst.mode)},
            {"included", inst.included},
            {"selections", inst.selections},
            {"bindings", bindings},
            {"finalized", finalized},
            {"revision", inst.revision}};
}

DocumentInstance instance_from_json(const json& j, const GenericDocument& doc) {
    DocumentInstance inst;
    try {
        inst.id = text_field(j, "id");
        inst.generic_id = text_field(j, "genericId");
        inst.generic_schema_version = field(j, "schemaVersion").get<int>();
        auto mode = mode_from_string(text_field(j, "mode"));
        if (!mode) bad("instance " + inst.id + ": unknown mode");
        inst.mode = *mode;
        inst.included = field(j, "included").get<std::set<std::string>>();
        inst.selections = field(j, "selections").get<std::map<std::string, std::string>>();
        for (const auto& [name, value] : field(j, "bindings").items()) {
            const ParameterDecl* decl = doc.find_parameter(name);
            if (!decl) bad("instance " + inst.id + ": binding for undeclared parameter '" + name + "'");
            auto parsed = parse_value(decl->type, value.get<std::string>());
            if (!parsed) bad("instance " + inst.id + ": bad value for '" + name + "'");
            inst.bindings.emplace(name, std::move(*parsed));
        }
        if (j.contains("revision")) inst.revision = j.at("revision").get<std::uint64_t>();
    } catch (const json::exception& e) {
        bad(std::string("malformed instance: ") + e.what());
    }
    return inst;
}

json report_json(const CheckReport& report) {
    json violations = json::array();
    for (const auto& v : report.violations) {
        json atoms = json::array();
        for (const auto& a : v.atoms) atoms.push_back(a.str());
        violations.push_back({{"constraintId", v.constraint_id}, {"kind", to_string(v.kind)}, {"atoms", atoms},
                              {"params", v.params}, {"message", v.message}});
    }
    json gaps = json::array();
    for (const auto& g : report.gaps)
        gaps.push_back({{"kind", to_string(g.kind)}, {"subject", g.subject}, {"constraintId", g.constraint_id},
                        {"message", g.message}});
    return {{"revision", report.revision}, {"violations", violations}, {"gaps", gaps},
            {"fullRecheck", report.full_recheck}};
}

CheckReport report_from_json(const json& j) {
    CheckReport r;
    r.revision = j.at("revision").get<std::uint64_t>();
    r.full_recheck = j.value("fullRecheck", false);
    for (const auto& jv : j.at("violations")) {
        Violation v;
        v.constraint_id = jv.at("constraintId").get<std::string>();
        v.kind = constraint_kind_from_string(jv.at("kind").get<std::string>()).value();
        for (const auto& a : jv.at("atoms")) v.atoms.push_back(Atom::parse(a.get<std::string>()).value());
        v.params = jv.at("params").get<std::vector<std::string>>();
        v.message = jv.at("message").get<std::string>();
        r.violations.push_back(std::move(v));
    }
    for (const auto& jg : j.at("gaps")) {
        Gap g;
        const auto kind = jg.at("kind").get<std::string>();
        for (auto k : {GapKind::MissingSelection, GapKind::UnversionedLeaf, GapKind::EmptyExclusiveGroup,
                       GapKind::MandatoryUnitMissing, GapKind::UnboundParameter, GapKind::RequiredParameter})
            if (to_string(k) == kind) g.kind = k;
        g.subject = jg.at("subject").get<std::string>();
        g.constraint_id = jg.at("constraintId").get<std::string>();
        g.message = jg.at("message").get<std::string>();
        r.gaps.push_back(std::move(g));
    }
    return r;
}

json delta_json(const Delta& d) {
    json j{{"op", to_string(d.op)}};
    if (d.op == Delta::Op::Bind || d.op == Delta::Op::Unbind) j["param"] = d.target;
    else j["unit"] = d.target;
    if (d.op == Delta::Op::Select) j["version"] = d.version;
    if (d.value) j["value"] = d.value->canonical();
    return j;
}

Delta delta_from_json(const json& j, const GenericDocument& doc) {
    auto invalid = [](const std::string& what) { return Error(ErrorKind::InvalidArgument, "delta: " + what); };
    if (!j.is_object() || !j.contains("op") || !j.at("op").is_string()) throw invalid("missing 'op'");
    auto op = delta_op_from_string(j.at("op").get<std::string>());
    if (!op) throw invalid("unknown op '" + j.at("op").get<std::string>() + "'");
    auto str = [&](const char* name) {
        if (!j.contains(name) || !j.at(name).is_string()) throw invalid(std::string("missing '") + name + "'");
        return j.at(name).get<std::string>();
    };
    Delta d;
    d.op = *op;
    if (d.op == Delta::Op::Bind || d.op == Delta::Op::Unbind) {
        d.target = str("param");
        if (d.op == Delta::Op::Bind) {
            const ParameterDecl* decl = doc.find_parameter(d.target);
            if (!decl) throw Error(ErrorKind::UnknownId, "unknown parameter '" + d.target + "'");
            auto value = parse_value(decl->type, str("value"));
            if (!value)
                throw Error(ErrorKind::TypeMismatch,
                            "value for '" + d.target + "' is not a " + std::string(to_string(decl->type.kind)));
            d.value = std::move(*value);
        }
    } else {
        d.target = str("unit");
        if (d.op == Delta::Op::Select) d.version = str("version");
    }
    return d;
}

json chain_json(const std::vector<ChainStep>& chain) {
    json out = json::array();
    for (const auto& s : chain) out.push_back({{"constraintId", s.constraint_id}, {"atom", s.atom.str()}});
    return out;
}

} // namespace ccad
