#include "contractcad/model.hpp"

#include "contractcad/error.hpp"
#include "contractcad/fragment.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace ccad {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::UnknownId: return "unknown-id";
    case ErrorKind::RankViolation: return "rank-violation";
    case ErrorKind::DuplicateId: return "duplicate-id";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::TemplateParse: return "template-parse";
    case ErrorKind::MissingRationale: return "missing-rationale";
    case ErrorKind::LineageMismatch: return "lineage-mismatch";
    case ErrorKind::EmptyEnum: return "empty-enum";
    case ErrorKind::TypeMismatch: return "type-mismatch";
    case ErrorKind::NotIncluded: return "not-included";
    case ErrorKind::UnboundParameter: return "unbound-parameter";
    case ErrorKind::DanglingReference: return "dangling-reference";
    case ErrorKind::StructuralFault: return "structural-fault";
    case ErrorKind::EmptyLog: return "empty-log";
    case ErrorKind::BadIndex: return "bad-index";
    case ErrorKind::DifferentGeneric: return "different-generic";
    case ErrorKind::TooLarge: return "too-large";
    case ErrorKind::InvalidRule: return "invalid-rule";
    case ErrorKind::Io: return "io";
    case ErrorKind::HashMismatch: return "hash-mismatch";
    case ErrorKind::UnsupportedSchema: return "unsupported-schema";
    case ErrorKind::ManifestParse: return "manifest-parse";
    case ErrorKind::NotFound: return "not-found";
    case ErrorKind::Finalized: return "finalized";
    }
    return "unknown";
}

std::string_view to_string(UnitKind kind) {
    switch (kind) {
    case UnitKind::Document: return "document";
    case UnitKind::Part: return "part";
    case UnitKind::Section: return "section";
    case UnitKind::Provision: return "provision";
    case UnitKind::Sentence: return "sentence";
    }
    return "section";
}

std::optional<UnitKind> unit_kind_from_string(std::string_view text) {
    for (auto k : {UnitKind::Document, UnitKind::Part, UnitKind::Section, UnitKind::Provision, UnitKind::Sentence})
        if (to_string(k) == text) return k;
    return std::nullopt;
}

std::string_view to_string(RoleTag tag) {
    switch (tag) {
    case RoleTag::Definition: return "definition";
    case RoleTag::Prescription: return "prescription";
    case RoleTag::Procedure: return "procedure";
    case RoleTag::Formula: return "formula";
    case RoleTag::SecondaryCondition: return "secondary-condition";
    }
    return "definition";
}

std::optional<RoleTag> role_tag_from_string(std::string_view text) {
    for (auto t : {RoleTag::Definition, RoleTag::Prescription, RoleTag::Procedure, RoleTag::Formula,
                   RoleTag::SecondaryCondition})
        if (to_string(t) == text) return t;
    return std::nullopt;
}

std::string_view to_string(Mode mode) { return mode == Mode::Notify ? "notify" : "enforce"; }

std::optional<Mode> mode_from_string(std::string_view text) {
    if (text == "notify") return Mode::Notify;
    if (text == "enforce") return Mode::Enforce;
    return std::nullopt;
}

bool is_valid_name(std::string_view text) {
    return !text.empty() && std::all_of(text.begin(), text.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-';
    });
}

bool is_valid_id(std::string_view text) {
    return !text.empty() && text != "." && text != ".." && std::all_of(text.begin(), text.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.' || c == ':';
    });
}

// ---------------------------------------------------------------------------

GenericDocument GenericDocument::create(std::string id, std::string title, std::string root_id) {
    if (!is_valid_id(id)) throw Error(ErrorKind::InvalidArgument, "invalid document id '" + id + "'");
    if (!is_valid_name(root_id)) throw Error(ErrorKind::InvalidArgument, "invalid unit id '" + root_id + "'");
    GenericDocument doc;
    doc.id = std::move(id);
    doc.title = std::move(title);
    doc.root_id = root_id;
    doc.units.emplace(root_id, Unit{root_id, UnitKind::Document, doc.title, {}, {}});
    return doc;
}

const Unit& GenericDocument::unit(std::string_view unit_id) const {
    auto it = units.find(std::string(unit_id));
    if (it == units.end()) throw Error(ErrorKind::UnknownId, "unknown unit '" + std::string(unit_id) + "'");
    return it->second;
}

const std::vector<Version>& GenericDocument::versions_of(std::string_view unit_id) const {
    static const std::vector<Version> none;
    auto it = versions.find(std::string(unit_id));
    return it == versions.end() ? none : it->second;
}

const Version* GenericDocument::find_version(std::string_view version_id) const {
    for (const auto& [unit_id, list] : versions)
        for (const auto& v : list)
            if (v.id == version_id) return &v;
    return nullptr;
}

const ParameterDecl* GenericDocument::find_parameter(std::string_view name) const {
    for (const auto& p : parameters)
        if (p.name == name) return &p;
    return nullptr;
}

const Constraint* GenericDocument::find_constraint(std::string_view constraint_id) const {
    for (const auto& c : constraints)
        if (c.id == constraint_id) return &c;
    return nullptr;
}

std::optional<std::string> GenericDocument::parent_of(std::string_view unit_id) const {
    for (const auto& [id, u] : units)
        if (std::find(u.children.begin(), u.children.end(), unit_id) != u.children.end()) return id;
    return std::nullopt;
}

DocumentInstance DocumentInstance::create(const GenericDocument& doc, std::string id, Mode mode) {
    DocumentInstance inst;
    inst.id = std::move(id);
    inst.generic_id = doc.id;
    inst.generic_schema_version = doc.schema_version;
    inst.included.insert(doc.root_id);
    inst.mode = mode;
    return inst;
}

bool same_content(const DocumentInstance& a, const DocumentInstance& b) {
    return a.id == b.id && a.generic_id == b.generic_id && a.generic_schema_version == b.generic_schema_version &&
           a.included == b.included && a.selections == b.selections && a.bindings == b.bindings && a.mode == b.mode;
}

// ---------------------------------------------------------------------------

std::string add_unit(GenericDocument& doc, std::string_view parent_id, UnitKind kind, std::string heading,
                     std::size_t position, std::string unit_id, std::set<RoleTag> roles) {
    auto parent_it = doc.units.find(std::string(parent_id));
    if (parent_it == doc.units.end())
        throw Error(ErrorKind::UnknownId, "unknown parent unit '" + std::string(parent_id) + "'");
    Unit& parent = parent_it->second;
    if (rank(kind) <= rank(parent.kind))
        throw Error(ErrorKind::RankViolation, "a " + std::string(to_string(kind)) + " cannot be placed under a " +
                                                  std::string(to_string(parent.kind)));
    if (position > parent.children.size())
        throw Error(ErrorKind::InvalidArgument, "position " + std::to_string(position) + " beyond " +
                                                    std::to_string(parent.children.size()) + " children");
    if (unit_id.empty()) {
        for (std::size_t n = doc.units.size();; ++n) {
            unit_id = "u" + std::to_string(n);
            if (!doc.units.contains(unit_id)) break;
        }
    } else if (!is_valid_name(unit_id)) {
        throw Error(ErrorKind::InvalidArgument, "invalid unit id '" + unit_id + "'");
    } else if (doc.units.contains(unit_id)) {
        throw Error(ErrorKind::DuplicateId, "unit id '" + unit_id + "' already in use");
    }
    parent.children.insert(parent.children.begin() + static_cast<std::ptrdiff_t>(position), unit_id);
    doc.units.emplace(unit_id, Unit{unit_id, kind, std::move(heading), {}, std::move(roles)});
    return unit_id;
}

std::string append_unit(GenericDocument& doc, std::string_view parent_id, UnitKind kind, std::string heading,
                        std::string unit_id, std::set<RoleTag> roles) {
    const std::size_t end = doc.unit(parent_id).children.size();
    return add_unit(doc, parent_id, kind, std::move(heading), end, std::move(unit_id), std::move(roles));
}

std::string add_version(GenericDocument& doc, std::string_view unit_id, VersionSpec spec) {
    if (!doc.has_unit(unit_id)) throw Error(ErrorKind::UnknownId, "unknown unit '" + std::string(unit_id) + "'");
    parse_template_or_throw(spec.source);
    if (spec.derived_from) {
        const Version* base = doc.find_version(*spec.derived_from);
        if (!base) throw Error(ErrorKind::UnknownId, "unknown version '" + *spec.derived_from + "'");
        if (base->unit_id != unit_id)
            throw Error(ErrorKind::LineageMismatch, "version '" + *spec.derived_from + "' belongs to unit '" +
                                                        base->unit_id + "', not '" + std::string(unit_id) + "'");
        if (spec.rationale.empty())
            throw Error(ErrorKind::MissingRationale, "a derived version must record its rationale");
    }
    const auto& existing = doc.versions_of(unit_id);
    if (spec.id.empty()) {
        for (std::size_t n = existing.size() + 1;; ++n) {
            spec.id = std::string(unit_id) + ":v" + std::to_string(n);
            if (!doc.find_version(spec.id)) break;
        }
    } else if (!is_valid_id(spec.id)) {
        throw Error(ErrorKind::InvalidArgument, "invalid version id '" + spec.id + "'");
    } else if (doc.find_version(spec.id)) {
        throw Error(ErrorKind::DuplicateId, "version id '" + spec.id + "' already in use");
    }
    Version v{spec.id, std::string(unit_id), std::move(spec.source), std::move(spec.rationale),
              std::move(spec.provenance), std::move(spec.derived_from), std::move(spec.created_at)};
    doc.versions[std::string(unit_id)].push_back(std::move(v));
    return spec.id;
}

void declare_parameter(GenericDocument& doc, ParameterDecl decl) {
    if (!is_valid_name(decl.name)) throw Error(ErrorKind::InvalidArgument, "invalid parameter name '" + decl.name + "'");
    if (doc.find_parameter(decl.name))
        throw Error(ErrorKind::DuplicateId, "parameter '" + decl.name + "' already declared");
    if (decl.type.kind == ParamKind::Enum && decl.type.enum_values.empty())
        throw Error(ErrorKind::EmptyEnum, "enum parameter '" + decl.name + "' has no values");
    doc.parameters.push_back(std::move(decl));
}

namespace {

std::map<std::string, ParamType> parameter_types(const GenericDocument& doc) {
    std::map<std::string, ParamType> types;
    for (const auto& p : doc.parameters) types.emplace(p.name, p.type);
    return types;
}

bool atom_exists(const GenericDocument& doc, const Atom& atom) {
    return atom.kind == AtomKind::UnitIncluded ? doc.has_unit(atom.id) : doc.find_version(atom.id) != nullptr;
}

// Problem with a constraint's shape or references, if any.
std::optional<std::pair<StructureFault::Kind, std::string>> constraint_problem(const GenericDocument& doc,
                                                                               const Constraint& c) {
    using K = StructureFault::Kind;
    if (c.origin != Origin::Authored) return std::pair{K::InvalidConstraint, "stored constraints must be authored"};
    for (const auto& atom : c.atoms())
        if (!atom_exists(doc, atom)) return std::pair{K::DanglingConstraint, "refers to unknown " + atom.str()};
    if (const auto* ex = std::get_if<ExcludesRule>(&c.body); ex && ex->a == ex->b)
        return std::pair{K::InvalidConstraint, "excludes needs two different atoms"};
    if (const auto* one = std::get_if<ExactlyOneRule>(&c.body)) {
        std::set<std::string> distinct(one->group.begin(), one->group.end());
        if (distinct.size() < 2 || distinct.size() != one->group.size())
            return std::pair{K::InvalidConstraint, "exactly-one needs at least two distinct units"};
    }
    if (const auto* rule = std::get_if<ParamRule>(&c.body)) {
        if (rule->expr.clauses().empty()) return std::pair{K::InvalidConstraint, "empty parameter rule"};
        if (auto problem = type_check(rule->expr, parameter_types(doc))) return std::pair{K::InvalidConstraint, *problem};
    }
    return std::nullopt;
}

} // namespace

std::string add_constraint(GenericDocument& doc, Constraint constraint) {
    if (constraint.id.empty()) {
        for (std::size_t n = doc.constraints.size() + 1;; ++n) {
            constraint.id = "c" + std::to_string(n);
            if (!doc.find_constraint(constraint.id)) break;
        }
    } else if (!is_valid_id(constraint.id)) {
        throw Error(ErrorKind::InvalidArgument, "invalid constraint id '" + constraint.id + "'");
    } else if (doc.find_constraint(constraint.id)) {
        throw Error(ErrorKind::DuplicateId, "constraint id '" + constraint.id + "' already in use");
    }
    if (auto* one = std::get_if<ExactlyOneRule>(&constraint.body)) std::sort(one->group.begin(), one->group.end());
    if (auto problem = constraint_problem(doc, constraint)) {
        const auto kind = problem->first == StructureFault::Kind::DanglingConstraint ? ErrorKind::UnknownId
                                                                                      : ErrorKind::InvalidArgument;
        throw Error(kind, "constraint " + constraint.id + ": " + problem->second);
    }
    doc.constraints.push_back(constraint);
    return constraint.id;
}

// ---------------------------------------------------------------------------

std::string unit_label(const GenericDocument& doc, const DocumentInstance* instance, std::string_view unit_id,
                       const LabelScheme& scheme) {
    doc.unit(unit_id);
    if (instance && !instance->includes(unit_id))
        throw Error(ErrorKind::NotIncluded, "unit '" + std::string(unit_id) + "' is not included in the instance");

    std::vector<std::size_t> ordinals;
    std::string current(unit_id);
    while (current != doc.root_id) {
        auto parent = doc.parent_of(current);
        if (!parent) throw Error(ErrorKind::StructuralFault, "unit '" + current + "' is not attached to the root");
        std::size_t ordinal = 0;
        for (const auto& sibling : doc.unit(*parent).children) {
            if (!instance || instance->includes(sibling)) ++ordinal;
            if (sibling == current) break;
        }
        ordinals.push_back(ordinal);
        current = *parent;
    }
    std::string label;
    for (auto it = ordinals.rbegin(); it != ordinals.rend(); ++it) {
        if (!label.empty()) label += scheme.separator;
        label += std::to_string(*it);
    }
    return label;
}

std::string_view to_string(StructureFault::Kind kind) {
    using K = StructureFault::Kind;
    switch (kind) {
    case K::BadId: return "bad-id";
    case K::MissingRoot: return "missing-root";
    case K::RootNotDocument: return "root-not-document";
    case K::DanglingChild: return "dangling-child";
    case K::DuplicateChild: return "duplicate-child";
    case K::MultipleParents: return "multiple-parents";
    case K::Cycle: return "cycle";
    case K::Unreachable: return "unreachable";
    case K::RankInversion: return "rank-inversion";
    case K::UnknownVersionUnit: return "unknown-version-unit";
    case K::DuplicateVersionId: return "duplicate-version-id";
    case K::LineageMismatch: return "lineage-mismatch";
    case K::LineageCycle: return "lineage-cycle";
    case K::MissingRationale: return "missing-rationale";
    case K::TemplateParse: return "template-parse";
    case K::DuplicateParameter: return "duplicate-parameter";
    case K::EmptyEnum: return "empty-enum";
    case K::DuplicateConstraint: return "duplicate-constraint";
    case K::DanglingConstraint: return "dangling-constraint";
    case K::InvalidConstraint: return "invalid-constraint";
    }
    return "unknown";
}

std::vector<StructureFault> validate_structure(const GenericDocument& doc) {
    using K = StructureFault::Kind;
    std::vector<StructureFault> faults;
    auto add = [&](K kind, std::string subject, std::string message) {
        faults.push_back({kind, std::move(subject), std::move(message)});
    };

    if (!is_valid_id(doc.id)) add(K::BadId, doc.id, "invalid document id");
    for (const auto& [id, u] : doc.units) {
        if (!is_valid_name(id) || u.id != id) add(K::BadId, id, "invalid or mismatched unit id");
    }

    // Tree shape.
    std::map<std::string, int> parent_count;
    for (const auto& [id, u] : doc.units) {
        std::set<std::string> seen;
        for (const auto& child : u.children) {
            if (!seen.insert(child).second) add(K::DuplicateChild, id, "lists '" + child + "' twice");
            if (child == id) {
                add(K::Cycle, id, "unit lists itself as a child");
                continue;
            }
            auto it = doc.units.find(child);
            if (it == doc.units.end()) {
                add(K::DanglingChild, id, "child '" + child + "' does not exist");
                continue;
            }
            if (rank(it->second.kind) <= rank(u.kind))
                add(K::RankInversion, child,
                    std::string(to_string(it->second.kind)) + " under " + std::string(to_string(u.kind)));
            ++parent_count[child];
        }
    }
    for (const auto& [child, count] : parent_count)
        if (count > 1) add(K::MultipleParents, child, "listed by " + std::to_string(count) + " parents");

    auto root_it = doc.units.find(doc.root_id);
    if (root_it == doc.units.end()) {
        add(K::MissingRoot, doc.root_id, "root unit does not exist");
    } else {
        if (root_it->second.kind != UnitKind::Document) add(K::RootNotDocument, doc.root_id, "root must be a document");
        if (parent_count.contains(doc.root_id)) add(K::Cycle, doc.root_id, "root is listed as a child");

        // Cycle detection over child edges, then reachability from the root.
        std::map<std::string, int> colour;  // 0 new, 1 on stack, 2 done
        std::function<void(const std::string&)> visit = [&](const std::string& id) {
            colour[id] = 1;
            for (const auto& child : doc.units.at(id).children) {
                if (child == id || !doc.units.contains(child)) continue;
                if (colour[child] == 1) add(K::Cycle, child, "cycle through '" + id + "'");
                else if (colour[child] == 0) visit(child);
            }
            colour[id] = 2;
        };
        visit(doc.root_id);
        std::set<std::string> reached;
        for (const auto& [id, c] : colour)
            if (c == 2) reached.insert(id);
        for (const auto& [id, u] : doc.units) {
            if (reached.contains(id)) continue;
            add(K::Unreachable, id, "not reachable from the root");
            if (colour[id] == 0) visit(id);
        }
    }

    // Versions and lineage.
    std::set<std::string> version_ids;
    std::map<std::string, const Version*> by_id;
    for (const auto& [unit_id, list] : doc.versions)
        for (const auto& v : list) by_id.emplace(v.id, &v);
    for (const auto& [unit_id, list] : doc.versions) {
        if (!doc.has_unit(unit_id)) add(K::UnknownVersionUnit, unit_id, "versions stored for an unknown unit");
        for (const auto& v : list) {
            if (!is_valid_id(v.id)) add(K::BadId, v.id, "invalid version id");
            if (!version_ids.insert(v.id).second) add(K::DuplicateVersionId, v.id, "version id used twice");
            if (v.unit_id != unit_id) add(K::UnknownVersionUnit, v.id, "stored under '" + unit_id + "'");
            if (!parse_template(v.source)) add(K::TemplateParse, v.id, "template does not parse");
            if (!v.derived_from) continue;
            if (v.rationale.empty()) add(K::MissingRationale, v.id, "derived version without rationale");
            auto base = by_id.find(*v.derived_from);
            if (base == by_id.end() || base->second->unit_id != v.unit_id) {
                add(K::LineageMismatch, v.id, "derived from '" + *v.derived_from + "' which is not a version of '" +
                                                  v.unit_id + "'");
                continue;
            }
            std::set<std::string> chain{v.id};
            for (const Version* cur = base->second; cur;) {
                if (!chain.insert(cur->id).second) {
                    add(K::LineageCycle, v.id, "lineage loops through '" + cur->id + "'");
                    break;
                }
                if (!cur->derived_from) break;
                auto next = by_id.find(*cur->derived_from);
                cur = next == by_id.end() ? nullptr : next->second;
            }
        }
    }

    std::set<std::string> names;
    for (const auto& p : doc.parameters) {
        if (!is_valid_name(p.name)) add(K::BadId, p.name, "invalid parameter name");
        if (!names.insert(p.name).second) add(K::DuplicateParameter, p.name, "declared twice");
        if (p.type.kind == ParamKind::Enum && p.type.enum_values.empty()) add(K::EmptyEnum, p.name, "enum has no values");
    }

    std::set<std::string> constraint_ids;
    for (const auto& c : doc.constraints) {
        if (!is_valid_id(c.id)) add(K::BadId, c.id, "invalid constraint id");
        if (!constraint_ids.insert(c.id).second) add(K::DuplicateConstraint, c.id, "constraint id used twice");
        if (auto problem = constraint_problem(doc, c)) add(problem->first, c.id, problem->second);
    }
    return faults;
}

std::vector<std::string> validate_instance(const GenericDocument& doc, const DocumentInstance& instance) {
    std::vector<std::string> problems;
    if (instance.generic_id != doc.id) problems.push_back("instance belongs to generic '" + instance.generic_id + "'");
    if (!instance.includes(doc.root_id)) problems.push_back("root unit is not included");
    for (const auto& id : instance.included) {
        if (!doc.has_unit(id)) {
            problems.push_back("included unit '" + id + "' does not exist");
            continue;
        }
        if (auto parent = doc.parent_of(id); parent && !instance.includes(*parent))
            problems.push_back("unit '" + id + "' is included but its parent '" + *parent + "' is not");
    }
    for (const auto& [unit_id, version_id] : instance.selections) {
        if (!instance.includes(unit_id)) problems.push_back("selection for unincluded unit '" + unit_id + "'");
        const Version* v = doc.find_version(version_id);
        if (!v || v->unit_id != unit_id)
            problems.push_back("version '" + version_id + "' is not a version of '" + unit_id + "'");
    }
    for (const auto& [name, value] : instance.bindings) {
        const ParameterDecl* decl = doc.find_parameter(name);
        if (!decl) problems.push_back("binding for undeclared parameter '" + name + "'");
        else if (!value_matches(decl->type, value)) problems.push_back("binding for '" + name + "' has the wrong type");
    }
    return problems;
}

} // namespace ccad
