#include "contractcad/engine.hpp"

#include "contractcad/error.hpp"

#include <algorithm>

namespace ccad {

CheckContext::CheckContext(std::shared_ptr<const GenericDocument> doc) : doc_(std::move(doc)) {
    const GenericDocument& d = *doc_;

    auto derived = derive_textual_constraints(d);
    authoring_faults_ = std::move(derived.faults);
    constraints_ = d.constraints;
    constraints_.insert(constraints_.end(), derived.constraints.begin(), derived.constraints.end());
    std::stable_sort(constraints_.begin(), constraints_.end(),
                     [](const Constraint& a, const Constraint& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < constraints_.size(); ++i) constraint_pos_.emplace(constraints_[i].id, i);

    parents_.emplace(d.root_id, "");
    for (const auto& [id, unit] : d.units)
        for (const auto& child : unit.children) parents_.emplace(child, id);

    std::vector<std::string> stack{d.root_id};
    std::set<std::string> seen;
    while (!stack.empty()) {
        std::string id = stack.back();
        stack.pop_back();
        if (!seen.insert(id).second || !d.units.contains(id)) continue;
        preorder_.push_back(id);
        const auto& kids = d.units.at(id).children;
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }

    for (const auto& [unit_id, list] : d.versions) {
        for (const auto& v : list) {
            versions_.emplace(v.id, &v);
            auto tmpl = parse_template_or_throw(v.source);
            template_params_.emplace(v.id, tmpl.parameters());
            templates_.emplace(v.id, std::move(tmpl));
        }
    }
    for (const auto& p : d.parameters) param_types_.emplace(p.name, p.type);

    for (std::size_t i = 0; i < constraints_.size(); ++i) {
        for (const auto& atom : constraints_[i].atoms()) {
            auto& list = atom_index_[atom];
            if (list.empty() || list.back() != i) list.push_back(i);
        }
        for (const auto& name : constraints_[i].parameters()) param_index_[name].push_back(i);
    }
}

std::shared_ptr<const CheckContext> CheckContext::build(GenericDocument doc) {
    return std::make_shared<const CheckContext>(std::make_shared<const GenericDocument>(std::move(doc)));
}

const Constraint* CheckContext::find_constraint(std::string_view id) const {
    auto it = constraint_pos_.find(std::string(id));
    return it == constraint_pos_.end() ? nullptr : &constraints_[it->second];
}

const std::string* CheckContext::parent(std::string_view unit_id) const {
    auto it = parents_.find(std::string(unit_id));
    if (it == parents_.end() || it->second.empty()) return nullptr;
    return &it->second;
}

const std::vector<std::string>& CheckContext::children(std::string_view unit_id) const {
    return doc_->unit(unit_id).children;
}

std::vector<std::string> CheckContext::ancestors(std::string_view unit_id) const {
    std::vector<std::string> out;
    for (const std::string* p = parent(unit_id); p; p = parent(*p)) out.push_back(*p);
    return out;
}

std::vector<std::string> CheckContext::descendants(std::string_view unit_id) const {
    std::vector<std::string> out;
    std::vector<std::string> stack;
    const auto& kids = children(unit_id);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    while (!stack.empty()) {
        std::string id = stack.back();
        stack.pop_back();
        out.push_back(id);
        const auto& grand = children(id);
        for (auto it = grand.rbegin(); it != grand.rend(); ++it) stack.push_back(*it);
    }
    return out;
}

bool CheckContext::is_ancestor(std::string_view ancestor, std::string_view unit_id) const {
    for (const std::string* p = parent(unit_id); p; p = parent(*p))
        if (*p == ancestor) return true;
    return false;
}

const Version* CheckContext::version(std::string_view version_id) const {
    auto it = versions_.find(std::string(version_id));
    return it == versions_.end() ? nullptr : it->second;
}

const Template& CheckContext::template_of(std::string_view version_id) const {
    auto it = templates_.find(std::string(version_id));
    if (it == templates_.end()) throw Error(ErrorKind::UnknownId, "unknown version '" + std::string(version_id) + "'");
    return it->second;
}

const std::set<std::string>& CheckContext::template_params(std::string_view version_id) const {
    static const std::set<std::string> none;
    auto it = template_params_.find(std::string(version_id));
    return it == template_params_.end() ? none : it->second;
}

const std::vector<std::size_t>& CheckContext::constraints_on(const Atom& atom) const {
    static const std::vector<std::size_t> none;
    auto it = atom_index_.find(atom);
    return it == atom_index_.end() ? none : it->second;
}

const std::vector<std::size_t>& CheckContext::constraints_on_param(std::string_view name) const {
    static const std::vector<std::size_t> none;
    auto it = param_index_.find(std::string(name));
    return it == param_index_.end() ? none : it->second;
}

std::string CheckContext::describe_unit(std::string_view unit_id) const {
    auto it = doc_->units.find(std::string(unit_id));
    if (it == doc_->units.end()) return "[" + std::string(unit_id) + "]";
    return "'" + it->second.heading + "' [" + std::string(unit_id) + "]";
}

std::string CheckContext::describe_atom(const Atom& atom) const {
    if (atom.kind == AtomKind::UnitIncluded) return describe_unit(atom.id);
    const Version* v = version(atom.id);
    return "version " + atom.id + (v ? " of " + describe_unit(v->unit_id) : std::string{});
}

// ---------------------------------------------------------------------------

std::string_view to_string(Delta::Op op) {
    switch (op) {
    case Delta::Op::Include: return "include";
    case Delta::Op::Exclude: return "exclude";
    case Delta::Op::Select: return "select";
    case Delta::Op::Deselect: return "deselect";
    case Delta::Op::Bind: return "bind";
    case Delta::Op::Unbind: return "unbind";
    }
    return "include";
}

std::optional<Delta::Op> delta_op_from_string(std::string_view text) {
    for (auto op : {Delta::Op::Include, Delta::Op::Exclude, Delta::Op::Select, Delta::Op::Deselect, Delta::Op::Bind,
                    Delta::Op::Unbind})
        if (to_string(op) == text) return op;
    return std::nullopt;
}

std::string Delta::str() const {
    std::string out = std::string(to_string(op)) + " " + target;
    if (op == Op::Select) out += " " + version;
    if (op == Op::Bind && value) out += " = " + value->canonical();
    return out;
}

void validate_delta(const CheckContext& ctx, const DocumentInstance& instance, const Delta& delta) {
    using Op = Delta::Op;
    if (delta.op == Op::Bind || delta.op == Op::Unbind) {
        const ParameterDecl* decl = ctx.doc().find_parameter(delta.target);
        if (!decl) throw Error(ErrorKind::UnknownId, "unknown parameter '" + delta.target + "'");
        if (delta.op == Op::Bind && (!delta.value || !value_matches(decl->type, *delta.value)))
            throw Error(ErrorKind::TypeMismatch, "value for '" + delta.target + "' is not a " +
                                                     std::string(to_string(decl->type.kind)));
        return;
    }
    if (!ctx.has_unit(delta.target)) throw Error(ErrorKind::UnknownId, "unknown unit '" + delta.target + "'");
    if (delta.op == Op::Exclude && delta.target == ctx.root())
        throw Error(ErrorKind::InvalidArgument, "the root unit cannot be excluded");
    if (delta.op == Op::Select) {
        const Version* v = ctx.version(delta.version);
        if (!v) throw Error(ErrorKind::UnknownId, "unknown version '" + delta.version + "'");
        if (v->unit_id != delta.target)
            throw Error(ErrorKind::InvalidArgument,
                        "version '" + delta.version + "' is not a version of '" + delta.target + "'");
        if (!instance.includes(delta.target))
            throw Error(ErrorKind::NotIncluded, "unit '" + delta.target + "' is not included");
    }
}

void apply_delta(const CheckContext& ctx, DocumentInstance& instance, const Delta& delta) {
    validate_delta(ctx, instance, delta);
    switch (delta.op) {
    case Delta::Op::Include:
        instance.included.insert(delta.target);
        for (const auto& a : ctx.ancestors(delta.target)) instance.included.insert(a);
        break;
    case Delta::Op::Exclude:
        if (instance.includes(delta.target)) {
            instance.included.erase(delta.target);
            instance.selections.erase(delta.target);
            for (const auto& d : ctx.descendants(delta.target)) {
                instance.included.erase(d);
                instance.selections.erase(d);
            }
        }
        break;
    case Delta::Op::Select: instance.selections[delta.target] = delta.version; break;
    case Delta::Op::Deselect: instance.selections.erase(delta.target); break;
    case Delta::Op::Bind: instance.bindings[delta.target] = *delta.value; break;
    case Delta::Op::Unbind: instance.bindings.erase(delta.target); break;
    }
    ++instance.revision;
}

} // namespace ccad
