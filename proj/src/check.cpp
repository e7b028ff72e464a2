#include "contractcad/engine.hpp"

#include <algorithm>
#include <tuple>

namespace ccad {

std::string_view to_string(GapKind kind) {
    switch (kind) {
    case GapKind::MissingSelection: return "missing-selection";
    case GapKind::UnversionedLeaf: return "unversioned-leaf";
    case GapKind::EmptyExclusiveGroup: return "empty-exclusive-group";
    case GapKind::MandatoryUnitMissing: return "mandatory-unit-missing";
    case GapKind::UnboundParameter: return "unbound-parameter";
    case GapKind::RequiredParameter: return "required-parameter";
    }
    return "missing-selection";
}

bool same_findings(const CheckReport& a, const CheckReport& b) {
    return a.revision == b.revision && a.violations == b.violations && a.gaps == b.gaps;
}

namespace {

bool atom_true(const CheckContext& ctx, const DocumentInstance& inst, const Atom& atom) {
    if (atom.kind == AtomKind::UnitIncluded) return inst.includes(atom.id);
    const Version* v = ctx.version(atom.id);
    if (!v) return false;
    auto it = inst.selections.find(v->unit_id);
    return it != inst.selections.end() && it->second == atom.id;
}

std::string join_units(const CheckContext& ctx, const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) {
        if (!out.empty()) out += ", ";
        out += ctx.describe_unit(id);
    }
    return out;
}

std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
    return out;
}

std::string pick(const Constraint& c, std::string fallback) {
    return c.message.empty() ? std::move(fallback) : c.message;
}

struct Findings {
    std::optional<Violation> violation;
    std::vector<Gap> gaps;
};

Findings evaluate(const CheckContext& ctx, const DocumentInstance& inst, const Constraint& c) {
    Findings out;
    std::visit(
        [&](const auto& rule) {
            using T = std::decay_t<decltype(rule)>;
            if constexpr (std::is_same_v<T, RequiresRule>) {
                if (!atom_true(ctx, inst, rule.antecedent) || inst.includes(rule.consequent)) return;
                if (rule.antecedent == Atom::unit(ctx.root())) {
                    out.gaps.push_back({GapKind::MandatoryUnitMissing, rule.consequent, c.id,
                                        pick(c, ctx.describe_unit(rule.consequent) + " is mandatory but not included")});
                    return;
                }
                std::string msg =
                    c.origin == Origin::DerivedTextual
                        ? ctx.describe_atom(rule.antecedent) + " cross-references " +
                              ctx.describe_unit(rule.consequent) + ", which is not included"
                        : ctx.describe_atom(rule.antecedent) + " requires " + ctx.describe_unit(rule.consequent) +
                              ", which is not included";
                std::vector<Atom> atoms{rule.antecedent, Atom::unit(rule.consequent)};
                std::sort(atoms.begin(), atoms.end());
                out.violation = Violation{c.id, c.kind(), std::move(atoms), {}, pick(c, std::move(msg))};
            } else if constexpr (std::is_same_v<T, ExcludesRule>) {
                if (!atom_true(ctx, inst, rule.a) || !atom_true(ctx, inst, rule.b)) return;
                std::vector<Atom> atoms{rule.a, rule.b};
                std::sort(atoms.begin(), atoms.end());
                std::string msg = ctx.describe_atom(atoms[0]) + " and " + ctx.describe_atom(atoms[1]) +
                                  " preclude each other but both are present";
                out.violation = Violation{c.id, c.kind(), std::move(atoms), {}, pick(c, std::move(msg))};
            } else if constexpr (std::is_same_v<T, ExactlyOneRule>) {
                std::vector<std::string> in;
                for (const auto& u : rule.group)
                    if (inst.includes(u)) in.push_back(u);
                if (in.empty()) {
                    out.gaps.push_back({GapKind::EmptyExclusiveGroup, c.id, c.id,
                                        pick(c, "exactly one of " + join_units(ctx, rule.group) +
                                                    " must be included; none is")});
                } else if (in.size() >= 2) {
                    std::vector<Atom> atoms;
                    for (const auto& u : in) atoms.push_back(Atom::unit(u));
                    out.violation = Violation{c.id, c.kind(), std::move(atoms), {},
                                              pick(c, "only one of " + join_units(ctx, rule.group) +
                                                          " may be included, but " + std::to_string(in.size()) +
                                                          " are")};
                }
            } else {
                for (const auto& name : rule.expr.required_parameters()) {
                    if (inst.bindings.contains(name)) continue;
                    out.gaps.push_back({GapKind::RequiredParameter, name, c.id,
                                        pick(c, "parameter '" + name + "' must be bound (" + rule.expr.str() + ")")});
                }
                const auto holds = evaluate_comparisons(rule.expr, inst.bindings, ctx.param_types());
                if (holds && !*holds) {
                    auto params = rule.expr.compared_parameters();
                    std::string msg = "parameters " + join_names(params) + " violate " + rule.expr.str();
                    out.violation = Violation{c.id, c.kind(), {}, std::move(params), pick(c, std::move(msg))};
                }
            }
        },
        c.body);
    return out;
}

bool has_selection_below(const CheckContext& ctx, const DocumentInstance& inst, std::string_view unit_id) {
    for (const auto& [u, v] : inst.selections)
        if (ctx.is_ancestor(unit_id, u)) return true;
    return false;
}

bool has_selection_above(const CheckContext& ctx, const DocumentInstance& inst, std::string_view unit_id) {
    for (const auto& a : ctx.ancestors(unit_id))
        if (inst.selections.contains(a)) return true;
    return false;
}

std::optional<Gap> unit_gap(const CheckContext& ctx, const DocumentInstance& inst, const std::string& unit_id) {
    if (!inst.includes(unit_id) || !ctx.has_unit(unit_id) || inst.selections.contains(unit_id)) return std::nullopt;
    const bool versioned = !ctx.doc().versions_of(unit_id).empty();
    const bool leaf = ctx.children(unit_id).empty();
    if (!versioned && !leaf) return std::nullopt;
    if (has_selection_above(ctx, inst, unit_id) || has_selection_below(ctx, inst, unit_id)) return std::nullopt;
    if (versioned)
        return Gap{GapKind::MissingSelection, unit_id, {},
                   ctx.describe_unit(unit_id) + " is included but no version is selected"};
    return Gap{GapKind::UnversionedLeaf, unit_id, {}, ctx.describe_unit(unit_id) + " is included but has no text"};
}

std::optional<Gap> param_gap(const CheckContext& ctx, const DocumentInstance& inst, const std::string& name) {
    if (inst.bindings.contains(name)) return std::nullopt;
    for (const auto& [unit_id, version_id] : inst.selections) {
        if (ctx.template_params(version_id).contains(name)) {
            const bool declared = ctx.doc().find_parameter(name) != nullptr;
            return Gap{GapKind::UnboundParameter, name, {},
                       "parameter '" + name + "' is used by a selected version but " +
                           (declared ? "not bound" : "not declared")};
        }
    }
    return std::nullopt;
}

void sort_report(CheckReport& report) {
    std::sort(report.violations.begin(), report.violations.end(),
              [](const Violation& a, const Violation& b) { return a.constraint_id < b.constraint_id; });
    std::sort(report.gaps.begin(), report.gaps.end(), [](const Gap& a, const Gap& b) {
        return std::tie(a.kind, a.subject, a.constraint_id) < std::tie(b.kind, b.subject, b.constraint_id);
    });
}

bool unit_keyed(GapKind kind) { return kind == GapKind::MissingSelection || kind == GapKind::UnversionedLeaf; }

} // namespace

CheckReport check_full(const CheckContext& ctx, const DocumentInstance& instance) {
    CheckReport report;
    report.revision = instance.revision;
    for (const auto& c : ctx.constraints()) {
        auto f = evaluate(ctx, instance, c);
        if (f.violation) report.violations.push_back(std::move(*f.violation));
        for (auto& g : f.gaps) report.gaps.push_back(std::move(g));
    }
    for (const auto& unit_id : instance.included)
        if (auto g = unit_gap(ctx, instance, unit_id)) report.gaps.push_back(std::move(*g));
    std::set<std::string> used;
    for (const auto& [unit_id, version_id] : instance.selections)
        for (const auto& p : ctx.template_params(version_id)) used.insert(p);
    for (const auto& name : used)
        if (auto g = param_gap(ctx, instance, name)) report.gaps.push_back(std::move(*g));
    sort_report(report);
    return report;
}

CheckReport check_incremental(const CheckContext& ctx, const DocumentInstance& instance,
                              std::span<const Delta> deltas, const CheckReport& prev) {
    if (prev.revision + 1 != instance.revision) {
        CheckReport report = check_full(ctx, instance);
        report.full_recheck = true;
        return report;
    }

    std::set<std::string> units;
    std::set<std::string> versions;
    std::set<std::string> params;
    for (const auto& delta : deltas) {
        switch (delta.op) {
        case Delta::Op::Include:
            units.insert(delta.target);
            for (const auto& a : ctx.ancestors(delta.target)) units.insert(a);
            break;
        case Delta::Op::Exclude:
            units.insert(delta.target);
            for (const auto& d : ctx.descendants(delta.target)) units.insert(d);
            break;
        case Delta::Op::Select:
        case Delta::Op::Deselect: units.insert(delta.target); break;
        case Delta::Op::Bind:
        case Delta::Op::Unbind: params.insert(delta.target); break;
        }
    }
    // Selections can only change on units whose inclusion or selection the
    // deltas touched; every version of those units may have flipped.
    for (const auto& u : units)
        for (const auto& v : ctx.doc().versions_of(u)) versions.insert(v.id);

    std::set<std::size_t> constraints;
    for (const auto& u : units)
        for (auto i : ctx.constraints_on(Atom::unit(u))) constraints.insert(i);
    for (const auto& v : versions) {
        for (auto i : ctx.constraints_on(Atom::version(v))) constraints.insert(i);
        for (const auto& p : ctx.template_params(v)) params.insert(p);
    }
    for (const auto& p : params)
        for (auto i : ctx.constraints_on_param(p)) constraints.insert(i);

    // Coverage of a unit depends on selections above and below it.
    std::set<std::string> gap_units = units;
    for (const auto& u : units) {
        for (const auto& a : ctx.ancestors(u)) gap_units.insert(a);
        for (const auto& d : ctx.descendants(u)) gap_units.insert(d);
    }

    std::set<std::string> constraint_ids;
    for (auto i : constraints) constraint_ids.insert(ctx.constraints()[i].id);

    CheckReport report;
    report.revision = instance.revision;
    for (const auto& v : prev.violations)
        if (!constraint_ids.contains(v.constraint_id)) report.violations.push_back(v);
    for (const auto& g : prev.gaps) {
        const bool stale = !g.constraint_id.empty()        ? constraint_ids.contains(g.constraint_id)
                           : unit_keyed(g.kind)            ? gap_units.contains(g.subject)
                                                           : params.contains(g.subject);
        if (!stale) report.gaps.push_back(g);
    }

    for (auto i : constraints) {
        auto f = evaluate(ctx, instance, ctx.constraints()[i]);
        if (f.violation) report.violations.push_back(std::move(*f.violation));
        for (auto& g : f.gaps) report.gaps.push_back(std::move(g));
    }
    for (const auto& u : gap_units)
        if (auto g = unit_gap(ctx, instance, u)) report.gaps.push_back(std::move(*g));
    for (const auto& p : params)
        if (auto g = param_gap(ctx, instance, p)) report.gaps.push_back(std::move(*g));
    sort_report(report);
    return report;
}

CheckReport check_incremental(const CheckContext& ctx, const DocumentInstance& instance, const Delta& delta,
                              const CheckReport& prev) {
    return check_incremental(ctx, instance, std::span<const Delta>(&delta, 1), prev);
}

} // namespace ccad
