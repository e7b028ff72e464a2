#include "contractcad/engine.hpp"

#include "contractcad/error.hpp"

namespace ccad {

namespace {

std::string labelled(const CheckContext& ctx, const DocumentInstance& inst, const std::string& unit_id) {
    const std::string& heading = ctx.doc().unit(unit_id).heading;
    if (!inst.includes(unit_id)) return "'" + heading + "' (not included)";
    const std::string label = unit_label(ctx.doc(), &inst, unit_id);
    return "'" + (label.empty() ? heading : label + " " + heading) + "'";
}

std::string labelled_atom(const CheckContext& ctx, const DocumentInstance& inst, const Atom& atom) {
    if (atom.kind == AtomKind::UnitIncluded) return labelled(ctx, inst, atom.id);
    const Version* v = ctx.version(atom.id);
    return "version " + atom.id + " of " + labelled(ctx, inst, v->unit_id);
}

std::string origin_text(const Constraint& c) {
    if (c.origin == Origin::DerivedTextual) return "derived from a cross-reference in version " + c.source_version;
    return "authored";
}

} // namespace

std::string explain(const CheckContext& ctx, const DocumentInstance& instance, const CheckReport& report,
                    std::size_t index) {
    if (index >= report.violations.size())
        throw Error(ErrorKind::BadIndex, "no violation at index " + std::to_string(index) + " (report has " +
                                             std::to_string(report.violations.size()) + ")");
    const Violation& v = report.violations[index];
    const Constraint* c = ctx.find_constraint(v.constraint_id);
    if (!c) throw Error(ErrorKind::UnknownId, "unknown constraint '" + v.constraint_id + "'");

    std::string text = "Constraint " + c->id + " (" + std::string(to_string(c->kind())) + ", " + origin_text(*c) +
                       ") is violated";
    std::visit(
        [&](const auto& rule) {
            using T = std::decay_t<decltype(rule)>;
            if constexpr (std::is_same_v<T, RequiresRule>) {
                if (c->origin == Origin::DerivedTextual) {
                    text += " because " + labelled_atom(ctx, instance, rule.antecedent) + " cross-references " +
                            labelled(ctx, instance, rule.consequent) +
                            ", so the referenced unit must also be included.";
                } else {
                    text += ": " + labelled_atom(ctx, instance, rule.antecedent) + " requires " +
                            labelled(ctx, instance, rule.consequent) + ".";
                }
            } else if constexpr (std::is_same_v<T, ExcludesRule>) {
                text += ": " + labelled_atom(ctx, instance, v.atoms[0]) + " and " +
                        labelled_atom(ctx, instance, v.atoms[1]) + " preclude each other but both are present.";
            } else if constexpr (std::is_same_v<T, ExactlyOneRule>) {
                text += ": only one of the alternatives may be included, but these are:";
                for (const auto& a : v.atoms) text += " " + labelled(ctx, instance, a.id);
                text += ".";
            } else {
                text += ": the rule " + rule.expr.str() + " does not hold for";
                bool first = true;
                for (const auto& p : v.params) {
                    text += std::string(first ? " " : ", ") + p + " = \"" + instance.bindings.at(p).canonical() + "\"";
                    first = false;
                }
                text += ".";
            }
        },
        c->body);
    if (c->origin == Origin::Authored && !c->message.empty()) text += " Author's note: " + c->message;
    return text;
}

std::string explain(const CheckContext& ctx, const Contradiction& contradiction) {
    const Constraint* c = ctx.find_constraint(contradiction.constraint_id);
    std::string text = "Blocked: the edit would violate " + contradiction.constraint_id;
    if (c) text += " (" + std::string(to_string(c->kind())) + ")";
    text += ".";
    for (const auto& step : contradiction.chain) {
        if (step.constraint_id.empty()) text += " " + ctx.describe_atom(step.atom) + " is included as a container.";
        else if (step.constraint_id == contradiction.constraint_id)
            text += " " + ctx.describe_atom(step.atom) + " conflicts under " + step.constraint_id + ".";
        else text += " " + step.constraint_id + " requires " + ctx.describe_atom(step.atom) + ".";
    }
    return text;
}

} // namespace ccad
