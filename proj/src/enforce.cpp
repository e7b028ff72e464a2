#include "contractcad/engine.hpp"

#include "contractcad/error.hpp"

#include <algorithm>
#include <functional>

namespace ccad {

namespace {

struct Reason {
    enum class Kind { Trigger, Requires, Containment };
    Kind kind = Kind::Trigger;
    std::string constraint_id;
    Atom from;  // antecedent (Requires) or the child that pulled the unit in
};

struct Closure {
    std::set<std::string> included;
    std::map<std::string, std::string> selections;
    std::map<std::string, Reason> reasons;  // newly included units
    std::set<Atom> newly_true;
};

bool holds(const CheckContext& ctx, const std::set<std::string>& included,
           const std::map<std::string, std::string>& selections, const Atom& atom) {
    if (atom.kind == AtomKind::UnitIncluded) return included.contains(atom.id);
    const Version* v = ctx.version(atom.id);
    if (!v) return false;
    auto it = selections.find(v->unit_id);
    return it != selections.end() && it->second == atom.id;
}

bool breaks(const CheckContext& ctx, const Constraint& c, const std::set<std::string>& included,
            const std::map<std::string, std::string>& selections) {
    if (const auto* ex = std::get_if<ExcludesRule>(&c.body))
        return holds(ctx, included, selections, ex->a) && holds(ctx, included, selections, ex->b);
    if (const auto* one = std::get_if<ExactlyOneRule>(&c.body))
        return std::count_if(one->group.begin(), one->group.end(),
                             [&](const std::string& u) { return included.contains(u); }) >= 2;
    return false;
}

// Adds `unit` and its missing ancestors to `layer`, unless already known.
void pull_in_ancestors(const CheckContext& ctx, const std::string& unit, const Closure& closure,
                       std::map<std::string, Reason>& layer) {
    std::string child = unit;
    for (const std::string* p = ctx.parent(unit); p; p = ctx.parent(*p)) {
        if (closure.included.contains(*p) || layer.contains(*p)) break;
        layer.emplace(*p, Reason{Reason::Kind::Containment, {}, Atom::unit(child)});
        child = *p;
    }
}

void add_layer(Closure& closure, std::map<std::string, Reason>& layer, std::vector<Atom>& frontier) {
    frontier.clear();
    for (auto& [unit, reason] : layer) {
        closure.included.insert(unit);
        closure.newly_true.insert(Atom::unit(unit));
        frontier.push_back(Atom::unit(unit));
        closure.reasons.emplace(unit, std::move(reason));
    }
    layer.clear();
}

// Level-synchronous fixpoint: every Requires whose antecedent became true in
// the previous level fires in constraint-id order; containment of the new
// units follows in unit-id order.
void saturate(const CheckContext& ctx, Closure& closure, std::vector<Atom> frontier) {
    while (!frontier.empty()) {
        std::set<std::size_t> fired;
        for (const auto& atom : frontier)
            for (auto i : ctx.constraints_on(atom)) {
                const auto* req = std::get_if<RequiresRule>(&ctx.constraints()[i].body);
                if (req && req->antecedent == atom) fired.insert(i);
            }
        std::map<std::string, Reason> layer;
        for (auto i : fired) {
            const Constraint& c = ctx.constraints()[i];
            const auto& req = std::get<RequiresRule>(c.body);
            if (closure.included.contains(req.consequent) || layer.contains(req.consequent)) continue;
            layer.emplace(req.consequent, Reason{Reason::Kind::Requires, c.id, req.antecedent});
        }
        std::vector<std::string> required;
        for (const auto& [u, r] : layer) required.push_back(u);
        for (const auto& u : required) pull_in_ancestors(ctx, u, closure, layer);
        add_layer(closure, layer, frontier);
    }
}

std::vector<ChainStep> derivation(const Closure& closure, const Atom& atom) {
    std::vector<ChainStep> path;
    std::function<void(const Atom&)> walk = [&](const Atom& a) {
        if (a.kind != AtomKind::UnitIncluded) return;
        auto it = closure.reasons.find(a.id);
        if (it == closure.reasons.end()) return;
        const Reason& r = it->second;
        if (r.kind == Reason::Kind::Trigger) return;
        walk(r.from);
        path.push_back({r.kind == Reason::Kind::Requires ? r.constraint_id : std::string{}, a});
    };
    walk(atom);
    return path;
}

void append_unique(std::vector<ChainStep>& chain, const std::vector<ChainStep>& steps) {
    for (const auto& s : steps)
        if (std::find(chain.begin(), chain.end(), s) == chain.end()) chain.push_back(s);
}

EnforceResult finish(const CheckContext& ctx, const DocumentInstance& before, const Closure& closure) {
    EnforceResult result;
    for (const auto& [unit, reason] : closure.reasons) result.added.insert(unit);

    std::set<std::size_t> candidates;
    for (const auto& atom : closure.newly_true)
        for (auto i : ctx.constraints_on(atom)) candidates.insert(i);
    for (auto i : candidates) {
        const Constraint& c = ctx.constraints()[i];
        if (c.kind() != ConstraintKind::Excludes && c.kind() != ConstraintKind::ExactlyOne) continue;
        if (!breaks(ctx, c, closure.included, closure.selections) ||
            breaks(ctx, c, before.included, before.selections))
            continue;

        std::vector<Atom> involved;
        if (const auto* ex = std::get_if<ExcludesRule>(&c.body)) {
            involved = {ex->a, ex->b};
            std::sort(involved.begin(), involved.end());
        } else {
            for (const auto& u : std::get<ExactlyOneRule>(c.body).group)
                if (closure.included.contains(u)) involved.push_back(Atom::unit(u));
        }
        Contradiction contradiction{c.id, {}};
        for (const auto& atom : involved) append_unique(contradiction.chain, derivation(closure, atom));
        for (const auto& atom : involved) {
            if (closure.newly_true.contains(atom)) {
                contradiction.chain.push_back({c.id, atom});
                break;
            }
        }
        result.contradiction = std::move(contradiction);
        break;
    }
    return result;
}

} // namespace

EnforceResult plan_enforce_include(const CheckContext& ctx, const DocumentInstance& instance, std::string_view unit_id) {
    if (!ctx.has_unit(unit_id)) throw Error(ErrorKind::UnknownId, "unknown unit '" + std::string(unit_id) + "'");
    Closure closure{instance.included, instance.selections, {}, {}};
    std::vector<Atom> frontier;
    const std::string unit(unit_id);
    if (!closure.included.contains(unit)) {
        std::map<std::string, Reason> layer;
        layer.emplace(unit, Reason{Reason::Kind::Trigger, {}, {}});
        pull_in_ancestors(ctx, unit, closure, layer);
        add_layer(closure, layer, frontier);
    }
    saturate(ctx, closure, std::move(frontier));
    return finish(ctx, instance, closure);
}

EnforceResult plan_enforce_select(const CheckContext& ctx, const DocumentInstance& instance,
                                  std::string_view version_id) {
    const Version* v = ctx.version(version_id);
    if (!v) throw Error(ErrorKind::UnknownId, "unknown version '" + std::string(version_id) + "'");
    if (!instance.includes(v->unit_id))
        throw Error(ErrorKind::NotIncluded, "unit '" + v->unit_id + "' is not included");
    Closure closure{instance.included, instance.selections, {}, {}};
    std::vector<Atom> frontier;
    auto it = closure.selections.find(v->unit_id);
    if (it == closure.selections.end() || it->second != version_id) {
        closure.selections[v->unit_id] = std::string(version_id);
        closure.newly_true.insert(Atom::version(std::string(version_id)));
        frontier.push_back(Atom::version(std::string(version_id)));
    }
    saturate(ctx, closure, std::move(frontier));
    return finish(ctx, instance, closure);
}

EnforceResult enforce_include(const CheckContext& ctx, DocumentInstance& instance, std::string_view unit_id) {
    auto result = plan_enforce_include(ctx, instance, unit_id);
    if (result.ok()) {
        instance.included.insert(result.added.begin(), result.added.end());
        ++instance.revision;
    }
    return result;
}

} // namespace ccad
