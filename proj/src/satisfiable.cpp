#include "contractcad/engine.hpp"

#include <algorithm>

namespace ccad {

bool structural_gap(const Gap& gap) {
    return gap.kind != GapKind::UnboundParameter && gap.kind != GapKind::RequiredParameter;
}

namespace {

// Depth-first search over units in preorder. Each unit is excluded, or
// included with one of its versions, or included without a selection.
// A constraint is checked once the last unit it mentions is decided; the
// coverage of a unit once its whole subtree is decided.
class Search {
public:
    explicit Search(const CheckContext& ctx) : ctx_(ctx), order_(ctx.preorder()) {
        const std::size_t n = order_.size();
        for (std::size_t i = 0; i < n; ++i) pos_.emplace(order_[i], i);
        parent_.assign(n, npos);
        subtree_end_.assign(n, 0);
        versions_.resize(n);
        leaf_.assign(n, false);
        for (std::size_t i = 0; i < n; ++i) {
            if (const std::string* p = ctx.parent(order_[i])) parent_[i] = pos_.at(*p);
            for (const auto& v : ctx.doc().versions_of(order_[i])) versions_[i].push_back(v.id);
            leaf_[i] = ctx.children(order_[i]).empty();
        }
        for (std::size_t i = n; i-- > 0;) {
            subtree_end_[i] = std::max(subtree_end_[i], i);
            if (parent_[i] != npos) subtree_end_[parent_[i]] = std::max(subtree_end_[parent_[i]], subtree_end_[i]);
        }
        checks_.resize(n);
        coverage_.resize(n);
        for (std::size_t i = 0; i < n; ++i) coverage_[subtree_end_[i]].push_back(i);
        for (std::size_t c = 0; c < ctx.constraints().size(); ++c) {
            const Constraint& con = ctx.constraints()[c];
            if (con.kind() == ConstraintKind::ParamRule) continue;
            std::size_t last = 0;
            for (const auto& atom : con.atoms()) last = std::max(last, position_of(atom));
            checks_[last].push_back(c);
        }
        included_.assign(n, false);
        selected_.assign(n, -1);
        shadowed_.assign(n, false);
    }

    bool run() { return order_.empty() || step(0); }

    DocumentInstance witness() const {
        DocumentInstance inst = DocumentInstance::create(ctx_.doc(), "witness");
        for (std::size_t i = 0; i < order_.size(); ++i) {
            if (!included_[i]) continue;
            inst.included.insert(order_[i]);
            if (selected_[i] >= 0) inst.selections[order_[i]] = versions_[i][static_cast<std::size_t>(selected_[i])];
        }
        return inst;
    }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t position_of(const Atom& atom) const {
        if (atom.kind == AtomKind::UnitIncluded) return pos_.at(atom.id);
        return pos_.at(ctx_.version(atom.id)->unit_id);
    }

    bool holds(const Atom& atom) const {
        if (atom.kind == AtomKind::UnitIncluded) return included_[pos_.at(atom.id)];
        const std::size_t p = pos_.at(ctx_.version(atom.id)->unit_id);
        return selected_[p] >= 0 && versions_[p][static_cast<std::size_t>(selected_[p])] == atom.id;
    }

    bool satisfied(const Constraint& c) const {
        if (const auto* req = std::get_if<RequiresRule>(&c.body))
            return !holds(req->antecedent) || included_[pos_.at(req->consequent)];
        if (const auto* ex = std::get_if<ExcludesRule>(&c.body)) return !(holds(ex->a) && holds(ex->b));
        const auto& group = std::get<ExactlyOneRule>(c.body).group;
        return std::count_if(group.begin(), group.end(),
                             [&](const std::string& u) { return included_[pos_.at(u)]; }) == 1;
    }

    bool covered(std::size_t i) const {
        if (!included_[i] || selected_[i] >= 0 || shadowed_[i]) return true;
        if (versions_[i].empty() && !leaf_[i]) return true;
        for (std::size_t d = i + 1; d <= subtree_end_[i]; ++d)
            if (selected_[d] >= 0) return true;
        return false;
    }

    bool consistent(std::size_t i) const {
        for (auto c : checks_[i])
            if (!satisfied(ctx_.constraints()[c])) return false;
        for (auto u : coverage_[i])
            if (!covered(u)) return false;
        return true;
    }

    bool step(std::size_t i) {
        if (i == order_.size()) return true;
        const std::size_t p = parent_[i];
        const bool parent_in = p == npos || included_[p];
        shadowed_[i] = p != npos && (shadowed_[p] || selected_[p] >= 0);

        if (p != npos) {
            if (consistent_after(i, false, -1)) return true;
            if (!parent_in) return false;
        }
        if (!shadowed_[i])
            for (int k = 0; k < static_cast<int>(versions_[i].size()); ++k)
                if (consistent_after(i, true, k)) return true;
        return consistent_after(i, true, -1);
    }

    bool consistent_after(std::size_t i, bool include, int selection) {
        included_[i] = include;
        selected_[i] = selection;
        if (consistent(i) && step(i + 1)) return true;
        included_[i] = false;
        selected_[i] = -1;
        return false;
    }

    const CheckContext& ctx_;
    const std::vector<std::string>& order_;
    std::map<std::string, std::size_t> pos_;
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> subtree_end_;
    std::vector<std::vector<std::string>> versions_;
    std::vector<bool> leaf_;
    std::vector<std::vector<std::size_t>> checks_;
    std::vector<std::vector<std::size_t>> coverage_;
    std::vector<bool> included_;
    std::vector<int> selected_;
    std::vector<bool> shadowed_;
};

} // namespace

SatResult satisfiable(const CheckContext& ctx, const SatLimits& limits) {
    std::size_t units = ctx.preorder().size() - (ctx.preorder().empty() ? 0 : 1);
    std::size_t versioned = 0;
    for (const auto& u : ctx.preorder())
        if (!ctx.doc().versions_of(u).empty()) ++versioned;
    if (units > limits.max_units || versioned > limits.max_versioned_units) return {SatResult::Status::TooLarge, {}};

    Search search(ctx);
    if (!search.run()) return {SatResult::Status::Unsatisfiable, {}};
    return {SatResult::Status::Satisfiable, search.witness()};
}

} // namespace ccad
