#include "contractcad/assembler.hpp"

#include "contractcad/codec.hpp"
#include "contractcad/error.hpp"

#include <algorithm>

namespace ccad {

bool mixed_granularity(const CheckContext& ctx, const DocumentInstance& instance, std::string_view unit_id) {
    for (const auto& [unit, version] : instance.selections) {
        if (unit == unit_id) continue;
        if (ctx.is_ancestor(unit, unit_id) || ctx.is_ancestor(unit_id, unit)) return true;
    }
    return false;
}

AssemblySession::AssemblySession(std::shared_ptr<const CheckContext> ctx, DocumentInstance instance)
    : ctx_(std::move(ctx)), initial_(instance), instance_(std::move(instance)) {
    report_ = check_full(*ctx_, instance_);
}

AssemblySession AssemblySession::create(GenericDocument doc, Mode mode, std::string instance_id) {
    const auto faults = validate_structure(doc);
    if (!faults.empty()) {
        std::string what = "generic document '" + doc.id + "' is structurally invalid:";
        for (const auto& f : faults) what += "\n  " + std::string(to_string(f.kind)) + " " + f.subject + ": " + f.message;
        throw Error(ErrorKind::StructuralFault, what);
    }
    auto ctx = CheckContext::build(std::move(doc));
    auto instance = DocumentInstance::create(ctx->doc(), std::move(instance_id), mode);
    return AssemblySession(std::move(ctx), std::move(instance));
}

AssemblySession AssemblySession::resume(std::shared_ptr<const CheckContext> ctx, DocumentInstance instance) {
    const auto problems = validate_instance(ctx->doc(), instance);
    if (!problems.empty()) throw Error(ErrorKind::InvalidArgument, "invalid instance: " + problems.front());
    return AssemblySession(std::move(ctx), std::move(instance));
}

namespace {

struct Step {
    DocumentInstance after;
    std::vector<Delta> deltas;
    std::set<std::string> side_effects;
};

Blocked blocked_by(const CheckContext& ctx, const Contradiction& contradiction) {
    return Blocked{explain(ctx, contradiction), contradiction};
}

// Computes the edit without touching the session.
std::variant<Step, Blocked> plan(const CheckContext& ctx, const DocumentInstance& before, const Delta& delta) {
    validate_delta(ctx, before, delta);
    if (delta.op == Delta::Op::Select && mixed_granularity(ctx, before, delta.target))
        return Blocked{"selecting a version of " + ctx.describe_unit(delta.target) +
                           " would mix granularities: an enclosing or enclosed unit already has a selected version",
                       std::nullopt};

    Step step{before, {delta}, {}};
    const bool enforce = before.mode == Mode::Enforce;
    if (enforce && (delta.op == Delta::Op::Include || delta.op == Delta::Op::Select)) {
        EnforceResult closure = delta.op == Delta::Op::Include ? plan_enforce_include(ctx, before, delta.target)
                                                               : plan_enforce_select(ctx, before, delta.version);
        if (closure.contradiction) return blocked_by(ctx, *closure.contradiction);
        if (delta.op == Delta::Op::Select) step.after.selections[delta.target] = delta.version;
        step.after.included.insert(closure.added.begin(), closure.added.end());
        ++step.after.revision;
        for (const auto& u : closure.added)
            if (delta.op != Delta::Op::Include || u != delta.target) step.deltas.push_back(Delta::include(u));
    } else {
        apply_delta(ctx, step.after, delta);
    }
    for (const auto& u : step.after.included)
        if (!before.includes(u) && !(delta.op == Delta::Op::Include && u == delta.target)) step.side_effects.insert(u);
    return step;
}

} // namespace

EditOutcome AssemblySession::apply_edit(const Delta& delta) {
    auto planned = plan(*ctx_, instance_, delta);
    if (auto* b = std::get_if<Blocked>(&planned)) return std::move(*b);
    Step& step = std::get<Step>(planned);
    CheckReport report = check_incremental(*ctx_, step.after, std::span<const Delta>(step.deltas), report_);
    log_.push_back({delta, step.side_effects, instance_, report_});
    instance_ = std::move(step.after);
    report_ = report;
    return Applied{std::move(report), std::move(step.side_effects)};
}

EditOutcome AssemblySession::preview_edit(const Delta& delta) const {
    auto planned = plan(*ctx_, instance_, delta);
    if (auto* b = std::get_if<Blocked>(&planned)) return std::move(*b);
    Step& step = std::get<Step>(planned);
    CheckReport report = check_incremental(*ctx_, step.after, std::span<const Delta>(step.deltas), report_);
    return Applied{std::move(report), std::move(step.side_effects)};
}

FinalizeOutcome AssemblySession::finalize() const {
    FinalizeOutcome out;
    out.report = report_;
    for (const auto& v : report_.violations) out.blockers.push_back(v.constraint_id + ": " + v.message);
    for (const auto& g : report_.gaps)
        out.blockers.push_back(std::string(to_string(g.kind)) + " " + g.subject + ": " + g.message);
    if (out.blockers.empty()) out.finalized.emplace(ctx_, instance_, generic_digest(ctx_->doc()));
    return out;
}

std::pair<std::string, EditOutcome> AssemblySession::promote_version(std::string_view unit_id, std::string source,
                                                                     std::string rationale, std::string provenance,
                                                                     std::string created_at) {
    if (rationale.empty())
        throw Error(ErrorKind::MissingRationale, "a promoted version must record the reason for the change");
    GenericDocument doc = ctx_->doc();
    VersionSpec spec;
    spec.source = std::move(source);
    spec.rationale = std::move(rationale);
    spec.provenance = std::move(provenance);
    spec.created_at = std::move(created_at);
    if (auto it = instance_.selections.find(std::string(unit_id)); it != instance_.selections.end())
        spec.derived_from = it->second;
    const std::string id = add_version(doc, unit_id, std::move(spec));

    ctx_ = CheckContext::build(std::move(doc));
    report_ = check_full(*ctx_, instance_);
    for (auto& entry : log_) entry.report_before = check_full(*ctx_, entry.before);

    if (!instance_.includes(unit_id))
        return {id, Blocked{ctx_->describe_unit(unit_id) + " is not included; the new version was not selected",
                            std::nullopt}};
    return {id, apply_edit(Delta::select(std::string(unit_id), id))};
}

void AssemblySession::undo() {
    if (log_.empty()) throw Error(ErrorKind::EmptyLog, "nothing to undo");
    UndoEntry entry = std::move(log_.back());
    log_.pop_back();
    const std::uint64_t revision = instance_.revision + 1;
    instance_ = std::move(entry.before);
    instance_.revision = revision;
    report_ = std::move(entry.report_before);
    report_.revision = revision;
    report_.full_recheck = false;
}

void AssemblySession::set_mode(Mode mode) { instance_.mode = mode; }

// ---------------------------------------------------------------------------

RenderedDocument render(const CheckContext& ctx, const DocumentInstance& instance, bool draft,
                        const RenderOptions& options) {
    const GenericDocument& doc = ctx.doc();
    RenderedDocument out;
    out.scheme = options.scheme;
    if (draft) out.text += std::string(kDraftWatermark) + "\n";
    out.text += "# " + doc.title + "\n\n";

    std::map<std::string, std::string> labels;
    for (const auto& u : ctx.preorder())
        if (instance.includes(u)) labels.emplace(u, unit_label(doc, &instance, u, options.scheme));
    const Labeler labeler = [&](std::string_view unit) -> std::optional<std::string> {
        auto it = labels.find(std::string(unit));
        if (it == labels.end()) return std::nullopt;
        return it->second;
    };
    FragmentOptions fragment_options;
    fragment_options.placeholders = draft;

    std::set<std::string> shadowed;
    for (const auto& u : ctx.preorder()) {
        if (!instance.includes(u)) continue;
        const std::string* parent = ctx.parent(u);
        if (parent && (shadowed.contains(*parent) || instance.selections.contains(*parent))) {
            shadowed.insert(u);
            continue;
        }
        const std::size_t begin = out.text.size();
        if (u != ctx.root()) {
            const std::string& label = labels.at(u);
            out.text += (label.empty() ? "" : label + " ") + doc.unit(u).heading + "\n\n";
        }
        if (auto sel = instance.selections.find(u); sel != instance.selections.end()) {
            std::string fragment;
            try {
                fragment = render_fragment(ctx.template_of(sel->second), instance.bindings, labeler, fragment_options);
            } catch (const Error& e) {
                throw Error(e.kind(), "version " + sel->second + ": " + e.what());
            }
            if (!fragment.empty()) out.text += fragment + "\n\n";
        } else if (draft && !doc.versions_of(u).empty()) {
            out.text += "\xE2\x9F\xA8no-version\xE2\x9F\xA9\n\n";
        }
        if (out.text.size() > begin) out.spans.push_back({u, begin, out.text.size()});
    }
    while (out.text.ends_with("\n\n")) out.text.pop_back();
    for (auto& span : out.spans) span.end = std::min(span.end, out.text.size());
    return out;
}

RenderedDocument render(const AssemblySession& session, const RenderOptions& options) {
    return render(session.context(), session.instance(), true, options);
}

RenderedDocument render(const FinalizedInstance& finalized, const RenderOptions& options) {
    return render(finalized.context(), finalized.instance(), false, options);
}

// ---------------------------------------------------------------------------

const std::string& diff_subject(const DiffEntry& entry) {
    return std::visit(
        [](const auto& e) -> const std::string& {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, BindingChanged>) return e.param;
            else return e.unit;
        },
        entry);
}

std::vector<DiffEntry> diff(const DocumentInstance& a, const DocumentInstance& b) {
    if (a.generic_id != b.generic_id)
        throw Error(ErrorKind::DifferentGeneric,
                    "instances belong to different generic documents ('" + a.generic_id + "', '" + b.generic_id + "')");
    std::vector<DiffEntry> out;
    std::set<std::string> units(a.included.begin(), a.included.end());
    units.insert(b.included.begin(), b.included.end());
    for (const auto& u : units)
        if (a.includes(u) != b.includes(u)) out.push_back(InclusionChanged{u, b.includes(u)});

    auto lookup = [](const auto& map, const std::string& key) {
        auto it = map.find(key);
        return it == map.end() ? std::nullopt : std::make_optional(it->second);
    };
    std::set<std::string> selected;
    for (const auto& [u, v] : a.selections) selected.insert(u);
    for (const auto& [u, v] : b.selections) selected.insert(u);
    for (const auto& u : selected) {
        auto from = lookup(a.selections, u);
        auto to = lookup(b.selections, u);
        if (from != to) out.push_back(SelectionChanged{u, from, to});
    }
    std::set<std::string> params;
    for (const auto& [p, v] : a.bindings) params.insert(p);
    for (const auto& [p, v] : b.bindings) params.insert(p);
    for (const auto& p : params) {
        auto from = lookup(a.bindings, p);
        auto to = lookup(b.bindings, p);
        if (from != to) out.push_back(BindingChanged{p, from, to});
    }
    std::stable_sort(out.begin(), out.end(), [](const DiffEntry& x, const DiffEntry& y) {
        if (diff_subject(x) != diff_subject(y)) return diff_subject(x) < diff_subject(y);
        return x.index() < y.index();
    });
    return out;
}

DocumentInstance apply_diff(DocumentInstance instance, const std::vector<DiffEntry>& entries) {
    for (const auto& entry : entries) {
        if (const auto* inc = std::get_if<InclusionChanged>(&entry)) {
            if (inc->added) instance.included.insert(inc->unit);
            else instance.included.erase(inc->unit);
        } else if (const auto* sel = std::get_if<SelectionChanged>(&entry)) {
            if (sel->to) instance.selections[sel->unit] = *sel->to;
            else instance.selections.erase(sel->unit);
        } else {
            const auto& bind = std::get<BindingChanged>(entry);
            if (bind.to) instance.bindings.insert_or_assign(bind.param, *bind.to);
            else instance.bindings.erase(bind.param);
        }
    }
    return instance;
}

std::string describe(const DiffEntry& entry) {
    auto opt = [](const std::optional<std::string>& s) { return s ? *s : std::string("(none)"); };
    if (const auto* inc = std::get_if<InclusionChanged>(&entry))
        return std::string(inc->added ? "+ " : "- ") + "unit " + inc->unit;
    if (const auto* sel = std::get_if<SelectionChanged>(&entry))
        return "~ selection " + sel->unit + ": " + opt(sel->from) + " -> " + opt(sel->to);
    const auto& bind = std::get<BindingChanged>(entry);
    auto value = [](const std::optional<ParamValue>& v) { return v ? "\"" + v->canonical() + "\"" : "(unbound)"; };
    return "~ binding " + bind.param + ": " + value(bind.from) + " -> " + value(bind.to);
}

} // namespace ccad
